"""Generators shared by the property and acceptance tests."""
import random
from fractions import Fraction as F

from nilpadic import lie
from nilpadic import lattice as lat


def random_lie_lattice(rng, p, m, count=None):
    """Bracket closure of a few random small integer vectors (scaled by p powers)."""
    d = lie.nil_dim(m)
    count = count if count is not None else rng.randint(1, 3)
    vecs = []
    for _ in range(count):
        scale = p ** rng.randint(0, 1)
        vecs.append(tuple(F(scale * rng.randint(-3, 3)) for _ in range(d)))
    return lie.lie_closure(vecs, p, m)


def lattice_corpus(n, seed=0, primes=(2, 3, 5), sizes=(2, 3, 4, 5)):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p, m = rng.choice(primes), rng.choice(sizes)
        L = random_lie_lattice(rng, p, m)
        if L.rank:
            out.append((p, m, L))
    return out


def random_sublattice(rng, L):
    if L.rank == 0:
        return L
    k = rng.randint(1, max(1, L.rank))
    vecs = []
    for _ in range(k):
        coeffs = [rng.randint(-4, 4) * L.p ** rng.randint(0, 2) for _ in L.basis]
        vecs.append(lat.combine(coeffs, L.basis))
    return lat.hnf(vecs, L.p, L.dim)
