"""Builders for the worked example groups and a random corpus of valid specs."""
from __future__ import annotations

import random
from fractions import Fraction

from .model import IDENTITY, spec_from_dict, validate
from .scalar import DEFAULT_PRECISION, PadicContext, format_scalar, teichmuller


def _m(rows):
    return [[format_scalar(Fraction(x)) if not isinstance(x, (str, dict)) else x for x in r]
            for r in rows]


def _unit(m, entries=()):
    M = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    for (i, j), x in entries:
        M[i - 1][j - 1] = x
    return M


def _diag(*d):
    return [[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]


def _cyclic_table(names):
    """Table of the cyclic group with generator names[0]; names[k] = g^(k+1)."""
    elems = [IDENTITY] + list(names)
    n = len(elems)
    return {f"{elems[a]},{elems[b]}": elems[(a + b) % n]
            for a in range(1, n) for b in range(1, n)}


def _scalar_json(x):
    return format_scalar(x)


def dihedral(precision=DEFAULT_PRECISION):
    """Z_2 ⋊ C_2: the line exp(t E12) inverted by diag(1, -1)."""
    return {"p": 2, "m": 2, "precision": precision,
            "N_generators": [_m(_unit(2, [((1, 2), 1)]))],
            "coset_reps": {"s": _m(_diag(1, -1))},
            "table": {"s,s": "1"}}


def wreath(p=5, precision=DEFAULT_PRECISION):
    """Z_p wr C_2: two commuting lines E12, E13 swapped by a permutation matrix."""
    swap = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    return {"p": p, "m": 3, "precision": precision,
            "N_generators": [_m(_unit(3, [((1, 2), 1)])), _m(_unit(3, [((1, 3), 1)]))],
            "coset_reps": {"s": _m(swap)},
            "table": {"s,s": "1"}}


def heisenberg(p=5, precision=DEFAULT_PRECISION):
    return {"p": p, "m": 3, "precision": precision,
            "N_generators": [_m(_unit(3, [((1, 2), 1)])), _m(_unit(3, [((2, 3), 1)]))],
            "coset_reps": {}, "table": {}}


def heisenberg_c4(p=5, precision=DEFAULT_PRECISION):
    """Heisenberg extended by s = diag(1, zeta, zeta^2), zeta the 4th root of unity ≡ 2."""
    ctx = PadicContext(p, precision)
    z = teichmuller(2, ctx)
    reps = {}
    for k, name in ((1, "s"), (2, "s2"), (3, "s3")):
        d = [1, z ** k, z ** (2 * k)]
        reps[name] = [[_scalar_json(d[i]) if i == j else "0/1" for j in range(3)]
                      for i in range(3)]
    spec = heisenberg(p, precision)
    spec["coset_reps"] = reps
    spec["table"] = _cyclic_table(["s", "s2", "s3"])
    return spec


def block(p=3, precision=DEFAULT_PRECISION):
    """A line times a central involution diag(1, 1, -1): the finite radical has order 2."""
    return {"p": p, "m": 3, "precision": precision,
            "N_generators": [_m(_unit(3, [((1, 2), 1)]))],
            "coset_reps": {"t": _m(_diag(1, 1, -1))},
            "table": {"t,t": "1"}}


def heisenberg_times_c2(p=5, precision=DEFAULT_PRECISION):
    """Heisenberg in the top 3x3 block times the central involution diag(1,1,1,-1)."""
    return {"p": p, "m": 4, "precision": precision,
            "N_generators": [_m(_unit(4, [((1, 2), 1)])), _m(_unit(4, [((2, 3), 1)]))],
            "coset_reps": {"t": _m(_diag(1, 1, 1, -1))},
            "table": {"t,t": "1"}}


def trivial(p=3, precision=DEFAULT_PRECISION):
    return {"p": p, "m": 2, "precision": precision, "N_generators": [],
            "coset_reps": {}, "table": {}}


EXAMPLES = {
    "dihedral": dihedral,
    "wreath": wreath,
    "heisenberg": heisenberg,
    "heisenberg_c4": heisenberg_c4,
    "block": block,
    "heisenberg_times_c2": heisenberg_times_c2,
    "trivial": trivial,
}


def example(name, **kw):
    return spec_from_dict(EXAMPLES[name](**kw), name)


# -- random corpus -------------------------------------------------------------------------

def _random_unipotent(rng, m, p, density=0.5, low=0):
    entries = []
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if rng.random() < density:
                c = rng.randint(1, 3 * p) * p ** rng.randint(low, low + 1)
                entries.append(((i, j), c if rng.random() < 0.7 else -c))
    return _unit(m, entries)


def random_n_spec(rng, p, m=None):
    """A spec with no finite part: N generated by random unipotent matrices."""
    m = m or rng.randint(2, 4)
    gens = [_m(_random_unipotent(rng, m, p)) for _ in range(rng.randint(1, 3))]
    return {"p": p, "m": m, "precision": DEFAULT_PRECISION, "N_generators": gens,
            "coset_reps": {}, "table": {}}


def random_diagonal_spec(rng, p):
    """Elementary generators normalised by a diagonal matrix of roots of unity."""
    m = rng.randint(2, 4)
    ctx = PadicContext(p)
    order = p - 1 if p > 2 else 2
    divisors = [d for d in range(2, order + 1) if order % d == 0]
    n = rng.choice(divisors)
    g = _primitive_root(p)
    base = pow(g, order // n, p)
    zeta = teichmuller(base, ctx)
    exps = [rng.randrange(n) for _ in range(m)]
    positions = [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
    chosen = rng.sample(positions, rng.randint(1, len(positions)))
    gens = [_m(_unit(m, [(pos, p ** rng.randint(0, 1))])) for pos in chosen]
    names = [f"d{k}" for k in range(1, n)]
    reps = {}
    for k, name in enumerate(names, start=1):
        reps[name] = [[_scalar_json(zeta ** (k * exps[i]) if exps[i] else Fraction(1))
                       if i == j else "0/1" for j in range(m)] for i in range(m)]
    return {"p": p, "m": m, "precision": DEFAULT_PRECISION, "N_generators": gens,
            "coset_reps": reps, "table": _cyclic_table(names)}


def _primitive_root(p):
    return next(a for a in range(1, p) if len({pow(a, k, p) for k in range(p - 1)}) == p - 1)


def random_sign_spec(rng, p):
    """Elementary generators normalised by a random diagonal sign matrix."""
    m = rng.randint(2, 4)
    signs = [rng.choice([1, -1]) for _ in range(m)]
    if all(s == signs[0] for s in signs):
        signs[-1] = -signs[0]
    positions = [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
    chosen = rng.sample(positions, rng.randint(1, len(positions)))
    low = 2 if p == 2 else 0
    gens = [_m(_unit(m, [(pos, p ** rng.randint(low, low + 1))])) for pos in chosen]
    return {"p": p, "m": m, "precision": DEFAULT_PRECISION, "N_generators": gens,
            "coset_reps": {"s": _m(_diag(*signs))}, "table": {"s,s": "1"}}


def random_wreath_spec(rng, p):
    """Scaled wreath: two lines a E12, a E13 swapped by the (2 3) permutation."""
    a = rng.randint(1, 3) * p ** rng.randint(0, 1)
    swap = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    return {"p": p, "m": 3, "precision": DEFAULT_PRECISION,
            "N_generators": [_m(_unit(3, [((1, 2), a)])), _m(_unit(3, [((1, 3), a)]))],
            "coset_reps": {"s": _m(swap)}, "table": {"s,s": "1"}}


def random_corpus(count, seed=0, primes=(2, 3, 5)):
    """``count`` validated specs drawn from the families above, deterministic in ``seed``."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError("random corpus generator keeps producing invalid specs")
        p = rng.choice(primes)
        kind = rng.choice(["n", "sign", "wreath", "diag", "dihedral", "block"])
        if kind == "n":
            d = random_n_spec(rng, p)
        elif kind == "sign":
            d = random_sign_spec(rng, p)
        elif kind == "wreath":
            d = random_wreath_spec(rng, p)
        elif kind == "diag" and p >= 5:
            d = random_diagonal_spec(rng, p)
        elif kind == "dihedral":
            d = dihedral() if p == 2 else random_sign_spec(rng, p)
            if p == 2:
                a = 2 ** rng.randint(0, 3) * rng.choice([1, 3, 5])
                d["N_generators"] = [_m(_unit(2, [((1, 2), a)]))]
        elif kind == "block":
            d = block(p)
        else:
            d = random_n_spec(rng, p)
        spec = spec_from_dict(d, f"corpus-{len(out)}-{kind}-p{p}")
        if validate(spec).ok:
            out.append(spec)
    return out
