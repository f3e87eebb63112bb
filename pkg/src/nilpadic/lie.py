"""Lie lattices of strictly upper-triangular matrices and their series.

A nil matrix is stored by its strictly-upper entries in row-major order, so
an m x m Lie lattice is a :class:`~nilpadic.lattice.Lattice` in dimension
m(m-1)/2.  Conjugation actions of outside matrices enter through
``Ad(g): X -> g^-1 X g``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import lattice as lat
from . import linalg
from .errors import InvalidInput
from .lattice import Lattice, hnf
from .scalar import is_zero
from .unipotent import nil_bracket

ZERO = Fraction(0)


# -- coordinates ------------------------------------------------------------------

def nil_dim(m):
    return m * (m - 1) // 2


def size_from_dim(d):
    m = (1 + math.isqrt(1 + 8 * d)) // 2
    if nil_dim(m) != d:
        raise InvalidInput(f"{d} is not a triangular number")
    return m


def positions(m):
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def to_vec(X):
    m = len(X)
    return tuple(X[i][j] for i, j in positions(m))


def from_vec(v, m):
    rows = [[ZERO] * m for _ in range(m)]
    for (i, j), x in zip(positions(m), v):
        rows[i][j] = x
    return tuple(tuple(r) for r in rows)


def elementary(m, i, j):
    """E_ij with 1-based indices, as a nil coordinate vector."""
    return to_vec(tuple(tuple(Fraction(1) if (a, b) == (i - 1, j - 1) else ZERO
                              for b in range(m)) for a in range(m)))


def bracket_vec(u, v, m):
    return to_vec(nil_bracket(from_vec(u, m), from_vec(v, m)))


def ad_conj(g, g_inv, v, m):
    """Nil coordinates of g^-1 X g; the conjugate must stay strictly upper."""
    Y = linalg.mat_mul(linalg.mat_mul(g_inv, from_vec(v, m)), g)
    if any(not is_zero(Y[i][j]) for i in range(m) for j in range(i + 1)):
        raise InvalidInput("conjugate leaves the strictly upper-triangular matrices",
                           witness=Y)
    return to_vec(Y)


class Action:
    """Conjugation by an invertible matrix, with its inverse cached."""

    __slots__ = ("g", "g_inv", "name")

    def __init__(self, g, p, name=None, g_inv=None):
        self.g = g
        self.g_inv = g_inv if g_inv is not None else linalg.mat_inv(g, p)
        self.name = name

    def __call__(self, v, m):
        return ad_conj(self.g, self.g_inv, v, m)


def _as_actions(actions, p):
    return [a if isinstance(a, Action) else Action(a, p) for a in actions]


# -- Lie lattices ---------------------------------------------------------------------

@dataclass(frozen=True)
class LieLattice:
    """A lattice of nil matrices plus its bracket-closure certificate.

    ``defect`` is None when [x, y] lies in the lattice for all basis pairs,
    otherwise it is the lattice spanned by the lattice and those brackets.
    """

    m: int
    lattice: Lattice
    defect: Lattice = None

    @property
    def closed(self):
        return self.defect is None

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def p(self):
        return self.lattice.p

    def matrices(self):
        return [from_vec(b, self.m) for b in self.lattice.basis]


def lie_lattice(m, vectors_or_lattice, p=None):
    L = vectors_or_lattice
    if not isinstance(L, Lattice):
        L = hnf(L, p, nil_dim(m))
    br = _bracket_vectors(L, L, m)
    missing = [v for v in br if not lat.member(v, L)]
    defect = hnf(list(L.basis) + missing, L.p, L.dim) if missing else None
    return LieLattice(m, L, defect)


def lie_closure(vectors, p, m):
    """Smallest bracket-closed lattice containing ``vectors``."""
    L = hnf(vectors, p, nil_dim(m))
    for _ in range(m * max(nil_dim(m), 1) + 1):
        nxt = lat.lattice_sum(L, bracket_lattice(L, L))
        if nxt == L:
            return L
        L = nxt
    raise InvalidInput("bracket closure did not stabilise")


def _m(L):
    return size_from_dim(L.dim)


def _bracket_vectors(L1, L2, m):
    out = []
    for a in L1.basis:
        for b in L2.basis:
            v = bracket_vec(a, b, m)
            if not linalg.vec_is_zero(v):
                out.append(v)
    return out


def bracket_lattice(L1, L2):
    """Z_p-span of [x, y] over basis pairs (bilinearity makes this the full span)."""
    if L1.dim != L2.dim:
        raise InvalidInput("dimension mismatch")
    return hnf(_bracket_vectors(L1, L2, _m(L1)), L1.p, L1.dim)


def _action_vectors(M, actions, m):
    out = []
    for act in actions:
        for b in M.basis:
            v = tuple(x - y for x, y in zip(act(b, m), b))
            if not linalg.vec_is_zero(v):
                out.append(v)
    return out


# -- series -----------------------------------------------------------------------------

@dataclass
class SeriesReport:
    kind: str
    terms: list
    divisors: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    terminated: bool = True

    @property
    def length(self):
        return len(self.terms)

    @property
    def layer_ranks(self):
        # ascending chains (upper central) list their layers bottom-up
        return [abs(a.rank - b.rank) for a, b in zip(self.terms, self.terms[1:])]

    def to_json(self):
        return {"kind": self.kind,
                "terms": [t.to_json() for t in self.terms],
                "divisors": [list(d.exponents) for d in self.divisors],
                "layer_ranks": self.layer_ranks,
                "terminated": self.terminated,
                "checks": dict(sorted(self.checks.items()))}


def _saturation_divisors(terms, ambient):
    out = []
    for t in terms:
        out.append(lat.quotient_divisors(t, lat.saturate(t, ambient)))
    return out


def _descend(L, step, cap):
    terms = [L]
    while terms[-1].rank:
        nxt = step(terms[-1])
        if nxt == terms[-1]:
            return terms, False
        terms.append(nxt)
        if len(terms) > cap:
            return terms, False
    return terms, True


def lower_central_series(L):
    """gamma_1 = L, gamma_{i+1} = [gamma_i, L], ending at 0."""
    m = _m(L)
    terms, ok = _descend(L, lambda T: bracket_lattice(T, L), m + 1)
    return SeriesReport("central", terms, _saturation_divisors(terms, L),
                        {"reaches_zero": ok}, ok)


def derived_series(L):
    m = _m(L)
    terms, ok = _descend(L, lambda T: bracket_lattice(T, T), m + 1)
    return SeriesReport("derived", terms, _saturation_divisors(terms, L),
                        {"reaches_zero": ok}, ok)


def isolated_series(L, kind="central", actions=()):
    """Term-wise saturated lower central (or derived) series inside L.

    ``actions`` are extra matrices acting by conjugation; their (Ad - 1)
    images are added at each step, which yields the isolated lower central
    series of an extension of exp(L) by those elements.  If the chain gets
    stuck above 0 the report has ``terminated = False``.
    """
    if kind not in ("central", "derived"):
        raise InvalidInput(f"unknown series kind {kind!r}")
    m = _m(L)
    acts = _as_actions(actions, L.p)

    def step(T):
        if kind == "central":
            gens = list(bracket_lattice(T, L).basis)
            gens += _action_vectors(T, acts, m)
        else:
            gens = list(bracket_lattice(T, T).basis)
        return lat.saturate(hnf(gens, L.p, L.dim), L)

    terms, ok = _descend(L, step, L.rank + 2)
    layer_div = []
    for a, b in zip(terms, terms[1:]):
        layer_div.append(lat.quotient_divisors(b, lat.saturate(b, a)))
    report = SeriesReport("isolated-" + kind, terms, layer_div, {}, ok)
    report.checks["torsion_free_layers"] = all(d.is_trivial() for d in layer_div)
    if kind == "central":
        report.checks["strongly_central"] = strongly_central(terms)
    return report


def strongly_central(terms):
    """[G_i, G_j] ⊆ G_{i+j} for all i, j (terms indexed from 1; beyond the end is 0)."""
    n = len(terms)
    for i in range(n):
        for j in range(i, n):
            br = bracket_lattice(terms[i], terms[j])
            k = i + j + 1
            target = terms[k] if k < n else lat.zero_lattice(terms[0].p, terms[0].dim)
            if not lat.contains(target, br):
                return False
    return True


# -- centralizers, normalizers, upper central series ---------------------------

def kernel_sublattice(L, images):
    """{sum c_k b_k : c integral, sum c_k images[k] = 0} for the basis b of L.

    The result is saturated in L.
    """
    if not L.basis:
        return L
    if not images or not images[0]:
        return L
    rel = linalg.left_nullspace(images, L.p)
    if not rel:
        return lat.zero_lattice(L.p, L.dim)
    rel = lat.saturate_rows(rel, L.p)
    vecs = [lat.combine(r, L.basis) for r in rel]
    return hnf(vecs, L.p, L.dim)


def _modulo(S, v):
    """Coordinates of v modulo the Q_p-span of S (via an annihilator basis)."""
    if not S.basis:
        return tuple(v)
    W = linalg.nullspace(S.basis, S.p)
    return tuple(sum((w_k * x for w_k, x in zip(w, v)), ZERO) for w in W)


def center(L):
    return centralizer(L, [from_vec(b, _m(L)) for b in L.basis])


def centralizer(L, S):
    """Elements of L commuting with every matrix in S.

    Nil matrices impose [x, s] = 0; other matrices impose x s = s x, which is
    the linearisation of exp(x)^s = exp(x).
    """
    m = _m(L)
    images = []
    for b in L.basis:
        X = from_vec(b, m)
        row = []
        for s in S:
            C = linalg.mat_sub(linalg.mat_mul(X, s), linalg.mat_mul(s, X))
            row.extend(x for r in C for x in r)
        images.append(tuple(row))
    return kernel_sublattice(L, images)


def normalizer(L, K):
    """{x in L : [x, K] ⊆ Q_p K}; equals the normalizer of K when K is saturated in L."""
    m = _m(L)
    images = []
    for b in L.basis:
        row = []
        for k in K.basis:
            row.extend(_modulo(K, bracket_vec(b, k, m)))
        images.append(tuple(row))
    if not K.basis:
        return L
    return kernel_sublattice(L, images)


def upper_central_series(L, actions=()):
    """Ascending chain Z_0 = 0 ⊆ Z_1 ⊆ ... of saturated lattices.

    Z_{i+1} consists of the x in L with [x, L] and (Ad(g) - 1) x inside
    Q_p Z_i for all actions g.  ``terminated`` says whether the chain reached L.
    """
    m = _m(L)
    acts = _as_actions(actions, L.p)
    Z = lat.zero_lattice(L.p, L.dim)
    terms = [Z]
    while True:
        images = []
        for b in L.basis:
            row = []
            for c in L.basis:
                row.extend(_modulo(Z, bracket_vec(b, c, m)))
            for act in acts:
                row.extend(_modulo(Z, tuple(x - y for x, y in zip(act(b, m), b))))
            images.append(tuple(row))
        nxt = kernel_sublattice(L, images)
        if nxt == Z:
            break
        terms.append(nxt)
        Z = nxt
        if Z.rank == L.rank:
            break
    done = terms[-1].rank == L.rank
    return SeriesReport("upper-central", terms, [], {"reaches_top": done}, done)


# -- adjoint action -------------------------------------------------------------------

def adjoint_matrix(g, L, basis=None, g_inv=None):
    """Matrix of X -> g^-1 X g on ``basis`` (default: the HNF basis of L).

    Column j holds the coordinates of the image of basis vector j.
    """
    m = _m(L)
    basis = list(L.basis) if basis is None else list(basis)
    act = Action(g, L.p, g_inv=g_inv)
    cols = []
    for b in basis:
        img = act(b, m)
        c = lat.coordinates_in_basis(basis, img, L.p)
        if c is None:
            raise InvalidInput("conjugation does not stabilise the lattice", witness=b)
        cols.append(c)
    return linalg.transpose(cols) if cols else ()


@dataclass
class FilteredBasis:
    """A basis of L adapted to a descending chain of saturated sublattices."""

    vectors: list
    layers: list  # (start, stop) index ranges, one per layer

    def block(self, M, i):
        a, b = self.layers[i]
        return tuple(tuple(row[a:b]) for row in M[a:b])


def filtered_basis(terms):
    vectors, layers = [], []
    for a, b in zip(terms, terms[1:] + [lat.zero_lattice(terms[0].p, terms[0].dim)]):
        if b.rank == a.rank:
            continue
        comp = lat.complement_basis(b, a)
        start = len(vectors)
        vectors.extend(comp)
        layers.append((start, len(vectors)))
    return FilteredBasis(vectors, layers)


def is_block_lower_triangular(M, layers):
    for bi, (a, b) in enumerate(layers):
        for bj, (c, d) in enumerate(layers):
            if bj <= bi:
                continue
            # rows of layer bi, columns of a later layer bj must vanish
            for r in range(a, b):
                for col in range(c, d):
                    if not is_zero(M[r][col]):
                        return False
    return True
