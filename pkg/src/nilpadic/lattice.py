"""Z_p-lattices in Q_p^d, stored in Hermite normal form over the local ring.

Generators are rational (or truncated p-adic) vectors; the Z_p-span of
rational vectors meets Q^d in their Z_(p)-span, so all normal forms can be
computed with exact rational arithmetic.  Pivots are normalised to exact
powers of p and entries above a pivot ``p**e`` are reduced into
``Z[1/p] ∩ [0, p**e)``, which makes the stored basis canonical.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import InvalidInput
from .scalar import (
    INFINITY, PAdic, canonical_residue, cap, is_torsion_unit, is_zero,
    residue, valuation,
)

ZERO = Fraction(0)


class Lattice:
    """A Z_p-lattice of rank ``len(basis)`` inside Q_p^dim (immutable)."""

    __slots__ = ("p", "dim", "basis", "pivots")

    def __init__(self, p, dim, basis, pivots):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "basis", tuple(tuple(b) for b in basis))
        object.__setattr__(self, "pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("Lattice is immutable")

    @property
    def rank(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.p == other.p and self.dim == other.dim
                and self.pivots == other.pivots
                and all(linalg.vec_is_zero(tuple(a - b for a, b in zip(u, v)))
                        for u, v in zip(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.p, self.dim, self.pivots))

    def __contains__(self, v):
        return member(v, self)

    def __le__(self, other):
        return contains(other, self)

    def __repr__(self):
        rows = ", ".join("(" + ", ".join(_fmt(x) for x in b) + ")" for b in self.basis)
        return f"Lattice(p={self.p}, dim={self.dim}, [{rows}])"

    def to_json(self):
        from .scalar import format_scalar
        return {"ambient_dim": self.dim,
                "basis": [[format_scalar(x) for x in b] for b in self.basis]}


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    return repr(x)


@dataclass(frozen=True)
class ElementaryDivisors:
    """p-valuations of the elementary divisors of a sublattice in a superlattice."""

    p: int
    exponents: tuple

    @property
    def index(self):
        return self.p ** sum(self.exponents)

    def is_trivial(self):
        return not any(self.exponents)


# -- construction ---------------------------------------------------------------

def hnf(vectors, p, dim=None):
    """Canonical HNF basis of the Z_p-span of ``vectors``."""
    vectors = [tuple(Fraction(x) if isinstance(x, int) else x for x in v) for v in vectors]
    if dim is None:
        if not vectors:
            raise InvalidInput("hnf of no vectors needs the ambient dimension")
        dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise InvalidInput("vectors of mixed dimension")
    rows = [list(v) for v in vectors if not linalg.vec_is_zero(v)]
    out, pivots = [], []
    for col in range(dim):
        best, best_v = None, INFINITY
        for i, r in enumerate(rows):
            if not is_zero(r[col]):
                v = valuation(r[col], p)
                if v < best_v:
                    best, best_v = i, v
        if best is None:
            continue
        prow = rows.pop(best)
        pivot = Fraction(p) ** best_v
        unit = prow[col] / pivot
        prow = [x / unit for x in prow]
        prow[col] = pivot
        for k in range(col):
            prow[k] = ZERO
        new_rows = []
        for r in rows:
            if not is_zero(r[col]):
                c = r[col] / pivot
                r = [a - c * b for a, b in zip(r, prow)]
            r[col] = ZERO
            if not linalg.vec_is_zero(r):
                new_rows.append(r)
        rows = new_rows
        out.append(prow)
        pivots.append(col)
    for k, col in enumerate(pivots):
        e = valuation(out[k][col], p)
        for i in range(k):
            a = out[i][col]
            r = canonical_residue(a, p, e)
            if not is_zero(a - r):
                c = (a - r) / out[k][col]
                out[i] = [x - c * y for x, y in zip(out[i], out[k])]
            out[i][col] = r
    out = [[_snap(x) for x in row] for row in out]
    return Lattice(p, dim, out, pivots)


def _snap(x):
    # truncated zeros become exact zeros so normal forms compare structurally
    if isinstance(x, PAdic) and x.is_zero():
        return ZERO
    return x


def zero_lattice(p, dim):
    return Lattice(p, dim, (), ())


def standard_lattice(p, dim):
    return hnf(linalg.identity(dim), p, dim)


# -- membership and coordinates -------------------------------------------------

def coordinates(L, v, integral=True):
    """Coordinates of ``v`` in the HNF basis of L, or None if v is not in L.

    With ``integral=False`` rational coordinates are returned for any v in
    the Q_p-span of L.
    """
    if len(v) != L.dim:
        raise InvalidInput("dimension mismatch")
    v = list(v)
    coeffs = []
    for row, col in zip(L.basis, L.pivots):
        c = v[col] / row[col]
        if integral and not is_zero(c) and valuation(c, L.p) < 0:
            return None
        coeffs.append(c)
        if not is_zero(c):
            v = [a - c * b for a, b in zip(v, row)]
    if not linalg.vec_is_zero(v):
        return None
    return tuple(coeffs)


def member(v, L):
    return coordinates(L, v) is not None


def coordinates_in_basis(basis, v, p, integral=True):
    """Coordinates of ``v`` in an arbitrary independent ``basis``, or None."""
    if not basis:
        return () if linalg.vec_is_zero(v) else None
    x = linalg.solve(linalg.transpose(basis), tuple(v), p)
    if x is None:
        return None
    if integral and any(not is_zero(c) and valuation(c, p) < 0 for c in x):
        return None
    return x


def contains(big, small):
    """small ⊆ big."""
    _check_dims(big, small)
    return all(member(b, big) for b in small.basis)


def _check_dims(L1, L2):
    if L1.dim != L2.dim or L1.p != L2.p:
        raise InvalidInput("lattices live in different ambient spaces")


# -- lattice operations ------------------------------------------------------------

def lattice_sum(L1, L2):
    _check_dims(L1, L2)
    return hnf(L1.basis + L2.basis, L1.p, L1.dim)


def intersect(L1, L2):
    _check_dims(L1, L2)
    p, dim = L1.p, L1.dim
    if not L1.basis or not L2.basis:
        return zero_lattice(p, dim)
    stacked = list(L1.basis) + [tuple(-x for x in b) for b in L2.basis]
    rel = linalg.left_nullspace(stacked, p)
    if not rel:
        return zero_lattice(p, dim)
    rel = saturate_rows(rel, p)
    n1 = len(L1.basis)
    vecs = [combine(r[:n1], L1.basis) for r in rel]
    return hnf(vecs, p, dim)


def combine(coeffs, basis):
    dim = len(basis[0])
    out = [ZERO] * dim
    for c, b in zip(coeffs, basis):
        if not is_zero(c):
            out = [o + c * x for o, x in zip(out, b)]
    return tuple(out)


def saturate(L, ambient=None):
    """Q_p-span of L intersected with ``ambient`` (default Z_p^dim)."""
    p, dim = L.p, L.dim
    if ambient is None:
        if not L.basis:
            return L
        return hnf(saturate_rows(L.basis, p), p, dim)
    _check_dims(L, ambient)
    if not ambient.basis or not L.basis:
        return zero_lattice(p, dim)
    annihilator = linalg.nullspace(L.basis, p)
    B = ambient.basis
    if not annihilator:
        return ambient
    BW = linalg.mat_mul(B, linalg.transpose(annihilator))
    rel = linalg.left_nullspace(BW, p)
    if not rel:
        return zero_lattice(p, dim)
    rel = saturate_rows(rel, p)
    return hnf([combine(r, B) for r in rel], p, dim)


def _primitive(v, p):
    m = min(valuation(x, p) for x in v if not is_zero(x))
    scale = Fraction(p) ** (-m)
    return [x * scale for x in v]


def saturate_rows(rows, p):
    """Q-span of independent ``rows`` intersected with Z_(p)^n."""
    rows = [_primitive(r, p) for r in rows if not linalg.vec_is_zero(r)]
    while True:
        red = [[residue(x, p, 1) for x in r] for r in rows]
        rel = _fp_relation(red, p)
        if rel is None:
            return [tuple(r) for r in rows]
        i = next(k for k, c in enumerate(rel) if c)
        new = combine([Fraction(c) for c in rel], rows)
        rows[i] = [x / p for x in new]


def _fp_relation(rows, p):
    """A nonzero c with sum c_i rows_i == 0 mod p, or None."""
    r = len(rows)
    if r == 0:
        return None
    aug = [list(row) + [1 if i == j else 0 for j in range(r)] for i, row in enumerate(rows)]
    n = len(rows[0])
    lead = 0
    for col in range(n):
        piv = next((i for i in range(lead, r) if aug[i][col] % p), None)
        if piv is None:
            continue
        aug[lead], aug[piv] = aug[piv], aug[lead]
        inv = pow(aug[lead][col], -1, p)
        aug[lead] = [x * inv % p for x in aug[lead]]
        for i in range(r):
            if i != lead and aug[i][col] % p:
                c = aug[i][col]
                aug[i] = [(x - c * y) % p for x, y in zip(aug[i], aug[lead])]
        lead += 1
    if lead == r:
        return None
    return [x % p for x in aug[lead][n:]]


def fp_rank(rows, p):
    """Rank over F_p of an integer matrix."""
    rows = [list(r) for r in rows]
    rank = 0
    n = len(rows[0]) if rows else 0
    for col in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                c = rows[i][col] * inv
                rows[i] = [(x - c * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def quotient_divisors(Lsub, Lsup):
    """Elementary divisors (as p-valuations) of Lsub inside Lsup."""
    _check_dims(Lsub, Lsup)
    if Lsub.rank != Lsup.rank:
        raise InvalidInput(f"rank mismatch: {Lsub.rank} vs {Lsup.rank}")
    coords = []
    for b in Lsub.basis:
        c = coordinates(Lsup, b)
        if c is None:
            raise InvalidInput("not a sublattice", witness=b)
        coords.append(list(c))
    return ElementaryDivisors(Lsup.p, tuple(sorted(_snf_exponents(coords, Lsup.p))))


def _snf_exponents(M, p):
    M = [list(r) for r in M]
    exps = []
    while M and M[0]:
        best, bv = None, INFINITY
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if not is_zero(x):
                    v = valuation(x, p)
                    if v < bv:
                        best, bv = (i, j), v
        if best is None:
            break
        i, j = best
        piv = M[i][j]
        pr = M[i]
        rest = []
        for k, row in enumerate(M):
            if k == i:
                continue
            c = row[j] / piv
            rest.append([a - c * b for a, b in zip(row, pr)])
        M = [[x for jj, x in enumerate(row) if jj != j] for row in rest]
        exps.append(bv)
    return exps


def complement_basis(S, L):
    """Vectors of L's basis that extend a basis of the saturated S to one of L."""
    coords = []
    for b in S.basis:
        c = coordinates(L, b)
        if c is None:
            raise InvalidInput("not a sublattice", witness=b)
        coords.append([residue(x, L.p, 1) for x in c])
    n = L.rank
    if coords and fp_rank(coords, L.p) < len(coords):
        raise InvalidInput("sublattice is not saturated")
    chosen = []
    current = list(coords)
    for j in range(n):
        e = [1 if k == j else 0 for k in range(n)]
        if fp_rank(current + [e], L.p) > len(current):
            current.append(e)
            chosen.append(L.basis[j])
    return chosen


def image(M, L):
    """The lattice M·L (column convention: v ↦ M v)."""
    return hnf([linalg.mat_vec(M, b) for b in L.basis], L.p, L.dim)


# -- scalar action ---------------------------------------------------------------

@dataclass(frozen=True)
class ScalarAction:
    """Outcome of :func:`scalar_action`; truthy when M acts by a torsion scalar."""

    zeta: object
    witness: tuple = None
    reason: str = "scalar"
    precision: float = INFINITY

    def __bool__(self):
        return self.zeta is not None


def close_to_zero(x, ctx):
    if is_zero(x):
        return True
    return isinstance(x, PAdic) and x.val >= ctx.precision - ctx.epsilon


def scalar_action(M, L, ctx):
    """Decide whether M acts on L as multiplication by a root of unity."""
    p = ctx.p
    for b in L.basis:
        if coordinates(L, linalg.mat_vec(M, b)) is None:
            raise InvalidInput("matrix does not stabilize the lattice", witness=b)
    if not L.basis:
        return ScalarAction(Fraction(1))
    eigen = []
    for b in L.basis:
        Mb = linalg.mat_vec(M, b)
        j = min((k for k in range(L.dim) if not is_zero(b[k])), key=lambda k: valuation(b[k], p))
        lam = Mb[j] / b[j]
        if not all(close_to_zero(y - lam * x, ctx) for x, y in zip(b, Mb)):
            return ScalarAction(None, b, "not-eigenvector")
        eigen.append(lam)
    zeta = eigen[0]
    for b, lam in zip(L.basis[1:], eigen[1:]):
        if not close_to_zero(lam - zeta, ctx):
            return ScalarAction(None, tuple(x + y for x, y in zip(L.basis[0], b)),
                                "distinct-eigenvalues")
    if valuation(zeta, p) != 0:
        return ScalarAction(None, L.basis[0], "non-unit-eigenvalue")
    cert = is_torsion_unit(zeta, ctx)
    if not cert:
        return ScalarAction(None, L.basis[0], "not-torsion")
    zeta = cap(zeta, ctx.precision)
    prec = zeta.prec if isinstance(zeta, PAdic) else INFINITY
    return ScalarAction(zeta, None, "scalar", prec)
