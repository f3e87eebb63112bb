"""Dense linear algebra over Q_p for the small matrices used throughout.

Matrices are tuples of row tuples.  Entries may mix exact rationals and
truncated :class:`~nilpadic.scalar.PAdic` values; elimination always pivots
on an entry of minimal valuation so truncated inputs lose as little
precision as possible.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInput, PrecisionExhausted
from .scalar import INFINITY, is_zero, valuation

ZERO = Fraction(0)
ONE = Fraction(1)


def identity(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(r, c=None):
    c = r if c is None else c
    return tuple((ZERO,) * c for _ in range(r))


def as_matrix(rows):
    return tuple(tuple(Fraction(x) if isinstance(x, int) else x for x in row) for row in rows)


def transpose(A):
    return tuple(zip(*A)) if A else ()


def mat_mul(A, B):
    Bt = transpose(B)
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            acc = ZERO
            for a, b in zip(row, col):
                # exact zeros are skipped; truncated zeros still carry precision
                if _exact_zero(a) or _exact_zero(b):
                    continue
                acc = acc + a * b
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def _exact_zero(x):
    return isinstance(x, (int, Fraction)) and x == 0


def mat_vec(A, v):
    return tuple(sum((a * x for a, x in zip(row, v)), ZERO) for row in A)


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A):
    return tuple(tuple(c * a for a in row) for row in A)


def mat_pow(A, n):
    if n < 0:
        A, n = mat_inv(A), -n
    result = identity(len(A))
    while n:
        if n & 1:
            result = mat_mul(result, A)
        A = mat_mul(A, A)
        n >>= 1
    return result


def mat_is_zero(A):
    return all(is_zero(x) for row in A for x in row)


def mat_equal(A, B):
    return len(A) == len(B) and all(
        is_zero(a - b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def vec_is_zero(v):
    return all(is_zero(x) for x in v)


def _pivot_row(rows, col, start, p):
    best, best_v = None, INFINITY
    for i in range(start, len(rows)):
        x = rows[i][col]
        if not is_zero(x):
            v = valuation(x, p)
            if v < best_v:
                best, best_v = i, v
    return best


def rref(rows, p):
    """Reduced row echelon form over Q_p; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        if r == len(rows):
            break
        i = _pivot_row(rows, col, r, p)
        if i is None:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        piv = rows[r][col]
        rows[r] = [x / piv for x in rows[r]]
        rows[r][col] = ONE
        for j in range(len(rows)):
            if j != r and not is_zero(rows[j][col]):
                c = rows[j][col]
                rows[j] = [a - c * b for a, b in zip(rows[j], rows[r])]
                rows[j][col] = ZERO
        pivots.append(col)
        r += 1
    return [tuple(row) for row in rows[:r]], pivots


def rank(rows, p):
    return len(rref(rows, p)[1])


def nullspace(rows, p, ncols=None):
    """Basis of {x : A x = 0} for A given by ``rows``."""
    if not rows:
        if ncols is None:
            raise InvalidInput("nullspace of an empty matrix needs ncols")
        return [tuple(ONE if i == j else ZERO for j in range(ncols)) for i in range(ncols)]
    ncols = len(rows[0])
    R, pivots = rref(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def left_nullspace(rows, p):
    """Basis of {y : y A = 0}."""
    if not rows:
        return []
    return nullspace(transpose(rows), p)


def solve(A, b, p):
    """One solution x of ``A x = b`` or None when the system is inconsistent."""
    n = len(A[0]) if A else 0
    aug = [tuple(row) + (bi,) for row, bi in zip(A, b)]
    if not aug:
        return tuple([ZERO] * n)
    R, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = [ZERO] * n
    for row, pc in zip(R, pivots):
        x[pc] = row[n]
    return tuple(x)


def mat_inv(A, p=None):
    """Inverse of a square matrix (Gauss-Jordan, minimal-valuation pivots)."""
    n = len(A)
    if p is None:
        p = _guess_prime(A)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise PrecisionExhausted("matrix is singular to working precision")
    return tuple(tuple(row[n:]) for row in R)


def _guess_prime(A):
    for row in A:
        for x in row:
            if hasattr(x, "p"):
                return x.p
    # exact matrices: the prime only steers pivot choice, any nonzero pivot works
    return 2
