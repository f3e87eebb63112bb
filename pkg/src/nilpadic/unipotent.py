"""Unipotent upper-triangular matrices: group law, exact log/exp, Z_p-powers,
the congruence valuation omega and diagonal rescaling into Gamma_epsilon."""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from . import linalg
from .errors import InvalidInput, PrecisionExhausted
from .scalar import INFINITY, PAdic, cap, is_exact, is_zero, valuation

ONE = Fraction(1)
ZERO = Fraction(0)


def is_unipotent(U):
    m = len(U)
    for i in range(m):
        for j in range(m):
            x = U[i][j]
            if i == j and not is_zero(x - 1):
                return False
            if i > j and not is_zero(x):
                return False
    return True


def is_nil_upper(X):
    m = len(X)
    return all(is_zero(X[i][j]) for i in range(m) for j in range(i + 1))


def _check_unipotent(U, what="matrix"):
    if not is_unipotent(U):
        raise InvalidInput(f"{what} is not unipotent upper-triangular", witness=U)


def mul(U, V):
    return linalg.mat_mul(U, V)


def inv(U):
    """Inverse via the terminating Neumann series sum (-X)^k."""
    m = len(U)
    X = linalg.mat_sub(U, linalg.identity(m))
    term = linalg.identity(m)
    acc = linalg.identity(m)
    neg = linalg.mat_scale(-ONE, X)
    for _ in range(1, m):
        term = linalg.mat_mul(term, neg)
        acc = linalg.mat_add(acc, term)
    return acc


def commutator(U, V):
    """U^-1 V^-1 U V."""
    return mul(mul(inv(U), inv(V)), mul(U, V))


def conj(U, g, g_inv=None):
    """g^-1 U g for any invertible g; the result must be unipotent."""
    if g_inv is None:
        g_inv = linalg.mat_inv(g, _prime_of(g, U))
    out = linalg.mat_mul(linalg.mat_mul(g_inv, U), g)
    _check_unipotent(out, "conjugate")
    return out


def _prime_of(*mats):
    for A in mats:
        for row in A:
            for x in row:
                if isinstance(x, PAdic):
                    return x.p
    return 2


def log(U):
    """sum_{k<m} (-1)^(k+1) (U-1)^k / k, exact."""
    m = len(U)
    X = linalg.mat_sub(U, linalg.identity(m))
    out = linalg.zeros(m)
    power = X
    for k in range(1, m):
        coeff = Fraction((-1) ** (k + 1), k)
        out = linalg.mat_add(out, linalg.mat_scale(coeff, power))
        power = linalg.mat_mul(power, X)
    return out


def exp(X):
    m = len(X)
    out = linalg.identity(m)
    power = linalg.identity(m)
    fact = 1
    for k in range(1, m):
        power = linalg.mat_mul(power, X)
        fact *= k
        out = linalg.mat_add(out, linalg.mat_scale(Fraction(1, fact), power))
    return out


def nil_bracket(X, Y):
    return linalg.mat_sub(linalg.mat_mul(X, Y), linalg.mat_mul(Y, X))


def pow_zp(U, e, ctx):
    """exp(e log U) for e in Z_p.

    Integer exponents are computed exactly.  Other exponents need log U in the
    epsilon-congruence range so that the result stays p-integral.
    """
    if isinstance(e, int) or (is_exact(e) and Fraction(e).denominator == 1):
        return linalg.mat_pow(U, int(e)) if int(e) >= 0 else linalg.mat_pow(inv(U), -int(e))
    p = ctx.p
    if not is_zero(e) and valuation(e, p) < 0:
        raise InvalidInput("exponent is not a p-adic integer")
    X = log(U)
    low = min((valuation(x, p) for row in X for x in row if not is_zero(x)), default=INFINITY)
    if low < ctx.epsilon:
        raise InvalidInput("non-integral exponent outside the epsilon-congruence range",
                           witness=U)
    if isinstance(e, PAdic) and e.prec < ctx.epsilon:
        raise PrecisionExhausted("exponent known to too few digits")
    Y = linalg.mat_scale(e, X)
    out = exp(Y)
    return tuple(tuple(cap(x, ctx.precision) for x in row) for row in out)


def omega(U, ctx):
    """min v_p((U - 1)_ij) on the epsilon-congruence subgroup; inf at the identity."""
    _check_unipotent(U)
    p = ctx.p
    vals = [valuation(U[i][j], p) for i in range(len(U)) for j in range(i + 1, len(U))
            if not is_zero(U[i][j])]
    if not vals:
        return INFINITY
    w = min(vals)
    if w < ctx.epsilon:
        raise InvalidInput("element lies outside the epsilon-congruence subgroup", witness=U)
    return w


def in_congruence_subgroup(U, ctx):
    try:
        omega(U, ctx)
    except InvalidInput:
        return False
    return True


class Rescaled(NamedTuple):
    generators: tuple
    t: int
    applied: bool


def rescaling_matrix(m, p, power):
    """diag(p, p^2, ..., p^m) ** power."""
    return tuple(tuple(Fraction(p) ** ((i + 1) * power) if i == j else ZERO for j in range(m))
                 for i in range(m))


def rescale_to_uniform(generators, ctx):
    """Conjugate into Gamma_epsilon by diag(p, ..., p^m)^(t+epsilon), t minimal.

    Under D = diag(p^(i s)) with s = t + epsilon, entry (i, j) of D^-1 U D
    picks up p^((j - i) s), so its valuation moves to (j - i) s + v.
    Generators already in Gamma_epsilon are returned untouched with t = 0.
    """
    gens = tuple(generators)
    for U in gens:
        _check_unipotent(U)
    if all(in_congruence_subgroup(U, ctx) for U in gens):
        return Rescaled(gens, 0, False)
    p, eps = ctx.p, ctx.epsilon
    t = 0
    for U in gens:
        m = len(U)
        for i in range(m):
            for j in range(i + 1, m):
                if is_zero(U[i][j]):
                    continue
                v = valuation(U[i][j], p)
                # smallest t with (j - i)(t + eps) + v >= eps
                t = max(t, -((v - eps) // (j - i)) - eps)
    m = len(gens[0]) if gens else 0
    D = rescaling_matrix(m, p, t + eps)
    Dinv = rescaling_matrix(m, p, -(t + eps))
    out = tuple(linalg.mat_mul(linalg.mat_mul(Dinv, U), D) for U in gens)
    return Rescaled(out, t, True)
