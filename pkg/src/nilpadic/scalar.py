"""p-adic scalars.

Two representations live side by side:

* exact values are plain :class:`fractions.Fraction` (or ``int``) and are
  interpreted in Q_p;
* truncated values are :class:`PAdic` instances, known modulo an absolute
  power of p.

Mixed arithmetic promotes to :class:`PAdic` with pessimistic precision
tracking.  Everything is immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput, PrecisionExhausted

INFINITY = math.inf
DEFAULT_PRECISION = 40


def is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class PadicContext:
    p: int
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidInput(f"p={self.p} is not prime")
        if self.precision < 2 * self.epsilon:
            raise InvalidInput(
                f"precision {self.precision} below 2*epsilon={2 * self.epsilon}")

    @property
    def epsilon(self):
        """Congruence level of the uniform home: 1 for odd p, 2 for p = 2."""
        return 2 if self.p == 2 else 1

    @property
    def modulus(self):
        return self.p ** self.precision


def _vp_int(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _exact_valuation(x, p):
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


class PAdic:
    """A p-adic number ``p**val * unit`` known modulo ``p**prec``.

    ``unit`` is coprime to p and reduced modulo ``p**(prec - val)``.  A value
    that is zero to the available precision has ``unit == 0`` and
    ``val == prec``; its valuation is then only a lower bound.
    """

    __slots__ = ("p", "unit", "val", "prec")

    def __init__(self, p, unit, val, prec):
        if prec - val <= 0:
            unit, val = 0, prec
        else:
            unit %= p ** (prec - val)
            if unit == 0:
                val = prec
            else:
                while unit % p == 0:
                    unit //= p
                    val += 1
                unit %= p ** (prec - val)
        self.p = p
        self.unit = unit
        self.val = val
        self.prec = prec

    @classmethod
    def from_rational(cls, p, x, prec):
        """Reduce the exact rational ``x`` to absolute precision ``prec``."""
        x = Fraction(x)
        if x == 0:
            return cls(p, 0, prec, prec)
        v = _exact_valuation(x, p)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        if prec - v <= 0:
            return cls(p, 0, prec, prec)
        mod = p ** (prec - v)
        return cls(p, num * pow(den, -1, mod), v, prec)

    @classmethod
    def from_residue(cls, p, n, prec):
        return cls(p, n, 0, prec)

    # -- inspection ---------------------------------------------------------
    @property
    def relprec(self):
        return self.prec - self.val

    def is_zero(self):
        return self.unit == 0

    def valuation(self):
        return INFINITY if self.unit == 0 else self.val

    def residue(self, k):
        """Integer representative modulo ``p**k`` (needs val >= 0, prec >= k)."""
        if k > self.prec:
            raise PrecisionExhausted(f"need {k} digits, have {self.prec}")
        if self.unit == 0:
            return 0
        if self.val < 0:
            raise InvalidInput("value is not p-integral")
        return (self.unit * self.p ** self.val) % self.p ** k

    def approximation(self):
        """An exact rational agreeing with this value to its precision."""
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def with_precision(self, prec):
        prec = min(prec, self.prec)
        return PAdic(self.p, self.unit, self.val, prec)

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, other, absolute=None, relative=None):
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise InvalidInput("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            if absolute is None:
                v = _exact_valuation(other, self.p)
                absolute = relative + (0 if v == INFINITY else v)
            return PAdic.from_rational(self.p, other, absolute)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other, absolute=self.prec)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        v = min(self.val, o.val)
        n = self.unit * self.p ** (self.val - v) + o.unit * self.p ** (o.val - v)
        return PAdic(self.p, n, v, prec)

    __radd__ = __add__

    def __neg__(self):
        return PAdic(self.p, -self.unit, self.val, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return Fraction(0)
        o = self._lift(other, relative=max(self.relprec, 1))
        if o is NotImplemented:
            return o
        if self.unit == 0 or o.unit == 0:
            prec = min(self.prec + o.val, o.prec + self.val)
            return PAdic(self.p, 0, prec, prec)
        rel = min(self.relprec, o.relprec)
        val = self.val + o.val
        return PAdic(self.p, self.unit * o.unit, val, val + rel)

    __rmul__ = __mul__

    def _inverse(self):
        if self.unit == 0:
            raise PrecisionExhausted("division by a value that is zero to precision")
        rel = self.relprec
        return PAdic(self.p, pow(self.unit, -1, self.p ** rel), -self.val, rel - self.val)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("p-adic division by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, PAdic):
            return NotImplemented
        return self * other._inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self._inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self._inverse()
        n = abs(n)
        result = Fraction(1)
        while n:
            if n & 1:
                result = base * result
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (int, Fraction, PAdic)):
            return NotImplemented
        return is_zero(self - other)

    __hash__ = None

    def __repr__(self):
        if self.unit == 0:
            return f"PAdic(0 + O({self.p}^{self.prec}))"
        return f"PAdic({self.unit}*{self.p}^{self.val} + O({self.p}^{self.prec}))"

    # -- serialization ------------------------------------------------------
    def to_json(self):
        digits = []
        n = self.unit
        for _ in range(self.relprec if self.unit else 0):
            n, d = divmod(n, self.p)
            digits.append(d)
        return {"digits": digits, "shift": self.val if self.unit else self.prec,
                "precision": self.prec}

    @classmethod
    def from_json(cls, p, obj):
        n = sum(d * p ** i for i, d in enumerate(obj["digits"]))
        return cls(p, n, int(obj["shift"]), int(obj["precision"]))


# -- generic helpers over exact and truncated scalars -------------------------

def is_exact(x):
    return isinstance(x, (int, Fraction))


def is_zero(x):
    if isinstance(x, PAdic):
        return x.unit == 0
    return x == 0


def valuation(x, p=None):
    """v_p(x); ``math.inf`` for zero (for truncated zero this is a lower bound)."""
    if isinstance(x, PAdic):
        return x.valuation()
    if p is None:
        raise InvalidInput("exact valuation needs p")
    return _exact_valuation(x, p)


def precision_of(x):
    """Absolute precision of a scalar; exact values have infinite precision."""
    return x.prec if isinstance(x, PAdic) else INFINITY


def cap(x, prec):
    """Truncate a truncated scalar to at most ``prec`` digits; exact values pass."""
    return x.with_precision(prec) if isinstance(x, PAdic) else x


def residue(x, p, k):
    """Integer representative of a p-integral scalar modulo ``p**k``."""
    if isinstance(x, PAdic):
        return x.residue(k)
    x = Fraction(x)
    if _exact_valuation(x, p) < 0:
        raise InvalidInput(f"{x} is not {p}-integral")
    mod = p ** k
    return x.numerator * pow(x.denominator, -1, mod) % mod


def canonical_residue(x, p, v):
    """Canonical representative of ``x + p**v Z_p`` in Z[1/p] ∩ [0, p**v)."""
    if is_zero(x):
        if isinstance(x, PAdic) and x.prec < v:
            raise PrecisionExhausted("cannot reduce a truncated zero below its precision")
        return Fraction(0)
    vx = valuation(x, p)
    if vx >= v:
        return Fraction(0)
    if isinstance(x, PAdic) and x.prec < v:
        raise PrecisionExhausted(f"need {v} digits, have {x.prec}")
    s = max(0, -vx)
    scaled = x * Fraction(p) ** s
    r = residue(scaled, p, v + s)
    return Fraction(r, p ** s)


def parse_scalar(obj, p):
    """Parse an "a/b" string, an int, or a truncated-digit object."""
    if isinstance(obj, bool):
        raise InvalidInput(f"not a scalar: {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"malformed rational {obj!r}") from exc
    if isinstance(obj, dict):
        try:
            return PAdic.from_json(p, obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed truncated scalar {obj!r}") from exc
    raise InvalidInput(f"not a scalar: {obj!r}")


def format_scalar(x):
    if isinstance(x, PAdic):
        return x.to_json()
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# -- torsion units ------------------------------------------------------------

def teichmuller(a, ctx):
    """The root of unity of Z_p congruent to ``a`` (mod 4 when p = 2)."""
    p, k = ctx.p, ctx.precision
    a = int(a)
    if p == 2:
        if a % 4 == 1:
            return Fraction(1)
        if a % 4 == 3:
            return Fraction(-1)
        raise InvalidInput("for p=2 only residues 1 and -1 mod 4 lift to torsion units")
    if a % p == 0:
        raise InvalidInput("zero residue has no Teichmuller lift")
    if a % p == 1:
        return Fraction(1)
    if a % p == p - 1:
        return Fraction(-1)
    mod = p ** k
    x = a % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return PAdic.from_residue(p, x, k)
        x = y


@dataclass(frozen=True)
class TorsionCertificate:
    is_torsion: bool
    representative: object
    precision: float

    def __bool__(self):
        return self.is_torsion


def is_torsion_unit(x, ctx):
    """Decide whether ``x`` is a root of unity in Z_p.

    Exact inputs are decided exactly (the only rational roots of unity are
    ±1).  Truncated inputs are compared with their Teichmüller lift to the
    available precision; a negative answer never flips as precision grows.
    """
    p = ctx.p
    if valuation(x, p) != 0:
        raise InvalidInput("torsion test needs a unit")
    if is_exact(x):
        x = Fraction(x)
        ok = x in (1, -1)
        rep = x if ok else teichmuller(residue(x, p, 2 if p == 2 else 1), ctx)
        return TorsionCertificate(ok, rep, INFINITY)
    k = min(ctx.precision, x.prec)
    if p == 2:
        r = x.residue(k)
        target = 1 if r % 4 == 1 else -1
        ok = (r - target) % 2 ** k == 0
        return TorsionCertificate(ok, Fraction(target), k)
    rep = teichmuller(x.residue(1), PadicContext(p, max(k, 2)))
    diff = x - rep
    ok = is_zero(diff) or valuation(diff) >= k
    return TorsionCertificate(ok, rep, k)
