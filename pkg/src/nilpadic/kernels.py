"""Backend selection for the finite-quotient kernels.

The compiled module is used when it imports and NILPADIC_PURE_PYTHON is
unset; otherwise the pure-Python twin is used.  ``BACKEND`` names the choice.
"""
import os

from . import _pykernels

if os.environ.get("NILPADIC_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

# the compiled kernels use 64-bit accumulators
COMPILED_MODULUS_LIMIT = 2 ** 31


def _pick(q):
    return _impl if q < COMPILED_MODULUS_LIMIT else _pykernels


def mat_mul_mod(a, b, m, q):
    return _pick(q).mat_mul_mod(a, b, m, q)


def mat_inv_mod(a, m, q, p):
    return _pykernels.mat_inv_mod(a, m, q, p)


def closure(gens, m, q, cap):
    return _pick(q).closure(list(gens), m, q, cap)


def conjugates(g, gens, gens_inv, m, q):
    return _pick(q).conjugates(g, list(gens), list(gens_inv), m, q)


def centralizer_indices(g, elements, m, q):
    return _pick(q).centralizer_indices(g, list(elements), m, q)


def identity(m):
    return _pykernels.identity(m)
