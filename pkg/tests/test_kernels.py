import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from nilpadic import _pykernels, kernels
from nilpadic.errors import InvalidInput, OracleCapExceeded

try:
    from nilpadic import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def flat(rows):
    return tuple(x for r in rows for x in r)


@st.composite
def unitriangular(draw, m, q):
    return tuple(1 if i == j else (draw(st.integers(0, q - 1)) if j > i else 0)
                 for i in range(m) for j in range(m))


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_python_selected_by_environment():
    env = dict(os.environ, NILPADIC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import nilpadic.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_inverse_and_singular():
    a = flat([[1, 3], [0, 1]])
    inv = _pykernels.mat_inv_mod(a, 2, 25, 5)
    assert _pykernels.mat_mul_mod(a, inv, 2, 25) == _pykernels.identity(2)
    with pytest.raises(InvalidInput):
        _pykernels.mat_inv_mod(flat([[5, 0], [0, 1]]), 2, 25, 5)


def test_closure_cap():
    g = flat([[1, 1], [0, 1]])
    assert len(kernels.closure([g], 2, 49, 100)) == 49
    with pytest.raises(OracleCapExceeded):
        kernels.closure([g], 2, 49, 10)


def test_large_modulus_falls_back():
    g = flat([[1, 1], [0, 1]])
    q = 2 ** 40
    assert kernels.mat_mul_mod(g, g, 2, q) == flat([[1, 2], [0, 1]])


@needs_compiled
@given(st.sampled_from([(2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]), st.integers(2, 3), st.data())
def test_backends_agree(pk, m, data):
    p, k = pk
    q = p ** k
    gens = [data.draw(unitriangular(m, q)) for _ in range(2)]
    a, b = gens
    assert _ckernels.mat_mul_mod(a, b, m, q) == _pykernels.mat_mul_mod(a, b, m, q)
    cap = 20000
    elems = _pykernels.closure(gens, m, q, cap)
    assert _ckernels.closure(gens, m, q, cap) == elems
    inv = [_pykernels.mat_inv_mod(g, m, q, p) for g in gens]
    assert _ckernels.conjugates(a, gens, inv, m, q) == _pykernels.conjugates(a, gens, inv, m, q)
    assert _ckernels.centralizer_indices(b, elems, m, q) == \
        _pykernels.centralizer_indices(b, elems, m, q)


@needs_compiled
def test_compiled_rejects_large_modulus():
    with pytest.raises(OverflowError):
        _ckernels.mat_mul_mod((1,), (1,), 1, 2 ** 31)
