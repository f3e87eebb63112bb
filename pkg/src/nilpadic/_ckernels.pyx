# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled finite-quotient kernels; same API and results as _pykernels."""
from collections import deque

from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc

from .errors import OracleCapExceeded


cdef inline void _mul(const int64_t* a, const int64_t* b, int64_t* out,
                      int m, int64_t q) nogil:
    cdef int i, j, k
    cdef int64_t acc
    for i in range(m):
        for j in range(m):
            acc = 0
            for k in range(m):
                acc = (acc + a[i * m + k] * b[k * m + j]) % q
            out[i * m + j] = acc


cdef int64_t* _load(tuple t, int n) except NULL:
    cdef int64_t* buf = <int64_t*> malloc(n * sizeof(int64_t))
    if buf == NULL:
        raise MemoryError()
    cdef int i
    for i in range(n):
        buf[i] = t[i]
    return buf


cdef tuple _dump(const int64_t* buf, int n):
    return tuple([buf[i] for i in range(n)])


def _check_modulus(q):
    if q >= 2 ** 31:
        raise OverflowError("compiled kernels need a modulus below 2**31")


def mat_mul_mod(tuple a, tuple b, int m, q):
    _check_modulus(q)
    cdef int n = m * m
    cdef int64_t* x = _load(a, n)
    cdef int64_t* y = _load(b, n)
    cdef int64_t* z = <int64_t*> malloc(n * sizeof(int64_t))
    try:
        _mul(x, y, z, m, q)
        return _dump(z, n)
    finally:
        free(x)
        free(y)
        free(z)


def mat_inv_mod(tuple a, int m, q, int p):
    from ._pykernels import mat_inv_mod as _inv
    return _inv(a, m, q, p)


def identity(int m):
    return tuple([1 if i == j else 0 for i in range(m) for j in range(m)])


def closure(list gens, int m, q, cap):
    _check_modulus(q)
    cdef int n = m * m
    cdef int ng = len(gens)
    cdef int64_t* gbuf = <int64_t*> malloc(max(ng, 1) * n * sizeof(int64_t))
    cdef int64_t* xbuf = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* ybuf = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int g, i
    cdef int64_t qq = q
    cdef tuple x, y
    try:
        for g in range(ng):
            for i in range(n):
                gbuf[g * n + i] = gens[g][i]
        e = identity(m)
        seen = {e: 0}
        order = [e]
        queue = deque([e])
        while queue:
            x = queue.popleft()
            for i in range(n):
                xbuf[i] = x[i]
            for g in range(ng):
                _mul(xbuf, gbuf + g * n, ybuf, m, qq)
                y = _dump(ybuf, n)
                if y not in seen:
                    seen[y] = len(order)
                    order.append(y)
                    if len(order) > cap:
                        raise OracleCapExceeded(f"finite quotient exceeds {cap} elements")
                    queue.append(y)
        return order
    finally:
        free(gbuf)
        free(xbuf)
        free(ybuf)


def conjugates(tuple g, list gens, list gens_inv, int m, q):
    _check_modulus(q)
    cdef int n = m * m
    cdef int ng = len(gens)
    cdef int64_t* hb = <int64_t*> malloc(max(ng, 1) * n * sizeof(int64_t))
    cdef int64_t* hib = <int64_t*> malloc(max(ng, 1) * n * sizeof(int64_t))
    cdef int64_t* xb = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* tb = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* yb = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int k, i
    cdef int64_t qq = q
    try:
        for k in range(ng):
            for i in range(n):
                hb[k * n + i] = gens[k][i]
                hib[k * n + i] = gens_inv[k][i]
        seen = {g}
        queue = deque([g])
        while queue:
            x = queue.popleft()
            for i in range(n):
                xb[i] = x[i]
            for k in range(ng):
                _mul(hib + k * n, xb, tb, m, qq)
                _mul(tb, hb + k * n, yb, m, qq)
                y = _dump(yb, n)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen
    finally:
        free(hb)
        free(hib)
        free(xb)
        free(tb)
        free(yb)


def centralizer_indices(tuple g, list elements, int m, q):
    _check_modulus(q)
    cdef int n = m * m
    cdef int64_t* gb = _load(g, n)
    cdef int64_t* xb = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* ab = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* bb = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t qq = q
    cdef int idx, i
    cdef bint same
    out = []
    try:
        for idx in range(len(elements)):
            x = elements[idx]
            for i in range(n):
                xb[i] = x[i]
            _mul(xb, gb, ab, m, qq)
            _mul(gb, xb, bb, m, qq)
            same = True
            for i in range(n):
                if ab[i] != bb[i]:
                    same = False
                    break
            if same:
                out.append(idx)
        return out
    finally:
        free(gb)
        free(xb)
        free(ab)
        free(bb)
