"""Pure-Python finite-quotient kernels.

Matrices are flat row-major tuples of ints in [0, q).  The compiled module
``_ckernels`` exposes the same functions with the same results.
"""
from collections import deque

from .errors import InvalidInput, OracleCapExceeded


def mat_mul_mod(a, b, m, q):
    out = [0] * (m * m)
    for i in range(m):
        row = i * m
        for k in range(m):
            x = a[row + k]
            if x:
                col = k * m
                for j in range(m):
                    out[row + j] += x * b[col + j]
    return tuple(v % q for v in out)


def mat_inv_mod(a, m, q, p):
    """Inverse modulo q = p**k; raises InvalidInput when a is singular mod p."""
    aug = [list(a[i * m:(i + 1) * m]) + [1 if i == j else 0 for j in range(m)]
           for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] % p), None)
        if piv is None:
            raise InvalidInput("matrix is not invertible modulo p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, q)
        aug[col] = [x * inv % q for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % q for x, y in zip(aug[r], aug[col])]
    return tuple(x for row in aug for x in row[m:])


def identity(m):
    return tuple(1 if i == j else 0 for i in range(m) for j in range(m))


def closure(gens, m, q, cap):
    """All products of ``gens`` (a finite group), identity first, BFS order."""
    e = identity(m)
    seen = {e: 0}
    order = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mat_mul_mod(x, g, m, q)
            if y not in seen:
                seen[y] = len(order)
                order.append(y)
                if len(order) > cap:
                    raise OracleCapExceeded(f"finite quotient exceeds {cap} elements")
                queue.append(y)
    return order


def conjugates(g, gens, gens_inv, m, q):
    """Conjugacy class of g under the group generated by ``gens``."""
    seen = {g}
    queue = deque([g])
    while queue:
        x = queue.popleft()
        for h, hi in zip(gens, gens_inv):
            y = mat_mul_mod(mat_mul_mod(hi, x, m, q), h, m, q)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def centralizer_indices(g, elements, m, q):
    return [i for i, x in enumerate(elements)
            if mat_mul_mod(x, g, m, q) == mat_mul_mod(g, x, m, q)]
