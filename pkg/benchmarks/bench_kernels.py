"""Time the compiled and pure-Python closure kernels on the same quotients.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row enumerates the image of an example group mod p^k with both
backends, checks that they return the same element list, and prints the
best wall time of each plus the speed-up.
"""
import argparse
import time

from nilpadic import _pykernels
from nilpadic.examples import example
from nilpadic.oracle import finite_quotient

try:
    from nilpadic import _ckernels
except ImportError:
    _ckernels = None

CASES = [("wreath", {"p": 5}, 2), ("heisenberg", {"p": 3}, 2),
         ("heisenberg_c4", {"p": 5}, 1), ("heisenberg_times_c2", {"p": 3}, 2),
         ("dihedral", {}, 6)]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
    print(f"{'case':<26}{'k':>3}{'|G_k|':>10}{'python s':>11}{'cython s':>11}{'speed-up':>10}")
    for name, kw, k in CASES:
        spec = example(name, **kw)
        fq = finite_quotient(spec, k)
        gens = [fq.generators[x] for x in sorted(fq.generators)]
        m, q = fq.m, fq.q
        t_py, ref = best_of(lambda: _pykernels.closure(gens, m, q, 10 ** 7), args.repeat)
        if _ckernels is None:
            print(f"{name:<26}{k:>3}{len(ref):>10}{t_py:>11.4f}{'-':>11}{'-':>10}")
            continue
        t_c, got = best_of(lambda: _ckernels.closure(gens, m, q, 10 ** 7), args.repeat)
        if got != ref:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26}{k:>3}{len(ref):>10}{t_py:>11.4f}{t_c:>11.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
