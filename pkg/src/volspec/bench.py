"""Wall-clock comparison of the recursion backends.

Two algorithm classes compute the same resolvent: the naive stepwise
recursion (quadratic in N) and the divide-and-conquer FFT path
(N log^2 N).  The headline ratio compares them on the numpy backend;
the numba row, when available, shows what JIT buys the naive loop.
"""

import argparse
import time

import numpy as np

from ._backend import HAVE_NUMBA
from ._kernels import warmup
from .model import GeometricKernel, VolterraSystem
from .solver import resolvent

__all__ = ["sample_system", "run_bench", "format_table", "main"]


def sample_system(d, seed=7):
    """A strict contraction with a geometric kernel, so norms stay tame."""
    rng = np.random.default_rng(seed)
    A = 0.3 * rng.standard_normal((d, d)) / np.sqrt(d)
    C = 0.2 * rng.standard_normal((d, d)) / np.sqrt(d)
    kernel = GeometricKernel(np.array([C], dtype=np.complex128), np.array([0.5]))
    return VolterraSystem(np.asarray(A, dtype=np.complex128), kernel)


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(N=4096, d=2, repeats=3, seed=7):
    system = sample_system(d, seed)
    rows = []
    t_numpy = _best_of(lambda: resolvent(system, N, backend="numpy"), repeats)
    rows.append({"name": "naive-numpy", "seconds": t_numpy})
    if HAVE_NUMBA:
        warmup()
        t_numba = _best_of(lambda: resolvent(system, N, backend="numba"), repeats)
        rows.append({"name": "naive-numba", "seconds": t_numba})
    t_fast = _best_of(lambda: resolvent(system, N, fast=True), repeats)
    rows.append({"name": "fast-fft", "seconds": t_fast})
    return {
        "N": int(N),
        "dim": int(d),
        "repeats": int(repeats),
        "rows": rows,
        "ratio_naive_over_fast": t_numpy / t_fast,
    }


def format_table(result):
    lines = [
        f"resolvent benchmark: N={result['N']} d={result['dim']} "
        f"(best of {result['repeats']})"
    ]
    for row in result["rows"]:
        lines.append(f"  {row['name']:<12} {row['seconds'] * 1e3:9.2f} ms")
    lines.append(f"  naive/fast ratio: {result['ratio_naive_over_fast']:.2f}")
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(description="time the resolvent backends")
    parser.add_argument("--n-steps", type=int, default=4096)
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    result = run_bench(N=args.n_steps, d=args.dim, repeats=args.repeats, seed=args.seed)
    print(format_table(result))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
