"""Benchmark the numba kernels against the pure-numpy fallback.

Run with ``python benchmarks/bench_kernels.py``. Force the numpy path at
package level with ``FEWSIM_NUMBA=0`` (the selection here enumerates both
backends regardless, so this script always compares the two when numba is
importable).
"""

import argparse
import time

import numpy as np

from fewsim.kernels import get_backends


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--crops", type=int, default=6)
    parser.add_argument("--predictors", type=int, default=15)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    betas = rng.normal(0, 1, (args.crops - 1, args.predictors))
    X = rng.normal(0, 1, (args.rows, args.predictors))
    Y = rng.dirichlet(np.ones(args.crops), size=args.rows)

    backends = get_backends()
    print(f"backends: {', '.join(backends)}  "
          f"({args.rows} rows, {args.crops} crops, {args.predictors} predictors)")

    cases = [
        ("softmax_shares_batch", lambda b: b.softmax_shares_batch(betas, X)),
        ("fmlm_loglik", lambda b: b.fmlm_loglik(betas, X, Y)),
        ("fmlm_loglik_grad", lambda b: b.fmlm_loglik_grad(betas, X, Y)),
    ]

    timings = {}
    for name, call in cases:
        for bname, backend in backends.items():
            call(backend)  # warm up (JIT compile on the numba path)
            timings[(name, bname)] = _time(call, backend, repeats=args.repeats)

    width = max(len(n) for n, _ in cases)
    for name, _ in cases:
        row = [f"{name:<{width}}"]
        for bname in backends:
            row.append(f"{bname} {timings[(name, bname)] * 1e3:9.2f} ms")
        if "numpy" in backends and "numba" in backends:
            speedup = timings[(name, "numpy")] / timings[(name, "numba")]
            row.append(f"speedup x{speedup:.2f}")
        print("  ".join(row))


if __name__ == "__main__":
    main()
