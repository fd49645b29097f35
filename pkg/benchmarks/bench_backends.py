"""Compare the numba and numpy kernel backends.

Times the raw kernels on synthetic data and one end-to-end workload (the
statmlift suite on the Gaussian model), checks that both backends agree, and
prints a table.  Run with ``python3 benchmarks/bench_backends.py``.
"""
import argparse
import time

import numpy as np

from statlift import _kernels
from statlift.jet import Algebra
from statlift.verify import run_suite


def best_of(fn, repeat):
    fn()  # warm-up (and numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(rng, batch):
    alg = Algebra.get([(4, 3), (1, 2)])
    a = rng.standard_normal((batch, alg.size))
    b = rng.standard_normal((batch, alg.size))
    s = rng.standard_normal((batch, 12))
    s[:, 0] = 1.0 + np.abs(s[:, 0])
    t = rng.standard_normal((batch, 12))
    t[:, 0] = 1.0 + np.abs(t[:, 0])
    return {
        f"mul_table {alg.blocks} x{batch}": lambda k: k.mul_table(a, b, alg.table),
        f"cauchy order 11 x{batch}": lambda k: k.cauchy(s, t),
        f"series_div order 11 x{batch}": lambda k: k.series_div(s, t),
        f"series_exp order 11 x{batch}": lambda k: k.series_exp(s),
        f"series_log order 11 x{batch}": lambda k: k.series_log(s),
        f"series_pow order 11 x{batch}": lambda k: k.series_pow(s, 0.5),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    rows = []
    for name, case in kernel_cases(rng, args.batch).items():
        ref = case(_kernels.numpy_kernels)
        got = case(_kernels.numba_kernels)
        err = float(np.max(np.abs(ref - got)))
        t_np = best_of(lambda: case(_kernels.numpy_kernels), args.repeat)
        t_nb = best_of(lambda: case(_kernels.numba_kernels), args.repeat)
        rows.append((name, t_np, t_nb, err))

    cards = {}
    for backend in ("numpy", "numba"):
        _kernels.set_backend(backend)
        cards[backend] = run_suite("statmlift", "gaussian", (1, 2), seed=0)
        t = best_of(lambda: run_suite("statmlift", "gaussian", (1, 2), seed=0), max(1, args.repeat // 2))
        cards[backend + "_time"] = t
    _kernels.set_backend(None)
    err = max(abs(a.max_defect - b.max_defect) for a, b in zip(cards["numpy"], cards["numba"]))
    rows.append(("statmlift gaussian r=1,2", cards["numpy_time"], cards["numba_time"], err))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'speedup':>8}  {'max |diff|':>10}")
    for name, t_np, t_nb, err in rows:
        print(f"{name:<{width}}  {1e3 * t_np:11.3f}  {1e3 * t_nb:11.3f}  {t_np / t_nb:8.2f}  {err:10.2e}")


if __name__ == "__main__":
    main()
