"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 50000] [--d 6] [--repeat 5]

Times one loss/gradient evaluation, a full gradient-descent fit's worth of
evaluations, and the cumulative arm counts behind every uplift curve.
"""
import argparse
import statistics
import time

import numpy as np

from prescriptive.kernels import available_backends


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=50_000)
    parser.add_argument("--d", type=int, default=6)
    parser.add_argument("--iterations", type=int, default=200, help="gradient steps in the fit benchmark")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.standard_normal((args.n, args.d))
    y = (rng.random(args.n) < 0.4).astype(np.float64)
    sw = np.ones(args.n)
    w0 = rng.standard_normal(args.d) * 0.1
    t = rng.integers(0, 2, args.n).astype(np.int64)
    yi = y.astype(np.int64)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the numpy fallback is available")

    def gd(impl):
        w, b = w0.copy(), 0.0
        for _ in range(args.iterations):
            _, g = impl.logistic_loss_grad(X, y, sw, w, b, 1e-3)
            w -= 0.1 * g[:-1]
            b -= 0.1 * g[-1]
        return w

    results = {}
    for name, impl in backends.items():
        results[name] = {
            "loss_grad": best_of(lambda: impl.logistic_loss_grad(X, y, sw, w0, 0.0, 1e-3), args.repeat * 10),
            f"fit ({args.iterations} steps)": best_of(lambda: gd(impl), args.repeat),
            "arm_cumsums": best_of(lambda: impl.arm_cumsums(t, yi), args.repeat * 10),
        }

    if len(backends) == 2:
        a = backends["cython"].logistic_loss_grad(X, y, sw, w0, 0.0, 1e-3)
        b = backends["python"].logistic_loss_grad(X, y, sw, w0, 0.0, 1e-3)
        assert abs(a[0] - b[0]) < 1e-12 and np.allclose(a[1], b[1], rtol=1e-10, atol=1e-13)
        assert all(np.array_equal(u, v) for u, v in zip(backends["cython"].arm_cumsums(t, yi), backends["python"].arm_cumsums(t, yi)))

    print(f"n={args.n} d={args.d}, best / median seconds")
    names = list(results)
    header = f"{'kernel':<22}" + "".join(f"{n:>22}" for n in names) + ("  speedup" if len(names) == 2 else "")
    print(header)
    for kernel in results[names[0]]:
        row = f"{kernel:<22}"
        for n in names:
            best, med = results[n][kernel]
            row += f"{best:>11.5f} / {med:<8.5f}"
        if len(names) == 2:
            row += f"  {results['python'][kernel][0] / results['cython'][kernel][0]:6.2f}x"
        print(row)


if __name__ == "__main__":
    main()
