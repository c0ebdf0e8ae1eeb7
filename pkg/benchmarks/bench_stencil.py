"""Compare the compiled and numpy central-difference kernels.

    python benchmarks/bench_stencil.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from bitension import stencil


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    cases = [((4096,), 3), ((129, 129), 3), ((65, 65), 12), ((33, 33, 33), 3)]
    print(f"backends available: {stencil.AVAILABLE}")
    print(f"{'shape':>16} {'C':>3} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8} {'max diff':>9}")
    for counts, comps in cases:
        f = rng.normal(size=counts + (comps,))
        h = tuple(0.01 for _ in counts)
        res, times = {}, {}
        for name in stencil.AVAILABLE:
            stencil.set_backend(name)
            res[name] = stencil.derivatives(f, h)
            times[name] = timed(lambda: stencil.derivatives(f, h), args.repeat)
        if "compiled" in times:
            diff = max(float(np.max(np.abs(a - b)))
                       for a, b in zip(res["compiled"], res["numpy"]))
            print(f"{str(counts):>16} {comps:>3} {1e3 * times['numpy']:>10.2f} "
                  f"{1e3 * times['compiled']:>12.2f} {times['numpy'] / times['compiled']:>8.2f} "
                  f"{diff:>9.1e}")
        else:
            print(f"{str(counts):>16} {comps:>3} {1e3 * times['numpy']:>10.2f} {'n/a':>12}")


if __name__ == "__main__":
    main()
