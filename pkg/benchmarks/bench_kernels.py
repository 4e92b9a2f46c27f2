"""Compare the compiled and pure-Python restriction kernels.

    python3 benchmarks/bench_kernels.py [--n 200] [--repeat 5]

Each case is a clean run (no violation), so every kernel scans all of its
pair or triple instances. Verdicts from both backends are compared first.
"""

import argparse
import random
import time

from limitlab import kernels

CODES = ("CONV", "CAUT", "WMON", "MON", "SMON", "DEC", "NU", "SNU", "SDEC", "WB")


def clean_case(n, rng):
    """A run with one stable conjecture: every restriction holds on it."""
    total = (1 << 12) - 1
    cnt, mask = [], 0
    for _ in range(n):
        mask |= 1 << rng.randrange(12)
        cnt.append(mask)
    return [total] * n, [0] * n, cnt, total


def noisy_case(n, rng):
    sem = [rng.getrandbits(12) for _ in range(n)]
    hid = [s % 7 for s in sem]
    cnt, mask = [], 0
    for _ in range(n):
        mask |= 1 << rng.randrange(12)
        cnt.append(mask)
    return sem, hid, cnt, (1 << 12) - 1


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200, help="effective positions per case")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels._ckernels is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1

    rng = random.Random(0)
    for i in range(200):
        case = noisy_case(rng.randrange(1, 30), rng)
        for name in CODES:
            code = getattr(kernels, name)
            a = kernels.first_violation(code, *case, backend="python")
            b = kernels.first_violation(code, *case, backend="cython")
            assert a == b, (name, i, a, b)
    print("backends agree on 2000 random instances")

    case = clean_case(args.n, rng)
    print(f"\nclean run, n={args.n}, best of {args.repeat}")
    print(f"{'pred':6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name in CODES:
        code = getattr(kernels, name)
        py = timed(lambda: kernels.first_violation(code, *case, backend="python"), args.repeat)
        cy = timed(lambda: kernels.first_violation(code, *case, backend="cython"), args.repeat)
        print(f"{name:6} {py:10.4f} {cy:10.5f} {py / cy:8.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
