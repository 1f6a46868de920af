"""Compare the numba and numpy window-scan kernels.

Run with ``python3 benchmarks/bench_kernels.py [--size N] [--repeat R]``.
Each kernel is checked for agreement between backends before timing; the
numba times exclude the first (compiling) call.
"""
import argparse
import time

import numpy as np

from hahn2d import _kernels
from hahn2d.convergence import DEFAULT_WINDOWS, _buckets, window_frontiers, window_sums
from hahn2d.sequence import ExprSequence, FLOAT


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_cases(size, rng):
    block = rng.standard_normal((size + 1, size + 1))
    windows = [w for w in DEFAULT_WINDOWS if w.rows <= size] or [DEFAULT_WINDOWS[0]]
    rb, cb = _buckets(windows)
    nb = len(windows) + 1
    pad = size + 2 - len(rb)
    if pad > 0:  # entries outside the last window fall in the overflow bucket
        rb = np.pad(rb, (0, pad), constant_values=nb - 1)
        cb = np.pad(cb, (0, pad), constant_values=nb - 1)
    lo = np.array([w.rows // 2 for w in windows], dtype=np.int64)
    hi = np.array([w.rows for w in windows], dtype=np.int64)
    nw = len(windows)
    return {
        "delta_bucket_sums": lambda k: k(block, 0, rb, cb, nb, True),
        "power_bucket_sums": lambda k: k(block[:-1, :-1], 0, rb, cb, nb, 1.0),
        "abs_bucket_max": lambda k: k(block[:-1, :-1], 0, rb, cb, nb, True),
        "frontier_update": lambda k: k(block, 0, lo, hi, lo, hi, np.full(nw, -np.inf),
                                       np.full(nw, np.inf), np.zeros(nw), np.zeros(nw, dtype=np.int64)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    if "numba" not in _kernels.backend_names():
        print("numba is not importable; only the numpy backend is available")
        return
    print(f"block {args.size + 1}x{args.size + 1}, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}  agree")
    for name, call in kernel_cases(args.size, rng).items():
        knp, knb = _kernels.get(name, "numpy"), _kernels.get(name, "numba")
        a, b = call(knp), call(knb)  # second call also compiles numba
        agree = all(np.allclose(x, y) for x, y in zip(np.atleast_1d(a) if a is not None else [],
                                                      np.atleast_1d(b) if b is not None else []))
        tn = _best(lambda: call(knp), args.repeat)
        tb = _best(lambda: call(knb), args.repeat)
        print(f"{name:<22}{tn * 1e3:>12.2f}{tb * 1e3:>12.2f}{tn / tb:>9.1f}x  {agree}")

    # end to end: the window scans behind hahn_norm and pringsheim_limit
    x = ExprSequence("piece(k==l, 1/(k*l)) piece(true, 0)", FLOAT)
    print("\nend-to-end scans over the default schedule (16..512)")
    for label, fn in (("window_sums hahn", lambda be: window_sums(x, DEFAULT_WINDOWS, "hahn", backend=be)),
                      ("window_frontiers", lambda be: window_frontiers(x, DEFAULT_WINDOWS, backend=be))):
        fn("numba")
        tn = _best(lambda: fn("numpy"), args.repeat)
        tb = _best(lambda: fn("numba"), args.repeat)
        print(f"{label:<22}{tn * 1e3:>12.2f}{tb * 1e3:>12.2f}{tn / tb:>9.1f}x")


if __name__ == "__main__":
    main()
