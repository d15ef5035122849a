"""Compare the compiled and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints per-kernel timings for both backends and the max difference between
their outputs. The compiled backend is skipped (with a note) if the
extension was not built.
"""
import argparse
import importlib
import timeit

import numpy as np

from dfie import _kernels_py as py


def _cases(rng):
    z = rng.uniform(0, 60, 4000) + 1j * rng.uniform(0, 5, 4000)
    x = np.cos(rng.uniform(0, np.pi, 4000))
    s = np.sqrt(1 - x * x)
    return {
        "jhat(z, 60)": lambda m: m.jhat(z, 60),
        "hhat(z, 60)": lambda m: m.hhat(z, 60),
        "scaled_bessel(z, 60)": lambda m: m.scaled_bessel(z, 60),
        "legendre_column(x, m=3, 60)": lambda m: m.legendre_column(x, s, 3, 60),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        cy = importlib.import_module("dfie._kernels")
    except ImportError:
        cy = None
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in _cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:32s} {tp:12.2f} {'-':>12s} {'-':>8s} {'-':>10s}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        a, b = fn(py), fn(cy)
        if isinstance(a, tuple):
            diff = max(float(np.max(np.abs(u - v) / np.maximum(np.abs(u), 1e-300))) for u, v in zip(a, b))
        else:
            diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{name:32s} {tp:12.2f} {tc:12.2f} {tp / tc:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
