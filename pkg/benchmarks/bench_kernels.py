"""Compare the compiled kernels with their numpy twins.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each case is timed on both backends and the results are checked for
agreement before the timings are reported.
"""
import argparse
import timeit

import numpy as np

from ftrfade import _kernels_py

try:
    from ftrfade import _kernels
except ImportError:  # pragma: no cover - extension not built
    _kernels = None


def cases():
    x = np.linspace(0.0, 8.0, 400)
    nodes, w = np.polynomial.legendre.leggauss(200)
    cos_t = np.cos(np.pi * (nodes + 1) / 2)
    kr = 4.0 * (1 + 0.2 * cos_t)
    w = w / w.sum()
    z = np.geomspace(1e-3, 5e3, 20000)
    ww = np.linspace(0.0, 0.95, 20000)
    return {
        "rs_mixture_pdf (400 x, 200 phase nodes)": lambda k: k.rs_mixture_pdf(x, 5.0, 2.0, kr, w),
        "log_hyp1f1 (20000 z up to 5e3)": lambda k: k.log_hyp1f1(2.5, 1.0, z),
        "hyp2f1_series (20000 w)": lambda k: k.hyp2f1_series(2.0, 3.5, 4.0, ww),
        "log_hyp2f1_positive (20000 w, b=50)": lambda k: k.log_hyp2f1_positive(2.0, 50.0, 1.0, ww),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not available; build with pip install -e .")
    print(f"{'kernel':45s} {'cython [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        np.testing.assert_allclose(fn(_kernels), fn(_kernels_py), rtol=1e-12, atol=1e-300)
        t_c = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat))
        t_p = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        print(f"{name:45s} {1e3 * t_c:12.2f} {1e3 * t_p:12.2f} {t_p / t_c:8.1f}x")


if __name__ == "__main__":
    main()
