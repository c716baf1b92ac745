"""Time the numba density kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--points 200000] [--repeat 5]

Both backends are imported in one process: the ``*_numpy`` and ``*_numba``
functions live side by side in hopfion.kernels regardless of the
HOPFION_DISABLE_NUMBA flag (with the flag set, the numba names are plain
Python loops and are skipped here).
"""

import argparse
import time

import numpy as np

from hopfion import kernels
from hopfion._accel import HAVE_NUMBA


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def inputs(npts, nfields, seed=0):
    rng = np.random.default_rng(seed)
    grad = rng.normal(size=(nfields, npts, 3)) + 1j * rng.normal(size=(nfields, npts, 3))
    s = rng.uniform(0.05, 0.95, size=(nfields, npts))
    alpha = np.full(nfields, 0.75 / nfields)
    Z = rng.normal(size=(2, npts)) + 1j * rng.normal(size=(2, npts))
    dZ = rng.normal(size=(3, 2, npts)) + 1j * rng.normal(size=(3, 2, npts))
    return (grad, s, alpha), (Z, dZ)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--fields", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    e_args, h_args = inputs(args.points, args.fields)
    cases = [
        ("energy_density", kernels.energy_density_numpy, kernels.energy_density_numba, e_args),
        ("hopf_density", kernels.hopf_density_numpy, kernels.hopf_density_numba, h_args),
    ]
    print(f"points={args.points} fields={args.fields} numba={'on' if HAVE_NUMBA else 'off'}")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, f_np, f_nb, a in cases:
        ref = f_np(*a)
        t_np = best_of(f_np, a, args.repeat)
        if not HAVE_NUMBA:
            print(f"{name:<16}{t_np * 1e3:12.2f}{'-':>12}{'-':>10}{'-':>14}")
            continue
        f_nb(*a)  # compile outside the timing
        diff = np.max(np.abs(f_nb(*a) - ref) / np.maximum(np.abs(ref), 1e-300))
        t_nb = best_of(f_nb, a, args.repeat)
        print(f"{name:<16}{t_np * 1e3:12.2f}{t_nb * 1e3:12.2f}{t_np / t_nb:10.1f}{diff:14.2e}")


if __name__ == "__main__":
    main()
