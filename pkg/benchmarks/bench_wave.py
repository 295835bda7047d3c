"""Timing comparison of the two leapfrog kernels.

Runs the compiled and the vectorized numpy implementation on the same
grid and reports wall times.  The first compiled call is timed
separately since it may include JIT compilation (cached afterwards).

Usage::

    python3 benchmarks/bench_wave.py --cells 4000 --steps 8000 --reps 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from surfimp import _kernels


def setup(cells: int, steps: int):
    rng = np.random.default_rng(0)
    rho = 1.0 + 0.3 * rng.random(cells + 1)
    kappa = 1.0 + 0.3 * rng.random(cells)
    dx = 10.0 / cells
    dt = 0.5 * dx / np.sqrt(1.3)
    t = dt * np.arange(steps + 1)
    f = np.sin(2.0 * np.pi * t) * np.minimum(t, 1.0)
    return f, rho, kappa, dx, dt


def best_of(fn, args, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=4000)
    ap.add_argument("--steps", type=int, default=8000)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    payload = setup(args.cells, args.steps)
    print(f"grid: {args.cells} cells, {args.steps} steps, "
          f"best of {args.reps}")

    t_np = best_of(_kernels._leapfrog_numpy, payload, args.reps)
    print(f"numpy          {t_np * 1e3:9.2f} ms")

    if not _kernels.HAVE_NUMBA:
        print("numba          not installed, skipping")
        return 0

    t0 = time.perf_counter()
    _kernels._leapfrog_numba(*payload)
    first = time.perf_counter() - t0
    t_nb = best_of(_kernels._leapfrog_numba, payload, args.reps)
    print(f"numba (first)  {first * 1e3:9.2f} ms   may include compilation")
    print(f"numba (warm)   {t_nb * 1e3:9.2f} ms")
    print(f"speedup        {t_np / t_nb:9.2f} x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
