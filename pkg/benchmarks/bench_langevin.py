"""Benchmark the trajectory backends against each other.

Runs the same rigid-body ensemble through every available backend (the
compiled Cython kernel and the pure-numpy fallback), times each one, and
reports throughput plus the speedup relative to numpy.  Both backends draw
identical Philox noise streams, so the script also verifies that their
moment series agree to floating-point roundoff.

Usage:
    python3 benchmarks/bench_langevin.py
    python3 benchmarks/bench_langevin.py --trajectories 50000 --steps 1000
"""

import argparse
import time

import numpy as np

from rotodiff.classical import (
    ClassicalParams,
    HaarInitial,
    available_backends,
    simulate_ensemble,
)
from rotodiff.localization import AnisotropySpec, body_diffusion_matrix
from rotodiff.rotation import InertiaTensor


def build_model(dt: float) -> ClassicalParams:
    spec = AnisotropySpec(
        amplitude=2.0, axis=(0.0, 0.0, 1.0), b_eigenvalues=(0.5, 1.5, 3.0)
    )
    return ClassicalParams(
        inertia=InertiaTensor(moments=np.array([1.0, 2.0, 3.0])),
        body_diffusion=body_diffusion_matrix(spec, 1.0),
        dt=dt,
        seed=2024,
    )


def run_once(model, args, backend: str):
    return simulate_ensemble(
        model,
        args.trajectories,
        args.steps * args.dt,
        HaarInitial(momentum=np.zeros(3)),
        n_samples=5,
        threads=args.threads,
        backend=backend,
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trajectories", type=int, default=20_000)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--dt", type=float, default=0.005)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    model = build_model(args.dt)
    work = args.trajectories * args.steps
    print(
        f"{args.trajectories} trajectories x {args.steps} steps "
        f"({work:.2e} Euler-Maruyama updates per run)"
    )

    results = {}
    timings = {}
    for backend in available_backends():
        run_once(model, args, backend)  # warm-up: JIT-free but touches caches
        best = min(
            _timed(lambda: run_once(model, args, backend))
            for _ in range(args.repeats)
        )
        series = run_once(model, args, backend)
        results[backend] = series
        timings[backend] = best
        print(
            f"  {backend:>6}: {best:8.3f} s   "
            f"({work / best / 1e6:7.2f} M updates/s)"
        )

    if "numpy" in timings:
        for backend, best in timings.items():
            if backend != "numpy":
                print(f"speedup {backend} vs numpy: {timings['numpy'] / best:.2f}x")
    if len(results) == 2:
        a, b = results.values()
        gap = np.abs(a.second_moment - b.second_moment).max()
        print(f"max |second moment| gap between backends: {gap:.2e}")


def _timed(fn) -> float:
    started = time.perf_counter()
    fn()
    return time.perf_counter() - started


if __name__ == "__main__":
    main()
