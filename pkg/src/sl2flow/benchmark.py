"""Benchmark the compiled integration kernel against the Python fallback.

Run as ``python -m sl2flow.benchmark``.  The workload mixes a bounded
trajectory of a complete metric and a finite-time blow-up run, the two
regimes the acceptance suite exercises at scale.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import HAVE_COMPILED
from .completeness import blowup_time, find_idempotents
from .euler_arnold import build_field
from .integrator import IntegratorOptions, integrate
from .normal_form import reduce
from .sampling import random_phi


def _workload(backend: str, n_runs: int, seed: int):
    rng = np.random.default_rng(seed)
    opts = IntegratorOptions(rel_tol=1e-10, abs_tol=1e-10, record=False, backend=backend)
    steps = 0
    finals = []
    for _ in range(n_runs):
        phi_c, _ = random_phi(1, rng, complete=True)
        f = build_field(reduce(phi_c))
        z0 = rng.normal(size=3)
        z0 /= np.linalg.norm(z0)
        traj = integrate(f, 0.3 * z0, (0.0, 50.0), opts)
        steps += traj.n_steps
        finals.append(traj.final_state)

        phi_i, _ = random_phi(1, rng, complete=False)
        fi = build_field(reduce(phi_i))
        ray = find_idempotents(fi)[0]
        s0 = 1.0 if ray.kappa > 0 else -1.0
        traj = integrate(fi, s0 * ray.direction, (0.0, 2.0 * float(blowup_time(ray, s0))), opts)
        steps += traj.n_steps
        finals.append(np.array([traj.t_est or 0.0, 0.0, 0.0]))
    return steps, np.array(finals)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="compare integration backends")
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    results = {}
    for backend in (["compiled"] if HAVE_COMPILED else []) + ["python"]:
        t0 = time.perf_counter()
        steps, finals = _workload(backend, args.runs, args.seed)
        dt = time.perf_counter() - t0
        results[backend] = (dt, steps, finals)
        print(f"{backend:9s}: {dt:8.3f} s   {steps:9d} steps   {steps / dt:12.0f} steps/s")

    if "compiled" in results and "python" in results:
        dev = float(
            np.max(np.abs(results["compiled"][2] - results["python"][2]))
        )
        speedup = results["python"][0] / results["compiled"][0]
        print(f"speedup: {speedup:.1f}x   max endpoint deviation: {dev:.3e}")
    elif not HAVE_COMPILED:
        print("compiled kernel not built; only the python fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
