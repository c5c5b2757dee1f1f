"""Adaptive integration of the quadratic flows, real and complex time.

Real-time integration runs an embedded Dormand-Prince 5(4) pair with PI
step control and conserved-quantity drift monitoring.  Declaring a
finite-time blow-up requires all three of: sup-norm above ``max_norm``,
controller step below ``min_step``, and a linear fit of 1/||z|| over the
last accepted steps extrapolating to zero at a finite time ahead (for a
quadratic field 1/||z|| is asymptotically linear near a pole).  Slow
unbounded growth is deliberately not a blow-up: it ends the span
normally.

Complex time is explored along rays t = s e^{i theta} (s >= 0 real) and
along polygonal loops; a loop integration reports how far the final
state deviates from the initial one, which is a univaluedness probe for
the continued solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend
from ._kernel import (
    TERM_BLOWUP,
    TERM_MAXSTEPS,
    TERM_SPAN,
    TERM_STEPCOLLAPSE,
    integrate_py,
)
from .euler_arnold import EAField

__all__ = [
    "IntegratorOptions",
    "Termination",
    "Trajectory",
    "ComplexRay",
    "ComplexLoop",
    "BlowUpOnPathError",
    "integrate",
    "integrate_complex_ray",
    "prescan_loop",
    "monodromy_loop",
    "estimate_endpoints",
]


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    max_norm: float = 1e8
    min_step: float = 1e-12
    max_steps: int = 5_000_000
    record: bool = True
    backend: str = "auto"  # auto | compiled | python

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_norm <= 0 or self.min_step <= 0:
            raise ValueError("max_norm and min_step must be positive")


class Termination(Enum):
    SPAN_COMPLETED = "SpanCompleted"
    BLOW_UP = "BlowUp"
    STEP_COLLAPSE = "StepCollapse"
    MAX_STEPS = "MaxSteps"


_TERM_BY_CODE = {
    TERM_SPAN: Termination.SPAN_COMPLETED,
    TERM_BLOWUP: Termination.BLOW_UP,
    TERM_STEPCOLLAPSE: Termination.STEP_COLLAPSE,
    TERM_MAXSTEPS: Termination.MAX_STEPS,
}


@dataclass
class Trajectory:
    """Sampled solution with termination diagnostics.

    ``t`` holds the (real) path parameter; for a complex ray this is the
    arc length along the ray.  ``integral_drift`` is the max relative
    drift of the two conserved quantities over all accepted steps.
    """

    t: np.ndarray
    z: np.ndarray
    termination: Termination
    t_est: float | None
    integral_drift: tuple[float, float]
    n_steps: int
    n_accepted: int
    backend: str

    @property
    def final_state(self):
        return self.z[-1]

    @property
    def final_time(self):
        return float(self.t[-1])


@dataclass(frozen=True)
class ComplexRay:
    theta: float
    r_max: float

    def __post_init__(self):
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")


@dataclass(frozen=True)
class ComplexLoop:
    """Closed polyline of complex times (first vertex == last vertex)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("loop needs at least two vertices")
        if abs(v[0] - v[-1]) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
            raise ValueError("loop must be closed (first vertex == last)")


class BlowUpOnPathError(RuntimeError):
    def __init__(self, segment, t_est):
        self.segment = segment
        self.t_est = t_est
        super().__init__(f"blow-up detected on path segment {segment} (t_est={t_est})")


def _run_kernel(f: EAField, z0, t0, t1, opts: IntegratorOptions, phase=1.0):
    z0 = np.asarray(z0)
    complex_data = (
        np.iscomplexobj(z0)
        or f.mode == "complex"
        or isinstance(phase, complex)
        or any(isinstance(cc, complex) for cc in f.coeffs)
    )
    if complex_data:
        name = "python"
        out = integrate_py(
            int(f.case),
            tuple(complex(c) for c in f.coeffs),
            tuple(complex(p) for p in f.iparams),
            float(f.delta),
            tuple(complex(v) for v in z0),
            t0,
            t1,
            opts.rel_tol,
            opts.abs_tol,
            opts.max_norm,
            opts.min_step,
            opts.max_steps,
            opts.record,
            phase=complex(phase),
        )
        dtype = complex
    else:
        name, kern = _backend.resolve(opts.backend)
        args = (
            int(f.case),
            tuple(float(c) for c in f.coeffs),
            tuple(float(p) for p in f.iparams),
            float(f.delta),
            tuple(float(v) for v in z0),
            float(t0),
            float(t1),
            opts.rel_tol,
            opts.abs_tol,
            opts.max_norm,
            opts.min_step,
            opts.max_steps,
            opts.record,
        )
        if name == "compiled":
            out = kern(*args)
        else:
            out = integrate_py(*args)
        dtype = float
    ts, zs, term, t_est, d1, d2, nsteps, naccept = out
    traj = Trajectory(
        np.asarray(ts, dtype=float),
        np.asarray(zs, dtype=dtype),
        _TERM_BY_CODE[term],
        None if math.isnan(t_est) else float(t_est),
        (float(d1), float(d2)),
        int(nsteps),
        int(naccept),
        name,
    )
    return traj


def integrate(f: EAField, z0, t_span, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate z' = field(z) over a real time span (t0, t1); t1 < t0 runs
    backwards."""
    opts = opts or IntegratorOptions()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)) or t0 == t1:
        raise ValueError("invalid time span")
    return _run_kernel(f, z0, t0, t1, opts)


def integrate_complex_ray(
    f: EAField, z0, ray: ComplexRay, opts: IntegratorOptions | None = None
) -> Trajectory:
    """Integrate dz/ds = e^{i theta} field(z) for s in [0, r_max].

    The trajectory's ``t`` array is the real ray parameter s; complex
    time along the ray is s * e^{i theta}.
    """
    opts = opts or IntegratorOptions()
    phase = complex(math.cos(ray.theta), math.sin(ray.theta))
    return _run_kernel(f, np.asarray(z0, dtype=complex), 0.0, ray.r_max, opts, phase=phase)


def _segment(f, z0, ta, tb, opts):
    dt = tb - ta
    r = abs(dt)
    phase = dt / r
    return _run_kernel(f, z0, 0.0, r, opts, phase=phase)


def prescan_loop(f: EAField, z0, loop: ComplexLoop, opts: IntegratorOptions | None = None):
    """Integrate along the loop segment by segment; return per-segment
    terminations without raising."""
    opts = opts or IntegratorOptions()
    out = []
    z = np.asarray(z0, dtype=complex)
    v = loop.vertices
    for i in range(len(v) - 1):
        traj = _segment(f, z, v[i], v[i + 1], opts)
        out.append(traj.termination)
        if traj.termination is not Termination.SPAN_COMPLETED:
            break
        z = traj.final_state
    return out


def monodromy_loop(
    f: EAField, z0, loop: ComplexLoop, opts: IntegratorOptions | None = None
) -> float:
    """Continue the solution around a closed polygonal loop of complex
    times starting at the first vertex; return ||z_end - z0||.

    A vanishing deviation certifies that the continuation around the loop
    is univalued.  Raises BlowUpOnPathError if any segment fails to
    complete.
    """
    opts = opts or IntegratorOptions()
    z = np.asarray(z0, dtype=complex)
    v = loop.vertices
    if len(v) == 2 and abs(v[0] - v[1]) == 0.0:
        return 0.0
    for i in range(len(v) - 1):
        ta, tb = v[i], v[i + 1]
        if abs(tb - ta) == 0.0:
            continue
        traj = _segment(f, z, ta, tb, opts)
        if traj.termination is not Termination.SPAN_COMPLETED:
            raise BlowUpOnPathError(i, traj.t_est)
        z = traj.final_state
    return float(np.linalg.norm(z - np.asarray(z0, dtype=complex)))


def estimate_endpoints(
    f: EAField, z0, horizon: float = 100.0, opts: IntegratorOptions | None = None
):
    """Numerically probe both time directions; return (t_minus, t_plus).

    Each entry is the extrapolated blow-up time when the integrator
    detects one within the horizon, -inf/+inf when the span completes.
    """
    opts = opts or IntegratorOptions(record=False)
    fwd = integrate(f, z0, (0.0, horizon), opts)
    bwd = integrate(f, z0, (0.0, -horizon), opts)
    t_plus = fwd.t_est if fwd.termination is Termination.BLOW_UP else math.inf
    t_minus = bwd.t_est if bwd.termination is Termination.BLOW_UP else -math.inf
    return t_minus, t_plus
