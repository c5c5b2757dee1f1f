"""Analytic completeness verdicts for the quadratic geodesic flows.

Metric-level classification over R: a case-1 metric is complete iff
(1/l2 - 1/l3)(1/l3 - 1/l1) <= 0 (equivalently a*b <= 0 for the field
coefficients), a case-3 metric iff (eta - nu) zeta <= 0, and every
case-2 or case-4 metric is incomplete.  Over C a metric is complete iff
some eigenvalue has an eigenspace of dimension at least two.

Incompleteness is always carried by idempotent rays: lines through the
origin on which the field restricts to s' = kappa s^2, so the solution
s0 / (1 - kappa s0 t) has a pole at t = 1/(kappa s0).  For incomplete
metrics this module also classifies the maximal domain of every single
trajectory (point / complete / half-line / bounded interval) from the
projective position of its invariant cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .euler_arnold import EAField, build_field, eval_field, first_integrals
from .normal_form import Case, NormalForm, invert_params

__all__ = [
    "MetricVerdict",
    "GeodesicClass",
    "HalfSide",
    "GeodesicVerdict",
    "IdempotentRay",
    "CausalType",
    "CompleteMetricRecipe",
    "metric_verdict",
    "find_idempotents",
    "blowup_time",
    "geodesic_verdict",
    "causal_type",
    "build_complete_metric",
]

MEMBERSHIP_TOL = 1e-9
RAY_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class MetricVerdict:
    complete: bool
    criterion_value: float | None
    criterion_id: str


class GeodesicClass(Enum):
    POINT = "PointGeodesic"
    COMPLETE = "Complete"
    HALF_COMPLETE = "HalfComplete"
    BOUNDED_INTERVAL = "BoundedInterval"
    NOT_IMPLEMENTED = "NotImplemented"


class HalfSide(Enum):
    FUTURE = "future"  # complete on [0, +inf)
    PAST = "past"      # complete on (-inf, 0]


@dataclass(frozen=True)
class GeodesicVerdict:
    klass: GeodesicClass
    side: HalfSide | None = None
    endpoints: tuple[float, float] | None = None
    extrapolated: bool = False
    note: str = ""


@dataclass(frozen=True)
class IdempotentRay:
    """Unit direction v with eval(field, v) = kappa * v, kappa != 0."""

    direction: np.ndarray
    kappa: complex


class CausalType(Enum):
    SPACELIKE = "spacelike"
    NULL = "null"
    TIMELIKE = "timelike"


@dataclass(frozen=True)
class CompleteMetricRecipe:
    nu_diag: tuple[float, float, float]       # inverse-map eigenvalues
    phi_diag: tuple[float, float, float]      # map eigenvalues 1/nu
    J_coeffs: tuple[float, float, float]      # positive-definite combination I2 - I1
    criterion_value: float                    # a*b, must be <= 0


def metric_verdict(nf: NormalForm) -> MetricVerdict:
    """Completeness of the metric attached to a normal form."""
    if nf.mode == "complex":
        if nf.case is Case.CASE1:
            l1, l2, l3 = nf.params
            dim = max(2 if l1 == l2 else 1, 2 if l2 == l3 else 1, 3 if l1 == l2 == l3 else 1)
            complete = dim >= 2
        elif nf.case is Case.CASE3:
            mu, lam, _ = nf.params
            dim = 2 if mu == lam else 1
            complete = dim >= 2
        else:
            dim = 1
            complete = False
        return MetricVerdict(complete, float(dim), "complex-eigenspace-dimension")

    if nf.case is Case.CASE1:
        nu1, nu2, nu3 = invert_params(nf)
        value = (nu2 - nu3) * (nu3 - nu1)
        return MetricVerdict(value <= 0.0, value, "case1-product")
    if nf.case is Case.CASE2:
        return MetricVerdict(False, None, "case2-incomplete")
    if nf.case is Case.CASE3:
        eta, nu, zeta = invert_params(nf)
        value = (eta - nu) * zeta
        return MetricVerdict(value <= 0.0, value, "case3-product")
    return MetricVerdict(False, None, "case4-incomplete")


def _ray_from_direction(f: EAField, d):
    d = np.asarray(d)
    v = d / np.linalg.norm(d)
    ev = eval_field(f, v)
    kappa = np.vdot(v, ev) / np.vdot(v, v)
    res = float(np.linalg.norm(ev - kappa * v))
    if res > RAY_RESIDUAL_TOL * max(1.0, abs(kappa)):
        raise ArithmeticError(f"idempotent certification failed: residual {res:.3e}")
    if f.mode == "real":
        kappa = float(np.real(kappa))
    else:
        kappa = complex(kappa)
    return IdempotentRay(v, kappa)


def find_idempotents(f: EAField) -> list[IdempotentRay]:
    """Invariant rays of the flow, each certified by its defining relation.

    Real mode returns the real rays (empty when the metric is complete);
    complex mode returns the rays over C where the formulas make sense.
    """
    real = f.mode == "real"
    tiny = 1e-13
    sqrt = math.sqrt if real else (lambda x: complex(x) ** 0.5)
    rays = []
    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        if abs(a) < tiny or abs(b) < tiny or abs(c) < tiny:
            return []
        if real and a * b < 0:
            return []
        sa, sb = sqrt(a / c), sqrt(b / c)
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                rays.append(_ray_from_direction(f, np.array([s1 * sa, s2 * sb, 1.0])))
    elif f.case is Case.CASE2:
        a, b = f.coeffs
        if abs(a) < tiny:
            dirs = [np.array([1.0, 0.0, 1.0]), np.array([-1.0, 0.0, 1.0])]
        else:
            s = math.hypot(a, b)
            rho2 = (-b + s) / a if b > 0 else (-b - s) / a
            rho1 = math.sqrt(2.0 * b * rho2 / a)
            dirs = [np.array([rho1, rho2, 1.0]), np.array([-rho1, rho2, 1.0])]
        rays.extend(_ray_from_direction(f, d) for d in dirs)
    elif f.case is Case.CASE3:
        a, b = f.coeffs
        if abs(a) < tiny:
            return []
        if real and a * b < 0:
            return []
        s = sqrt(b / a)
        rays.append(_ray_from_direction(f, np.array([s, -b / (2.0 * a), 1.0])))
        rays.append(_ray_from_direction(f, np.array([-s, -b / (2.0 * a), 1.0])))
    else:
        zeta, nu = f.coeffs
        zn = zeta * nu
        rays.append(
            _ray_from_direction(f, np.array([zn / 2.0, -(zn * zn) / 8.0, 1.0]))
        )
    return rays


def blowup_time(ray: IdempotentRay, s0):
    """Pole 1/(kappa s0) of the on-ray solution s0/(1 - kappa s0 t)."""
    if s0 == 0:
        raise ValueError("s0 = 0 is the fixed point at the origin")
    return 1.0 / (ray.kappa * s0)


def causal_type(nf: NormalForm, z0, tol: float = 1e-10) -> CausalType:
    """Sign of q(x', x') for the geodesic with flow data z0 (adapted coords).

    Convention: positive = spacelike, negative = timelike (the timelike
    basis slot carries B = -1).
    """
    if nf.mode != "real":
        raise ValueError("causal type is a real-mode notion")
    f = build_field(nf)
    z0 = np.asarray(z0, dtype=float)
    _, i2 = first_integrals(f, z0)
    scale = max(1.0, float(np.max(np.abs(f.iparams)))) * max(1.0, float(z0 @ z0))
    if abs(i2) <= tol * scale:
        return CausalType.NULL
    return CausalType.SPACELIKE if i2 > 0 else CausalType.TIMELIKE


def _field_scale(f: EAField) -> float:
    if f.case is Case.CASE4:
        zeta, nu = f.coeffs
        return max(1.0, abs(zeta * nu * nu) * (2.0 + abs(zeta * nu)))
    return max(1.0, *(abs(c) for c in f.coeffs))


def _on_ray(zhat, ray: IdempotentRay, tol: float) -> bool:
    v = ray.direction
    proj = np.vdot(v, zhat) * v
    return float(np.linalg.norm(zhat - proj)) <= tol


def _half_from_ray(f: EAField, ray: IdempotentRay, z0) -> GeodesicVerdict:
    s0 = float(np.real(np.vdot(ray.direction, z0)))
    t_star = float(blowup_time(ray, s0))
    if t_star > 0:
        return GeodesicVerdict(
            GeodesicClass.HALF_COMPLETE, HalfSide.PAST, (-math.inf, t_star)
        )
    return GeodesicVerdict(
        GeodesicClass.HALF_COMPLETE, HalfSide.FUTURE, (t_star, math.inf)
    )


def _half_from_param(p0: float, velocity: float, target: float) -> GeodesicVerdict:
    """Half-line verdict for a leaf whose finite-time endpoint sits at
    chart-parameter ``target``; ``velocity`` is dp/dt at the start."""
    side = None
    if velocity != 0.0:
        toward = (target - p0) * velocity > 0.0
        side = HalfSide.PAST if toward else HalfSide.FUTURE
    return GeodesicVerdict(GeodesicClass.HALF_COMPLETE, side)


def geodesic_verdict(nf: NormalForm, z0, tol: float = MEMBERSHIP_TOL) -> GeodesicVerdict:
    """Maximal-domain class of the trajectory through z0 (adapted coords).

    The decision is purely analytic: membership in the invariant
    cones/planes/rays is tested on the normalised initial point with
    relative tolerance ``tol``.
    """
    if nf.mode != "real":
        raise ValueError("per-geodesic verdicts are real-mode only")
    f = build_field(nf)
    z0 = np.asarray(z0, dtype=float)
    nrm = float(np.linalg.norm(z0))
    if nrm == 0.0:
        return GeodesicVerdict(GeodesicClass.POINT)
    zh = z0 / nrm
    if float(np.max(np.abs(eval_field(f, zh)))) <= tol * _field_scale(f):
        return GeodesicVerdict(GeodesicClass.POINT)

    delta = f.delta
    z1, z2, z3 = zh

    if nf.case is Case.CASE1:
        a, b, c = f.coeffs
        if a * b <= 0.0:
            return GeodesicVerdict(GeodesicClass.COMPLETE)
        for ray in find_idempotents(f):
            if _on_ray(zh, ray, tol):
                return _half_from_ray(f, ray, z0)
        nu1, nu2, nu3 = f.iparams
        i1, i2 = first_integrals(f, zh)
        q1, q2, q3 = (i2 - nu1 * i1, i2 - nu2 * i1, i2 - nu3 * i1)
        qtol = tol * max(1.0, abs(nu1), abs(nu2), abs(nu3)) * max(1.0, abs(i1), abs(i2))
        x1sq = (z1 / z3) ** 2 if z3 != 0.0 else math.inf
        x2sq = (z2 / z3) ** 2 if z3 != 0.0 else math.inf
        if abs(q1) <= qtol:
            # invariant planes x2^2 = b/c
            if z3 != 0.0 and x1sq > a / c:
                x1, x2 = z1 / z3, z2 / z3
                vel = delta * x2 * (a - c * x1 * x1) * z3
                return _half_from_param(x1, vel, math.copysign(math.sqrt(a / c), x1))
            return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
        if abs(q2) <= qtol:
            # invariant planes x1^2 = a/c
            if z3 != 0.0 and x2sq > b / c:
                x1, x2 = z1 / z3, z2 / z3
                vel = delta * x1 * (b - c * x2 * x2) * z3
                return _half_from_param(x2, vel, math.copysign(math.sqrt(b / c), x2))
            return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
        if abs(q3) <= qtol:
            # line cone z2^2 b = z1^2 ... the pair x2 = +-sqrt(b/a) x1
            if x1sq < a / c:
                x1, x2 = z1 / z3, z2 / z3
                vel = delta * x2 * (a - c * x1 * x1) * z3
                return _half_from_param(x1, vel, math.copysign(math.sqrt(a / c), x1))
            # arc joining two idempotent points across the chart divisor
            return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
        return GeodesicVerdict(
            GeodesicClass.BOUNDED_INTERVAL, extrapolated=bool(q1 * q2 < 0.0)
        )

    if nf.case is Case.CASE3:
        a, b = f.coeffs
        if a * b <= 0.0:
            return GeodesicVerdict(GeodesicClass.COMPLETE)
        if abs(z3) <= tol:
            return GeodesicVerdict(GeodesicClass.COMPLETE)
        for ray in find_idempotents(f):
            if _on_ray(zh, ray, tol):
                return _half_from_ray(f, ray, z0)
        eta, nu, zeta = f.iparams
        i1, i2 = first_integrals(f, zh)
        qlam = i2 - nu * i1
        qtol = tol * max(1.0, abs(eta), abs(nu), abs(zeta)) * max(1.0, abs(i1), abs(i2))
        x1 = z1 / z3
        if abs(qlam) <= qtol:
            # vertical invariant planes x1 = +-sqrt(b/a)
            x2 = z2 / z3
            vel = delta * (-x1) * (b + 2.0 * a * x2) * z3
            return _half_from_param(x2, vel, -b / (2.0 * a))
        if x1 * x1 < b / a:
            return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
        vel = delta * (b - a * x1 * x1) * z3
        return _half_from_param(x1, vel, math.copysign(math.sqrt(b / a), x1))

    if nf.case is Case.CASE2:
        a, b = f.coeffs
        if abs(a) <= 1e-12 or b < 0.0:
            return GeodesicVerdict(
                GeodesicClass.NOT_IMPLEMENTED,
                note="case-2 foliation is only described for a != 0, b > 0; "
                "sub-cases a = 0 or b < 0 are not classified per-geodesic",
            )
        for ray in find_idempotents(f):
            if _on_ray(zh, ray, tol):
                return _half_from_ray(f, ray, z0)
        s = math.hypot(a, b)
        rho2m = (-b - s) / a
        rho2p = (-b + s) / a
        rho1 = math.sqrt(2.0 * b * rho2p / a)
        ptol = tol * max(1.0, abs(rho2m), abs(rho2p))
        if abs(z2 - rho2m * z3) <= ptol:
            return GeodesicVerdict(GeodesicClass.COMPLETE)
        if abs(z2 - rho2p * z3) <= ptol:
            if z3 == 0.0:
                return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
            x1 = z1 / z3
            if x1 * x1 > rho1 * rho1:
                x2 = rho2p
                vel = (
                    delta
                    * (b * (x2 * x2 - x1 * x1 + 1.0) - a * x1 * x1 * x2)
                    * z3
                )
                return _half_from_param(x1, vel, math.copysign(rho1, x1))
            return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)
        return GeodesicVerdict(GeodesicClass.BOUNDED_INTERVAL)

    # case 4
    zeta, nu = f.coeffs
    if abs(z3) <= tol:
        return GeodesicVerdict(GeodesicClass.COMPLETE)
    for ray in find_idempotents(f):
        if _on_ray(zh, ray, tol):
            return _half_from_ray(f, ray, z0)
    x1 = z1 / z3
    k = zeta * nu * nu
    vel = delta * k * (2.0 * x1 - zeta * nu) * z3
    return _half_from_param(x1, vel, zeta * nu / 2.0)


def build_complete_metric(r: int) -> CompleteMetricRecipe:
    """Diagonal inverse-map data for a certified complete metric.

    ``r`` shifts the metric signature off the (2,1) base: r = 0 keeps
    (2,1) (two inverse eigenvalues above 1, one in (0,1)), r = 1 gives a
    Riemannian metric (third inverse eigenvalue negative).  In both the
    combination J = I2 - I1 has strictly positive diagonal coefficients,
    so every trajectory is trapped in a compact level set.  Mirror
    signatures are obtained by negating the map, which flips the sign of
    J; they are not generated here.
    """
    if r == 0:
        nu = (2.0, 3.0, 0.5)
    elif r == 1:
        nu = (2.0, 3.0, -1.0)
    else:
        raise ValueError("r must be 0 or 1 for a (2,1) bi-invariant form")
    J = (nu[0] - 1.0, nu[1] - 1.0, 1.0 - nu[2])
    if not all(j > 0.0 for j in J):
        raise AssertionError("recipe lost positive definiteness")
    value = (nu[1] - nu[2]) * (nu[2] - nu[0])
    if value > 0.0:
        raise AssertionError("recipe lost the completeness criterion")
    return CompleteMetricRecipe(nu, tuple(1.0 / n for n in nu), J, value)
