"""Projective compactification charts for the quadratic flows.

The flows are homogeneous, so they extend to projective 3-space and
leave the plane at infinity invariant.  Charts near that plane:

* X: x = (z1/z3, z2/z3, 1/z3), divisor {x3 = 0};
* Y: v = (z1/z2, 1/z2, z3/z2), divisor {v2 = 0} (infinity coordinates
  are (v1, v3));
* U: u = (z3/z1, z2/z1, 1/z1), divisor {u3 = 0} (infinity coordinates
  are (u1, u2));
* W: w = (1/z1, z2/z1, z3/z1), divisor {w1 = 0} (same affine patch as U
  with the paper-friendly ordering; infinity coordinates are (w3, w2)).

In every chart the pushed-forward field is a polynomial divided by one
divisor coordinate; its restriction to the divisor represents the
induced foliation at infinity.  Only the chart/case pairs with known
closed forms are implemented; anything else raises.

The quotient of the two conserved quantities is constant on the induced
foliation, so every leaf at infinity lies on a conic.  For the leaf
kinds with a global parametrisation the travel time to an endpoint is
the integral of C / sqrt|u(phi)| with u vanishing simply at escape
endpoints: such integrals converge (inverse square-root singularity) and
are evaluated here with an endpoint substitution, while endpoints at
parameter infinity yield divergent integrals (complete directions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .euler_arnold import EAField, first_integrals
from .normal_form import Case

__all__ = [
    "Chart",
    "ChartDomainError",
    "UnsupportedChartError",
    "UnsupportedLeafError",
    "ChartField",
    "Conic",
    "LeafKind",
    "LeafAtInfinity",
    "SingularityKind",
    "InfinitySingularity",
    "EscapeTime",
    "to_chart",
    "field_in_chart",
    "infinity_singularities",
    "leaf_at_infinity",
    "escape_quadrature",
]


class Chart(Enum):
    AFFINE = "affine"
    X = "x"
    Y = "y"
    U = "u"
    W = "w"


class ChartDomainError(ValueError):
    """Point sits on the forbidden hyperplane of a transition."""


class UnsupportedChartError(NotImplementedError):
    """No closed form is implemented for this case/chart pair."""


class UnsupportedLeafError(NotImplementedError):
    """The leaf has no supported time-form parametrisation."""


def _div(num, den, what):
    if den == 0:
        raise ChartDomainError(f"{what} requires a nonzero divisor coordinate")
    return num / den


def _to_affine(p, frm: Chart):
    p1, p2, p3 = p
    if frm is Chart.AFFINE:
        return np.array([p1, p2, p3])
    if frm is Chart.X:
        return np.array([_div(p1, p3, "X->affine"), _div(p2, p3, "X->affine"), _div(1.0, p3, "X->affine")])
    if frm is Chart.Y:
        return np.array([_div(p1, p2, "Y->affine"), _div(1.0, p2, "Y->affine"), _div(p3, p2, "Y->affine")])
    if frm is Chart.U:
        return np.array([_div(1.0, p3, "U->affine"), _div(p2, p3, "U->affine"), _div(p1, p3, "U->affine")])
    if frm is Chart.W:
        return np.array([_div(1.0, p1, "W->affine"), _div(p2, p1, "W->affine"), _div(p3, p1, "W->affine")])
    raise ValueError(frm)


def _from_affine(z, to: Chart):
    z1, z2, z3 = z
    if to is Chart.AFFINE:
        return np.array([z1, z2, z3])
    if to is Chart.X:
        return np.array([_div(z1, z3, "affine->X"), _div(z2, z3, "affine->X"), _div(1.0, z3, "affine->X")])
    if to is Chart.Y:
        return np.array([_div(z1, z2, "affine->Y"), _div(1.0, z2, "affine->Y"), _div(z3, z2, "affine->Y")])
    if to is Chart.U:
        return np.array([_div(z3, z1, "affine->U"), _div(z2, z1, "affine->U"), _div(1.0, z1, "affine->U")])
    if to is Chart.W:
        return np.array([_div(1.0, z1, "affine->W"), _div(z2, z1, "affine->W"), _div(z3, z1, "affine->W")])
    raise ValueError(to)


def to_chart(point, frm: Chart, to: Chart):
    """Rational chart transition; raises ChartDomainError off its domain."""
    point = np.asarray(point)
    if point.shape != (3,):
        raise ValueError("chart points are 3-vectors")
    return _from_affine(_to_affine(point, frm), to)


@dataclass(frozen=True)
class ChartField:
    """Pushed-forward field: polynomial part over one divisor coordinate."""

    case: Case
    chart: Chart
    poly: Callable
    prefactor_index: int
    infinity_indices: tuple[int, int]

    def eval(self, p):
        p = np.asarray(p)
        return self.poly(p) / p[self.prefactor_index]

    def prefactor(self, p):
        return 1.0 / np.asarray(p)[self.prefactor_index]

    def infinity_components(self, c1, c2):
        """Representative of the induced foliation at the divisor."""
        p = np.zeros(3, dtype=np.result_type(c1, c2, 1.0))
        i, j = self.infinity_indices
        p[i] = c1
        p[j] = c2
        v = self.poly(p)
        return np.array([v[i], v[j]])


def field_in_chart(f: EAField, chart: Chart) -> ChartField:
    """Closed-form pushforward for the supported case/chart pairs."""
    d = float(f.delta)
    if chart is Chart.X:
        if f.case is Case.CASE1:
            a, b, c = f.coeffs

            def poly(p):
                x1, x2, x3 = p
                return d * np.array(
                    [x2 * (a - c * x1 * x1), x1 * (b - c * x2 * x2), -c * x1 * x2 * x3]
                )

        elif f.case is Case.CASE2:
            a, b = f.coeffs

            def poly(p):
                x1, x2, x3 = p
                return d * np.array(
                    [
                        b * (x2 * x2 - x1 * x1 + 1.0) - a * x1 * x1 * x2,
                        x1 * (a * (1.0 - x2 * x2) - 2.0 * b * x2),
                        -x1 * x3 * (a * x2 + b),
                    ]
                )

        elif f.case is Case.CASE3:
            a, b = f.coeffs

            def poly(p):
                x1, x2, x3 = p
                return d * np.array(
                    [b - a * x1 * x1, -x1 * (b + 2.0 * a * x2), -a * x1 * x3]
                )

        else:
            zeta, nu = f.coeffs
            k = zeta * nu * nu
            zn = zeta * nu

            def poly(p):
                x1, x2, x3 = p
                return d * k * np.array(
                    [2.0 * x1 - zn, zn * x1 - x1 * x1 + 2.0 * x2, x3]
                )

        return ChartField(f.case, chart, poly, 2, (0, 1))

    if chart is Chart.Y and f.case is Case.CASE3:
        a, b = f.coeffs

        def poly(p):
            v1, v2, v3 = p
            return d * np.array(
                [
                    a * v1 * v1 + b * v3 * (v1 * v1 + v3),
                    v1 * v2 * (a + b * v3),
                    v1 * v3 * (2.0 * a + b * v3),
                ]
            )

        return ChartField(f.case, chart, poly, 1, (0, 2))

    if chart is Chart.Y and f.case is Case.CASE4:
        zeta, nu = f.coeffs
        k = zeta * nu * nu
        zn = zeta * nu

        def poly(p):
            v1, v2, v3 = p
            return d * k * np.array(
                [
                    v1**3 - zn * v1 * v1 * v3 - zn * v3 * v3,
                    v2 * (v1 * v1 - v3 - zn * v1 * v3),
                    v3 * (v1 * v1 - 2.0 * v3 - zn * v1 * v3),
                ]
            )

        return ChartField(f.case, chart, poly, 1, (0, 2))

    if chart is Chart.W and f.case is Case.CASE3:
        a, b = f.coeffs

        def poly(p):
            w1, w2, w3 = p
            return d * np.array(
                [
                    -b * w1 * w3 * w3,
                    -(a * w2 + b * w3 + b * w2 * w3 * w3),
                    w3 * (a - b * w3 * w3),
                ]
            )

        return ChartField(f.case, chart, poly, 0, (2, 1))

    raise UnsupportedChartError(f"no closed form for case {int(f.case)} in chart {chart.value}")


def _infinity_rep(f: EAField, chart: Chart):
    """Cleared polynomial representative of the foliation at infinity,
    as a callable on the 2D chart coordinates."""
    d = float(f.delta)
    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        if chart is Chart.X:
            return lambda x1, x2: d * np.array(
                [x2 * (a - c * x1 * x1), x1 * (b - c * x2 * x2)]
            )
        if chart is Chart.Y:
            return lambda y1, y2: d * np.array(
                [y2 * (a - b * y1 * y1), y1 * (c - b * y2 * y2)]
            )
        if chart is Chart.U:
            return lambda u1, u2: d * np.array(
                [u2 * (c - a * u1 * u1), u1 * (b - a * u2 * u2)]
            )
    elif f.case is Case.CASE2:
        a, b = f.coeffs
        if chart is Chart.X:
            return lambda x1, x2: d * np.array(
                [
                    b * (x2 * x2 - x1 * x1 + 1.0) - a * x1 * x1 * x2,
                    x1 * (a * (1.0 - x2 * x2) - 2.0 * b * x2),
                ]
            )
        if chart is Chart.Y:
            return lambda y1, y2: d * np.array(
                [
                    b * (1.0 + y1 * y1 + y2 * y2) - a * y1 * y1 * y2,
                    y1 * (a + 2.0 * b * y2 - a * y2 * y2),
                ]
            )
        if chart is Chart.U:
            return lambda u1, u2: d * np.array(
                [
                    a * u2 - b * u1 * (u1 * u1 + u2 * u2 - 1.0),
                    a * u1 - b * u2 * (u1 * u1 + u2 * u2 + 1.0),
                ]
            )
    elif f.case is Case.CASE3:
        a, b = f.coeffs
        if chart is Chart.X:
            return lambda x1, x2: d * np.array(
                [b - a * x1 * x1, -x1 * (b + 2.0 * a * x2)]
            )
        if chart is Chart.Y:
            return lambda y1, y2: d * np.array(
                [a * y1 * y1 + b * y1 * y1 * y2 + b * y2 * y2, y1 * y2 * (2.0 * a + b * y2)]
            )
        if chart is Chart.U:
            return lambda u1, u2: d * np.array(
                [u1 * (a - b * u1 * u1), -(b * u1 + a * u2 + b * u1 * u1 * u2)]
            )
    else:
        zeta, nu = f.coeffs
        k = zeta * nu * nu
        zn = zeta * nu
        if chart is Chart.X:
            return lambda x1, x2: d * k * np.array(
                [2.0 * x1 - zn, zn * x1 - x1 * x1 + 2.0 * x2]
            )
        if chart is Chart.Y:
            return lambda y1, y2: d * k * np.array(
                [
                    y1**3 - zn * y1 * y1 * y2 - zn * y2 * y2,
                    y2 * (y1 * y1 - zn * y1 * y2 - 2.0 * y2),
                ]
            )
        if chart is Chart.U:
            return lambda u1, u2: d * k * np.array(
                [-u1 * u1 * (2.0 - zn * u1), zn * u1 + zn * u1 * u1 * u2 - 1.0]
            )
    raise UnsupportedChartError(f"case {int(f.case)} chart {chart.value}")


class SingularityKind(Enum):
    IDEMPOTENT_TYPE = "idempotent-type"
    AXIS_POINT = "axis-point"
    SADDLE = "saddle"
    CENTER = "center"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class InfinitySingularity:
    chart: Chart
    coords: tuple[float, float]
    kind: SingularityKind
    label: str


def _certified(f, chart, coords, kind, label):
    rep = _infinity_rep(f, chart)
    res = float(np.max(np.abs(rep(coords[0], coords[1]))))
    scale = max(1.0, float(np.max(np.abs(f.coeffs)))) * max(
        1.0, float(np.hypot(coords[0], coords[1])) ** 3
    )
    if res > 1e-10 * scale:
        raise ArithmeticError(
            f"singularity {label} at {coords} in {chart.value}-chart has residual {res:.3e}"
        )
    return InfinitySingularity(chart, (float(coords[0]), float(coords[1])), kind, label)


def _origin_kind(prod: float) -> SingularityKind:
    """Linearisation with eigenvalue pair +-sqrt(prod)."""
    if prod > 0:
        return SingularityKind.SADDLE
    if prod < 0:
        return SingularityKind.CENTER
    return SingularityKind.DEGENERATE


def infinity_singularities(f: EAField) -> list[InfinitySingularity]:
    """Singular points of the foliation at infinity, per case (real mode).

    Every returned point is certified to annihilate the chart
    representative of the foliation.  Degenerate parameter sub-cases
    whose infinity singular set is not a finite point list raise
    UnsupportedChartError.
    """
    if f.mode != "real":
        raise ValueError("infinity singularities are enumerated in real mode only")
    out = []
    tiny = 1e-12
    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        if abs(c) <= tiny * max(1.0, abs(a), abs(b)):
            if abs(a) <= tiny:
                raise UnsupportedChartError("zero field has no isolated singularities")
            return [_certified(f, Chart.X, (0.0, 0.0), SingularityKind.CENTER, "q_x")]
        if abs(a) <= tiny or abs(b) <= tiny:
            raise UnsupportedChartError(
                "linear sub-case (a b = 0) has non-isolated infinity singularities"
            )
        if a * b > 0:
            sa, sb = math.sqrt(a / c), math.sqrt(b / c)
            for i, (s1, s2) in enumerate(((1, 1), (-1, 1), (-1, -1), (1, -1)), start=1):
                out.append(
                    _certified(
                        f,
                        Chart.X,
                        (s1 * sa, s2 * sb),
                        SingularityKind.IDEMPOTENT_TYPE,
                        f"p{i}",
                    )
                )
            out.append(_certified(f, Chart.X, (0.0, 0.0), SingularityKind.AXIS_POINT, "q_x"))
            out.append(_certified(f, Chart.Y, (0.0, 0.0), SingularityKind.AXIS_POINT, "q_y"))
            out.append(_certified(f, Chart.U, (0.0, 0.0), SingularityKind.AXIS_POINT, "q_u"))
        else:
            out.append(_certified(f, Chart.X, (0.0, 0.0), _origin_kind(a * b), "q_x"))
            out.append(_certified(f, Chart.Y, (0.0, 0.0), _origin_kind(a * c), "q_y"))
            out.append(_certified(f, Chart.U, (0.0, 0.0), _origin_kind(b * c), "q_u"))
    elif f.case is Case.CASE2:
        a, b = f.coeffs
        if abs(a) <= tiny:
            pts = [(1.0, 0.0), (-1.0, 0.0)]
        else:
            s = math.hypot(a, b)
            rho2 = (-b + s) / a if b > 0 else (-b - s) / a
            rho1 = math.sqrt(2.0 * b * rho2 / a)
            pts = [(rho1, rho2), (-rho1, rho2)]
        for i, p in enumerate(pts, start=1):
            out.append(_certified(f, Chart.X, p, SingularityKind.IDEMPOTENT_TYPE, f"p{i}"))
        out.append(_certified(f, Chart.U, (0.0, 0.0), SingularityKind.SADDLE, "q_u"))
    elif f.case is Case.CASE3:
        a, b = f.coeffs
        if abs(a) <= tiny:
            raise UnsupportedChartError(
                "single-eigenvalue sub-case (a = 0) has non-isolated infinity singularities"
            )
        if a * b > 0:
            s = math.sqrt(b / a)
            out.append(
                _certified(f, Chart.X, (s, -b / (2 * a)), SingularityKind.IDEMPOTENT_TYPE, "p1")
            )
            out.append(
                _certified(f, Chart.X, (-s, -b / (2 * a)), SingularityKind.IDEMPOTENT_TYPE, "p2")
            )
        out.append(_certified(f, Chart.Y, (0.0, 0.0), SingularityKind.DEGENERATE, "q_y"))
        out.append(_certified(f, Chart.U, (0.0, 0.0), SingularityKind.SADDLE, "q_u"))
    else:
        zeta, nu = f.coeffs
        zn = zeta * nu
        out.append(
            _certified(
                f, Chart.X, (zn / 2.0, -zn * zn / 8.0), SingularityKind.IDEMPOTENT_TYPE, "p"
            )
        )
        out.append(_certified(f, Chart.Y, (0.0, 0.0), SingularityKind.DEGENERATE, "q"))
    return out


class Conic(Enum):
    ELLIPSE = "ellipse"
    HYPERBOLA = "hyperbola"
    PARABOLA = "parabola"
    LINE = "line"
    DEGENERATE = "degenerate"


class LeafKind(Enum):
    C1_LINE = "c1-line"
    C1_PLANE_X1 = "c1-plane-x1"
    C1_PLANE_X2 = "c1-plane-x2"
    C1_GENERIC = "c1-generic"
    C3_PARABOLA = "c3-parabola"
    C3_VLINE = "c3-vline"
    C4_PARABOLA = "c4-parabola"
    C4_VLINE = "c4-vline"
    OTHER = "other"


@dataclass(frozen=True)
class LeafAtInfinity:
    """Projection of an invariant cone on the plane at infinity."""

    K: float
    conic: Conic
    kind: LeafKind
    param_bounds: tuple[float, float] | None = None
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EscapeTime:
    finite: bool
    value: float


def _interval_around(p0, marks):
    """Open interval between consecutive marks (sorted, +-inf padded)
    containing p0."""
    pts = sorted(marks)
    lo = -math.inf
    hi = math.inf
    for m in pts:
        if m <= p0:
            lo = m
        else:
            hi = m
            break
    return (lo, hi)


def leaf_at_infinity(f: EAField, direction) -> LeafAtInfinity:
    """Leaf of the foliation at infinity carrying the cone through
    ``direction`` (real mode)."""
    if f.mode != "real":
        raise ValueError("leaf classification is real-mode only")
    d = np.asarray(direction, dtype=float)
    nrm = float(np.linalg.norm(d))
    if nrm == 0.0:
        raise ValueError("direction must be nonzero")
    d = d / nrm
    i1, i2 = first_integrals(f, d)
    iscale = max(1.0, float(np.max(np.abs(f.iparams))))
    if abs(i1) <= 1e-12 * iscale and abs(i2) <= 1e-12 * iscale:
        # the invariant cone degenerates to an idempotent ray
        return LeafAtInfinity(math.nan, Conic.DEGENERATE, LeafKind.OTHER)
    K = i1 / i2 if i2 != 0.0 else math.inf
    qtol = 1e-9 * iscale * max(1.0, abs(i1), abs(i2))
    z1, z2, z3 = d

    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        nu1, nu2, nu3 = f.iparams
        q1, q2, q3 = i2 - nu1 * i1, i2 - nu2 * i1, i2 - nu3 * i1
        if abs(q3) <= qtol and a * b > 0:
            slope = math.copysign(math.sqrt(b / a), z1 * z2)
            x1 = z1 / z3 if z3 != 0.0 else math.inf
            bounds = _interval_around(
                x1, [-math.sqrt(a / c), 0.0, math.sqrt(a / c)]
            ) if math.isfinite(x1) else (math.sqrt(a / c), math.inf)
            return LeafAtInfinity(
                K, Conic.LINE, LeafKind.C1_LINE, bounds, {"slope": slope, "phi0": x1}
            )
        if abs(q1) <= qtol and a * b > 0:
            m = math.copysign(math.sqrt(b / c), z2 * z3 if z3 != 0 else z2)
            x1 = z1 / z3 if z3 != 0.0 else math.inf
            bounds = _interval_around(x1, [-math.sqrt(a / c), math.sqrt(a / c)])
            return LeafAtInfinity(
                K, Conic.LINE, LeafKind.C1_PLANE_X2, bounds, {"m": m, "phi0": x1}
            )
        if abs(q2) <= qtol and a * b > 0:
            m = math.copysign(math.sqrt(a / c), z1 * z3 if z3 != 0 else z1)
            x2 = z2 / z3 if z3 != 0.0 else math.inf
            bounds = _interval_around(x2, [-math.sqrt(b / c), math.sqrt(b / c)])
            return LeafAtInfinity(
                K, Conic.LINE, LeafKind.C1_PLANE_X1, bounds, {"m": m, "phi0": x2}
            )
        if abs(q1) <= qtol or abs(q2) <= qtol:
            return LeafAtInfinity(K, Conic.LINE, LeafKind.OTHER)
        conic = Conic.ELLIPSE if q1 * q2 > 0 else Conic.HYPERBOLA
        data = {"q1": q1, "q2": q2, "q3": q3}
        bounds = None
        if conic is Conic.ELLIPSE and a * b > 0 and z3 != 0.0:
            alpha1 = math.sqrt(q3 / q1)
            alpha2 = math.sqrt(q3 / q2)
            th0 = math.atan2((z2 / z3) / alpha2, (z1 / z3) / alpha1)
            th1 = math.atan2(math.sqrt(b / c) / alpha2, math.sqrt(a / c) / alpha1)
            marks = [th1, math.pi - th1, -th1, -math.pi + th1]
            bounds = _interval_around(th0, sorted(marks + [m + 2 * math.pi for m in marks] + [m - 2 * math.pi for m in marks]))
            data.update({"alpha1": alpha1, "alpha2": alpha2, "phi0": th0})
            return LeafAtInfinity(K, conic, LeafKind.C1_GENERIC, bounds, data)
        return LeafAtInfinity(K, conic, LeafKind.OTHER, None, data)

    if f.case is Case.CASE3:
        a, b = f.coeffs
        eta, nu, zeta = f.iparams
        qlam = i2 - nu * i1
        if abs(z3) <= 1e-12:
            return LeafAtInfinity(K, Conic.LINE, LeafKind.OTHER)
        x1 = z1 / z3
        x2 = z2 / z3
        if abs(qlam) <= qtol and a * b > 0:
            m = math.copysign(math.sqrt(b / a), x1)
            bounds = _interval_around(x2, [-b / (2.0 * a)])
            return LeafAtInfinity(
                K, Conic.LINE, LeafKind.C3_VLINE, bounds, {"m": m, "phi0": x2}
            )
        marks = []
        if a * b > 0:
            s = math.sqrt(b / a)
            marks = [-s, s]
        bounds = _interval_around(x1, marks)
        return LeafAtInfinity(
            K, Conic.PARABOLA, LeafKind.C3_PARABOLA, bounds, {"phi0": x1}
        )

    if f.case is Case.CASE4:
        zeta, nu = f.coeffs
        zn = zeta * nu
        qlam = i2 - nu * i1
        if abs(z3) <= 1e-12:
            return LeafAtInfinity(K, Conic.LINE, LeafKind.OTHER)
        x1 = z1 / z3
        if abs(qlam) <= qtol:
            return LeafAtInfinity(K, Conic.LINE, LeafKind.C4_VLINE, None, {"phi0": x1})
        bounds = _interval_around(x1, [zn / 2.0])
        return LeafAtInfinity(
            K, Conic.PARABOLA, LeafKind.C4_PARABOLA, bounds, {"phi0": x1}
        )

    # case 2: classification only
    a, b = f.coeffs
    eta, gamma, zeta = f.iparams
    A = i2 - eta * i1
    Bq = i2 - gamma * i1
    if abs(A) <= qtol or abs(Bq) <= qtol:
        conic = Conic.PARABOLA
    elif A * Bq > 0:
        conic = Conic.ELLIPSE
    else:
        conic = Conic.HYPERBOLA
    return LeafAtInfinity(K, conic, LeafKind.OTHER)


def _u_of_kind(f: EAField, leaf: LeafAtInfinity):
    """(u(phi), C-denominator extras) for the supported leaf kinds."""
    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        if leaf.kind in (LeafKind.C1_LINE, LeafKind.C1_PLANE_X2):
            return lambda p: a - c * p * p
        if leaf.kind is LeafKind.C1_PLANE_X1:
            return lambda p: b - c * p * p
        if leaf.kind is LeafKind.C1_GENERIC:
            al1 = leaf.data["alpha1"]
            return lambda p: c * al1 * al1 * math.cos(p) ** 2 - a
    if f.case is Case.CASE3:
        a, b = f.coeffs
        if leaf.kind is LeafKind.C3_PARABOLA:
            return lambda p: b - a * p * p
        if leaf.kind is LeafKind.C3_VLINE:
            return lambda p: b + 2.0 * a * p
    if f.case is Case.CASE4:
        zeta, nu = f.coeffs
        if leaf.kind is LeafKind.C4_PARABOLA:
            return lambda p: 2.0 * p - zeta * nu
    raise UnsupportedLeafError(f"no time-form parametrisation for leaf kind {leaf.kind}")


def escape_quadrature(f: EAField, leaf: LeafAtInfinity, z0, endpoint: float) -> EscapeTime:
    """Travel time from z0 to a leaf endpoint along the invariant cone.

    ``endpoint`` is a parameter value of the leaf parametrisation (the
    chart coordinate, or the angle for an ellipse arc); +-inf endpoints
    come back infinite (the integrand decays too slowly), finite
    endpoints must be simple zeros of the leaf's u-function and give a
    convergent inverse-square-root integral, evaluated to absolute
    accuracy ~1e-10 with an endpoint substitution.
    """
    if f.mode != "real":
        raise ValueError("escape quadrature is real-mode only")
    z0 = np.asarray(z0, dtype=float)
    if z0[2] == 0.0:
        raise UnsupportedLeafError("starting point must have z3 != 0 (x-chart height)")
    u = _u_of_kind(f, leaf)
    h0 = 1.0 / z0[2]  # x-chart height of the start point

    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        if leaf.kind is LeafKind.C1_LINE:
            phi0 = z0[0] / z0[2]
            C = abs(h0) / (abs(leaf.data["slope"]) * math.sqrt(abs(u(phi0))))
            integrand = lambda p: 1.0 / (abs(p) * math.sqrt(abs(u(p))))
            if math.isinf(endpoint):
                raise UnsupportedLeafError(
                    "the line leaf crosses the chart divisor at parameter infinity"
                )
            if endpoint == 0.0:
                return EscapeTime(False, math.inf)
        elif leaf.kind in (LeafKind.C1_PLANE_X1, LeafKind.C1_PLANE_X2):
            phi0 = (z0[0] if leaf.kind is LeafKind.C1_PLANE_X2 else z0[1]) / z0[2]
            C = abs(h0) / (abs(leaf.data["m"]) * math.sqrt(abs(u(phi0))))
            integrand = lambda p: 1.0 / math.sqrt(abs(u(p)))
            if math.isinf(endpoint):
                return EscapeTime(False, math.inf)
        elif leaf.kind is LeafKind.C1_GENERIC:
            phi0 = leaf.data["phi0"]
            al1, al2 = leaf.data["alpha1"], leaf.data["alpha2"]
            C = abs(al1 * h0) / (abs(al2) * math.sqrt(abs(u(phi0))))
            integrand = lambda p: 1.0 / math.sqrt(abs(u(p)))
            if math.isinf(endpoint):
                raise UnsupportedLeafError("ellipse arcs have finite angular endpoints")
        else:
            raise UnsupportedLeafError(f"unsupported case-1 leaf kind {leaf.kind}")
    elif f.case is Case.CASE3:
        if leaf.kind is LeafKind.C3_PARABOLA:
            phi0 = z0[0] / z0[2]
            C = abs(h0) / math.sqrt(abs(u(phi0)))
        elif leaf.kind is LeafKind.C3_VLINE:
            phi0 = z0[1] / z0[2]
            C = abs(h0) / (abs(leaf.data["m"]) * math.sqrt(abs(u(phi0))))
        else:
            raise UnsupportedLeafError(f"unsupported case-3 leaf kind {leaf.kind}")
        integrand = lambda p: 1.0 / math.sqrt(abs(u(p)))
        if math.isinf(endpoint):
            return EscapeTime(False, math.inf)
    elif f.case is Case.CASE4:
        zeta, nu = f.coeffs
        if leaf.kind is not LeafKind.C4_PARABOLA:
            raise UnsupportedLeafError(f"unsupported case-4 leaf kind {leaf.kind}")
        phi0 = z0[0] / z0[2]
        C = abs(h0) / (abs(zeta * nu * nu) * math.sqrt(abs(u(phi0))))
        integrand = lambda p: 1.0 / math.sqrt(abs(u(p)))
        if math.isinf(endpoint):
            return EscapeTime(False, math.inf)
    else:
        raise UnsupportedLeafError("case-2 leaves have no implemented time form")

    uscale = max(abs(u(phi0)), 1e-300)
    if abs(u(endpoint)) > 1e-6 * uscale:
        raise ValueError(
            "endpoint is not a singular endpoint of this leaf "
            f"(u(endpoint) = {u(endpoint):.3e})"
        )
    # endpoint substitution: phi = endpoint - sign * s^2 removes the
    # inverse-square-root singularity
    sign = 1.0 if endpoint > phi0 else -1.0
    smax = math.sqrt(abs(endpoint - phi0))

    def g(s):
        return 2.0 * s * integrand(endpoint - sign * s * s)

    val, _ = quad(g, 0.0, smax, epsabs=1e-12, epsrel=1e-10, limit=200)
    return EscapeTime(True, C * abs(val))
