"""Pure-Python adaptive integration kernel.

Dormand-Prince 5(4) embedded pair with FSAL and PI step control for the
four quadratic flow shapes.  The state is kept in plain Python scalars so
the very same code path serves float and complex data; a ray in complex
time is handled by a constant phase factor multiplying the field.

Termination codes: 0 span completed, 1 blow-up, 2 step collapse,
3 max-steps.  A blow-up is declared only when the sup-norm exceeds
``max_norm`` while the controller step has collapsed below ``min_step``
and a linear fit of 1/||z|| over the last accepted steps extrapolates to
zero at a finite time ahead; slow unbounded growth therefore still ends
with "span completed".

The compiled extension ``sl2flow._core`` mirrors ``integrate_py`` for
float64 data; ``sl2flow.benchmark`` compares the two.
"""

from __future__ import annotations

import math

TERM_SPAN = 0
TERM_BLOWUP = 1
TERM_STEPCOLLAPSE = 2
TERM_MAXSTEPS = 3

# Dormand-Prince 5(4) tableau (FSAL: row 7 propagates the solution).
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_A71, _A73, _A74, _A75, _A76 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_BETA1 = 0.7 / 5.0
_BETA2 = 0.4 / 5.0
_FIT_LEN = 10


def _make_rhs(case, c0, c1, c2, fac):
    """Field evaluation as a scalar-tuple function; fac = delta * phase."""
    if case == 1:
        a, b, c = c0 * fac, c1 * fac, c2 * fac

        def rhs(z1, z2, z3):
            return a * z2 * z3, b * z1 * z3, c * z1 * z2

    elif case == 2:
        a, b = c0 * fac, c1 * fac

        def rhs(z1, z2, z3):
            return (
                b * (z2 * z2 + z3 * z3),
                z1 * (a * z3 - b * z2),
                z1 * (a * z2 + b * z3),
            )

    elif case == 3:
        a, b = c0 * fac, c1 * fac

        def rhs(z1, z2, z3):
            return b * z3 * z3, -z1 * (a * z2 + b * z3), a * z1 * z3

    elif case == 4:
        zeta, nu = c0, c1
        k = zeta * nu * nu * fac
        zn = zeta * nu

        def rhs(z1, z2, z3):
            return (
                k * z3 * (z1 - zn * z3),
                k * (z2 * z3 - z1 * z1 + zn * z1 * z3),
                -k * z3 * z3,
            )

    else:
        raise ValueError(f"unknown case {case}")
    return rhs


def _make_integrals(case, p0, p1, p2):
    if case == 1:
        nu1, nu2, nu3 = p0, p1, p2

        def integrals(z1, z2, z3):
            return (
                z1 * z1 + z2 * z2 - z3 * z3,
                nu1 * z1 * z1 + nu2 * z2 * z2 - nu3 * z3 * z3,
            )

    elif case == 2:
        eta, gamma, zeta = p0, p1, p2

        def integrals(z1, z2, z3):
            return (
                z1 * z1 + z2 * z2 - z3 * z3,
                eta * z1 * z1 + gamma * (z2 * z2 - z3 * z3) + 2.0 * zeta * z2 * z3,
            )

    elif case == 3:
        eta, nu, zeta = p0, p1, p2

        def integrals(z1, z2, z3):
            return (
                z1 * z1 + 2.0 * z2 * z3,
                eta * z1 * z1 + 2.0 * nu * z2 * z3 - zeta * nu * nu * z3 * z3,
            )

    else:
        nu, zeta = p0, p1

        def integrals(z1, z2, z3):
            i1 = z1 * z1 + 2.0 * z2 * z3
            return (
                i1,
                nu * i1 - 2.0 * zeta * nu * nu * z1 * z3 + zeta * zeta * nu**3 * z3 * z3,
            )

    return integrals


def integrate_py(
    case,
    coeffs,
    iparams,
    delta,
    z0,
    t0,
    t1,
    rtol,
    abs_tol,
    max_norm,
    min_step,
    max_steps,
    record,
    phase=1.0,
):
    """Adaptive integration; see module docstring for the contract.

    Returns (ts, zs, term, t_est, drift1, drift2, nsteps, naccept) where
    ts is a list of times, zs a list of (z1, z2, z3) tuples (only the
    endpoints when ``record`` is false) and t_est the extrapolated
    blow-up time (NaN unless term == 1).
    """
    c = list(coeffs) + [0.0] * (3 - len(coeffs))
    p = list(iparams) + [0.0] * (3 - len(iparams))
    rhs = _make_rhs(int(case), c[0], c[1], c[2], delta * phase)
    integrals = _make_integrals(int(case), p[0], p[1], p[2])

    z1, z2, z3 = z0[0], z0[1], z0[2]
    t = float(t0)
    t_end = float(t1)
    span = t_end - t
    if span == 0.0 or not math.isfinite(span):
        raise ValueError("invalid time span")
    sgn = 1.0 if span > 0 else -1.0

    i1_0, i2_0 = integrals(z1, z2, z3)
    s1 = max(1.0, abs(i1_0))
    s2 = max(1.0, abs(i2_0))
    drift1 = 0.0
    drift2 = 0.0

    ts = [t]
    zs = [(z1, z2, z3)]

    f1, f2, f3 = rhs(z1, z2, z3)
    # initial step heuristic
    sc1 = abs_tol + rtol * abs(z1)
    sc2 = abs_tol + rtol * abs(z2)
    sc3 = abs_tol + rtol * abs(z3)
    d0 = math.sqrt((abs(z1) / sc1) ** 2 + (abs(z2) / sc2) ** 2 + (abs(z3) / sc3) ** 2)
    d1 = math.sqrt((abs(f1) / sc1) ** 2 + (abs(f2) / sc2) ** 2 + (abs(f3) / sc3) ** 2)
    if d0 > 1e-5 and d1 > 1e-5:
        h = 0.01 * d0 / d1
    else:
        h = 1e-6 * abs(span)
    h = min(h, abs(span))
    h = max(h, 1e-300)

    err_prev = 1e-4
    nsteps = 0
    naccept = 0
    term = TERM_SPAN
    t_est = float("nan")

    fit_t = [0.0] * _FIT_LEN
    fit_w = [0.0] * _FIT_LEN
    fit_n = 0

    def fit_blowup():
        """Least-squares root of the 1/norm history; NaN when inconsistent."""
        n = min(fit_n, _FIT_LEN)
        if n < 3:
            return float("nan")
        tm = sum(fit_t[:n]) / n
        wm = sum(fit_w[:n]) / n
        stt = 0.0
        stw = 0.0
        for i in range(n):
            dt_ = fit_t[i] - tm
            stt += dt_ * dt_
            stw += dt_ * (fit_w[i] - wm)
        if stt == 0.0:
            return float("nan")
        slope = stw / stt
        if slope * sgn >= 0.0:
            return float("nan")
        root = tm - wm / slope
        if (root - t) * sgn < -10.0 * abs(h):
            return float("nan")
        return root

    while True:
        if nsteps >= max_steps:
            term = TERM_MAXSTEPS
            t_est = t
            break
        remaining = t_end - t
        if sgn * remaining <= 0.0:
            term = TERM_SPAN
            break
        if h < min_step:
            nrm = max(abs(z1), abs(z2), abs(z3))
            root = fit_blowup() if nrm > max_norm else float("nan")
            if root == root:  # not NaN
                term = TERM_BLOWUP
                t_est = root
            else:
                term = TERM_STEPCOLLAPSE
                t_est = t
            break
        h_step = h if h <= sgn * remaining else sgn * remaining
        hs = sgn * h_step

        k2_1, k2_2, k2_3 = rhs(z1 + hs * _A21 * f1, z2 + hs * _A21 * f2, z3 + hs * _A21 * f3)
        k3_1, k3_2, k3_3 = rhs(
            z1 + hs * (_A31 * f1 + _A32 * k2_1),
            z2 + hs * (_A31 * f2 + _A32 * k2_2),
            z3 + hs * (_A31 * f3 + _A32 * k2_3),
        )
        k4_1, k4_2, k4_3 = rhs(
            z1 + hs * (_A41 * f1 + _A42 * k2_1 + _A43 * k3_1),
            z2 + hs * (_A41 * f2 + _A42 * k2_2 + _A43 * k3_2),
            z3 + hs * (_A41 * f3 + _A42 * k2_3 + _A43 * k3_3),
        )
        k5_1, k5_2, k5_3 = rhs(
            z1 + hs * (_A51 * f1 + _A52 * k2_1 + _A53 * k3_1 + _A54 * k4_1),
            z2 + hs * (_A51 * f2 + _A52 * k2_2 + _A53 * k3_2 + _A54 * k4_2),
            z3 + hs * (_A51 * f3 + _A52 * k2_3 + _A53 * k3_3 + _A54 * k4_3),
        )
        k6_1, k6_2, k6_3 = rhs(
            z1 + hs * (_A61 * f1 + _A62 * k2_1 + _A63 * k3_1 + _A64 * k4_1 + _A65 * k5_1),
            z2 + hs * (_A61 * f2 + _A62 * k2_2 + _A63 * k3_2 + _A64 * k4_2 + _A65 * k5_2),
            z3 + hs * (_A61 * f3 + _A62 * k2_3 + _A63 * k3_3 + _A64 * k4_3 + _A65 * k5_3),
        )
        y1 = z1 + hs * (_A71 * f1 + _A73 * k3_1 + _A74 * k4_1 + _A75 * k5_1 + _A76 * k6_1)
        y2 = z2 + hs * (_A71 * f2 + _A73 * k3_2 + _A74 * k4_2 + _A75 * k5_2 + _A76 * k6_2)
        y3 = z3 + hs * (_A71 * f3 + _A73 * k3_3 + _A74 * k4_3 + _A75 * k5_3 + _A76 * k6_3)
        k7_1, k7_2, k7_3 = rhs(y1, y2, y3)

        e1 = hs * (_E1 * f1 + _E3 * k3_1 + _E4 * k4_1 + _E5 * k5_1 + _E6 * k6_1 + _E7 * k7_1)
        e2 = hs * (_E1 * f2 + _E3 * k3_2 + _E4 * k4_2 + _E5 * k5_2 + _E6 * k6_2 + _E7 * k7_2)
        e3 = hs * (_E1 * f3 + _E3 * k3_3 + _E4 * k4_3 + _E5 * k5_3 + _E6 * k6_3 + _E7 * k7_3)

        a1 = abs(z1)
        b1 = abs(y1)
        sc1 = abs_tol + rtol * (a1 if a1 > b1 else b1)
        a2 = abs(z2)
        b2 = abs(y2)
        sc2 = abs_tol + rtol * (a2 if a2 > b2 else b2)
        a3 = abs(z3)
        b3 = abs(y3)
        sc3 = abs_tol + rtol * (a3 if a3 > b3 else b3)
        err = math.sqrt(
            ((abs(e1) / sc1) ** 2 + (abs(e2) / sc2) ** 2 + (abs(e3) / sc3) ** 2) / 3.0
        )

        nsteps += 1
        finite = (
            err == err
            and abs(y1) < math.inf
            and abs(y2) < math.inf
            and abs(y3) < math.inf
        )
        if not finite:
            h = h_step * 0.25
            continue
        if err > 1.0:
            factor = _SAFETY * err**-0.2
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h_step * factor
            continue

        # accepted
        t = t + hs
        z1, z2, z3 = y1, y2, y3
        f1, f2, f3 = k7_1, k7_2, k7_3
        naccept += 1

        i1, i2 = integrals(z1, z2, z3)
        d = abs(i1 - i1_0) / s1
        if d > drift1:
            drift1 = d
        d = abs(i2 - i2_0) / s2
        if d > drift2:
            drift2 = d

        nrm = max(abs(z1), abs(z2), abs(z3))
        fit_t[fit_n % _FIT_LEN] = t
        fit_w[fit_n % _FIT_LEN] = 1.0 / nrm if nrm > 0 else math.inf
        fit_n += 1

        if record:
            ts.append(t)
            zs.append((z1, z2, z3))

        if err < 1e-30:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * err**-_BETA1 * err_prev**_BETA2
            if factor > _MAX_FACTOR:
                factor = _MAX_FACTOR
            elif factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
        err_prev = max(err, 1e-30)
        h = h_step * factor

    if not record or ts[-1] != t:
        ts.append(t)
        zs.append((z1, z2, z3))
    return ts, zs, term, t_est, drift1, drift2, nsteps, naccept
