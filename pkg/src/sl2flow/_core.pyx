# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled float64 integration kernel.

Mirrors ``sl2flow._kernel.integrate_py`` (Dormand-Prince 5(4), FSAL, PI
step control, blow-up extrapolation) for real data.  Selected at import
by ``sl2flow._backend`` when available.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, NAN, fabs, isfinite, pow, sqrt

cnp.import_array()

TERM_SPAN = 0
TERM_BLOWUP = 1
TERM_STEPCOLLAPSE = 2
TERM_MAXSTEPS = 3

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0, A73 = 500.0 / 1113.0, A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0, A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double BETA1 = 0.7 / 5.0
cdef double BETA2 = 0.4 / 5.0
cdef int FIT_LEN = 10


cdef inline void _rhs(int case, double a, double b, double c, double zn,
                      double z1, double z2, double z3, double* out) nogil:
    # coefficients arrive pre-multiplied by delta; zn = zeta*nu for case 4.
    if case == 1:
        out[0] = a * z2 * z3
        out[1] = b * z1 * z3
        out[2] = c * z1 * z2
    elif case == 2:
        out[0] = b * (z2 * z2 + z3 * z3)
        out[1] = z1 * (a * z3 - b * z2)
        out[2] = z1 * (a * z2 + b * z3)
    elif case == 3:
        out[0] = b * z3 * z3
        out[1] = -z1 * (a * z2 + b * z3)
        out[2] = a * z1 * z3
    else:
        # a = delta*zeta*nu^2 acts as the overall factor here
        out[0] = a * z3 * (z1 - zn * z3)
        out[1] = a * (z2 * z3 - z1 * z1 + zn * z1 * z3)
        out[2] = -a * z3 * z3


cdef inline void _integrals(int case, double p0, double p1, double p2,
                            double z1, double z2, double z3, double* out) nogil:
    cdef double i1
    if case == 1:
        out[0] = z1 * z1 + z2 * z2 - z3 * z3
        out[1] = p0 * z1 * z1 + p1 * z2 * z2 - p2 * z3 * z3
    elif case == 2:
        out[0] = z1 * z1 + z2 * z2 - z3 * z3
        out[1] = p0 * z1 * z1 + p1 * (z2 * z2 - z3 * z3) + 2.0 * p2 * z2 * z3
    elif case == 3:
        out[0] = z1 * z1 + 2.0 * z2 * z3
        out[1] = p0 * z1 * z1 + 2.0 * p1 * z2 * z3 - p2 * p1 * p1 * z3 * z3
    else:
        i1 = z1 * z1 + 2.0 * z2 * z3
        out[0] = i1
        out[1] = p0 * i1 - 2.0 * p1 * p0 * p0 * z1 * z3 \
            + p1 * p1 * p0 * p0 * p0 * z3 * z3


def integrate_c(int case, coeffs, iparams, double delta, z0,
                double t0, double t1, double rtol, double abs_tol,
                double max_norm, double min_step, long max_steps, bint record):
    """Float64 twin of sl2flow._kernel.integrate_py (real mode only)."""
    cdef double c0 = 0.0, c1 = 0.0, c2 = 0.0
    cdef double p0 = 0.0, p1 = 0.0, p2 = 0.0
    cs = list(coeffs)
    ps = list(iparams)
    c0 = cs[0]
    c1 = cs[1]
    if len(cs) > 2:
        c2 = cs[2]
    p0 = ps[0]
    p1 = ps[1]
    if len(ps) > 2:
        p2 = ps[2]

    cdef double fa, fb, fc, zn
    if case == 4:
        # iparams for case 4 are (nu, zeta)
        zn = c0 * c1          # zeta*nu
        fa = delta * c0 * c1 * c1
        fb = 0.0
        fc = 0.0
    else:
        fa = delta * c0
        fb = delta * c1
        fc = delta * c2
        zn = 0.0

    cdef double z1 = z0[0], z2 = z0[1], z3 = z0[2]
    cdef double t = t0, t_end = t1
    cdef double span = t_end - t
    if span == 0.0 or not isfinite(span):
        raise ValueError("invalid time span")
    cdef double sgn = 1.0 if span > 0 else -1.0

    cdef double vals[2]
    _integrals(case, p0, p1, p2, z1, z2, z3, vals)
    cdef double i1_0 = vals[0], i2_0 = vals[1]
    cdef double s1 = max(1.0, fabs(i1_0)), s2 = max(1.0, fabs(i2_0))
    cdef double drift1 = 0.0, drift2 = 0.0

    cdef Py_ssize_t cap = 256 if record else 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts = np.empty(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] zs = np.empty((cap, 3), dtype=np.float64)
    cdef Py_ssize_t nrec = 0
    ts[0] = t
    zs[0, 0] = z1
    zs[0, 1] = z2
    zs[0, 2] = z3
    nrec = 1

    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    _rhs(case, fa, fb, fc, zn, z1, z2, z3, k1)

    cdef double sc1 = abs_tol + rtol * fabs(z1)
    cdef double sc2 = abs_tol + rtol * fabs(z2)
    cdef double sc3 = abs_tol + rtol * fabs(z3)
    cdef double d0 = sqrt((z1 / sc1) ** 2 + (z2 / sc2) ** 2 + (z3 / sc3) ** 2)
    cdef double d1 = sqrt((k1[0] / sc1) ** 2 + (k1[1] / sc2) ** 2 + (k1[2] / sc3) ** 2)
    cdef double h
    if d0 > 1e-5 and d1 > 1e-5:
        h = 0.01 * d0 / d1
    else:
        h = 1e-6 * fabs(span)
    if h > fabs(span):
        h = fabs(span)
    if h < 1e-300:
        h = 1e-300

    cdef double err_prev = 1e-4
    cdef long nsteps = 0, naccept = 0
    cdef int term = TERM_SPAN
    cdef double t_est = NAN

    cdef double fit_t[10]
    cdef double fit_w[10]
    cdef long fit_n = 0

    cdef double remaining, h_step, hs
    cdef double y1, y2, y3, e1, e2, e3, err, factor
    cdef double a1, a2, a3, b1, b2, b3, nrm, w, d
    cdef double tm, wm, stt, stw, slope, root
    cdef int i, n
    cdef double tmp1, tmp2, tmp3

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
            nrm = max(fabs(z1), max(fabs(z2), fabs(z3)))
            root = NAN
            n = <int> (fit_n if fit_n < FIT_LEN else FIT_LEN)
            if nrm > max_norm and n >= 3:
                tm = 0.0
                wm = 0.0
                for i in range(n):
                    tm += fit_t[i]
                    wm += fit_w[i]
                tm /= n
                wm /= n
                stt = 0.0
                stw = 0.0
                for i in range(n):
                    stt += (fit_t[i] - tm) * (fit_t[i] - tm)
                    stw += (fit_t[i] - tm) * (fit_w[i] - wm)
                if stt > 0.0:
                    slope = stw / stt
                    if slope * sgn < 0.0:
                        root = tm - wm / slope
                        if (root - t) * sgn < -10.0 * fabs(h):
                            root = NAN
            if isfinite(root):
                term = TERM_BLOWUP
                t_est = root
            else:
                term = TERM_STEPCOLLAPSE
                t_est = t
            break
        h_step = h if h <= sgn * remaining else sgn * remaining
        hs = sgn * h_step

        tmp1 = z1 + hs * A21 * k1[0]
        tmp2 = z2 + hs * A21 * k1[1]
        tmp3 = z3 + hs * A21 * k1[2]
        _rhs(case, fa, fb, fc, zn, tmp1, tmp2, tmp3, k2)
        tmp1 = z1 + hs * (A31 * k1[0] + A32 * k2[0])
        tmp2 = z2 + hs * (A31 * k1[1] + A32 * k2[1])
        tmp3 = z3 + hs * (A31 * k1[2] + A32 * k2[2])
        _rhs(case, fa, fb, fc, zn, tmp1, tmp2, tmp3, k3)
        tmp1 = z1 + hs * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0])
        tmp2 = z2 + hs * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1])
        tmp3 = z3 + hs * (A41 * k1[2] + A42 * k2[2] + A43 * k3[2])
        _rhs(case, fa, fb, fc, zn, tmp1, tmp2, tmp3, k4)
        tmp1 = z1 + hs * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0])
        tmp2 = z2 + hs * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1])
        tmp3 = z3 + hs * (A51 * k1[2] + A52 * k2[2] + A53 * k3[2] + A54 * k4[2])
        _rhs(case, fa, fb, fc, zn, tmp1, tmp2, tmp3, k5)
        tmp1 = z1 + hs * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0])
        tmp2 = z2 + hs * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1])
        tmp3 = z3 + hs * (A61 * k1[2] + A62 * k2[2] + A63 * k3[2] + A64 * k4[2] + A65 * k5[2])
        _rhs(case, fa, fb, fc, zn, tmp1, tmp2, tmp3, k6)
        y1 = z1 + hs * (A71 * k1[0] + A73 * k3[0] + A74 * k4[0] + A75 * k5[0] + A76 * k6[0])
        y2 = z2 + hs * (A71 * k1[1] + A73 * k3[1] + A74 * k4[1] + A75 * k5[1] + A76 * k6[1])
        y3 = z3 + hs * (A71 * k1[2] + A73 * k3[2] + A74 * k4[2] + A75 * k5[2] + A76 * k6[2])
        _rhs(case, fa, fb, fc, zn, y1, y2, y3, k7)

        e1 = hs * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0])
        e2 = hs * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1])
        e3 = hs * (E1 * k1[2] + E3 * k3[2] + E4 * k4[2] + E5 * k5[2] + E6 * k6[2] + E7 * k7[2])

        a1 = fabs(z1)
        b1 = fabs(y1)
        sc1 = abs_tol + rtol * (a1 if a1 > b1 else b1)
        a2 = fabs(z2)
        b2 = fabs(y2)
        sc2 = abs_tol + rtol * (a2 if a2 > b2 else b2)
        a3 = fabs(z3)
        b3 = fabs(y3)
        sc3 = abs_tol + rtol * (a3 if a3 > b3 else b3)
        err = sqrt(((e1 / sc1) ** 2 + (e2 / sc2) ** 2 + (e3 / sc3) ** 2) / 3.0)

        nsteps += 1
        if not (err == err and isfinite(y1) and isfinite(y2) and isfinite(y3)):
            h = h_step * 0.25
            continue
        if err > 1.0:
            factor = SAFETY * pow(err, -0.2)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h = h_step * factor
            continue

        t = t + hs
        z1 = y1
        z2 = y2
        z3 = y3
        k1[0] = k7[0]
        k1[1] = k7[1]
        k1[2] = k7[2]
        naccept += 1

        _integrals(case, p0, p1, p2, z1, z2, z3, vals)
        d = fabs(vals[0] - i1_0) / s1
        if d > drift1:
            drift1 = d
        d = fabs(vals[1] - i2_0) / s2
        if d > drift2:
            drift2 = d

        nrm = max(fabs(z1), max(fabs(z2), fabs(z3)))
        fit_t[fit_n % FIT_LEN] = t
        fit_w[fit_n % FIT_LEN] = 1.0 / nrm if nrm > 0.0 else INFINITY
        fit_n += 1

        if record:
            if nrec >= cap:
                cap *= 2
                ts = np.resize(ts, cap)
                zs = np.resize(zs, (cap, 3))
            ts[nrec] = t
            zs[nrec, 0] = z1
            zs[nrec, 1] = z2
            zs[nrec, 2] = z3
            nrec += 1

        if err < 1e-30:
            factor = MAX_FACTOR
        else:
            factor = SAFETY * pow(err, -BETA1) * pow(err_prev, BETA2)
            if factor > MAX_FACTOR:
                factor = MAX_FACTOR
            elif factor < MIN_FACTOR:
                factor = MIN_FACTOR
        err_prev = err if err > 1e-30 else 1e-30
        h = h_step * factor

    if (not record) or ts[nrec - 1] != t:
        if nrec >= cap:
            cap += 2
            ts = np.resize(ts, cap)
            zs = np.resize(zs, (cap, 3))
        ts[nrec] = t
        zs[nrec, 0] = z1
        zs[nrec, 1] = z2
        zs[nrec, 2] = z3
        nrec += 1
    return (
        np.array(ts[:nrec]),
        np.array(zs[:nrec]),
        term,
        t_est,
        drift1,
        drift2,
        nsteps,
        naccept,
    )
