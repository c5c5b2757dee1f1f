"""Quadratic geodesic-flow fields on sl(2) and their first integrals.

For an invertible B-self-adjoint map Phi, geodesics of the left-invariant
metric q(x, y) = B(Phi x, y) correspond to integral curves of the
quadratic field z' = [z, Phi^-1 z].  In each adapted normal-form basis
this field has an explicit polynomial shape, with coefficients derived
from the inverse-map parameters (delta is the basis bracket sign and
multiplies the whole field):

* case 1 (nu_i = 1/l_i, a = nu2 - nu3, b = nu3 - nu1, c = a + b):
    (a z2 z3,  b z1 z3,  c z1 z2)
* case 2 (a = gamma - eta, b = zeta != 0):
    (b (z2^2 + z3^2),  z1 (a z3 - b z2),  z1 (a z2 + b z3))
* case 3 (a = eta - nu, b = zeta nu^2 != 0):
    (b z3^2,  -z1 (a z2 + b z3),  a z1 z3)
* case 4 (overall factor zeta nu^2 kept explicit):
    zeta nu^2 (z3 (z1 - zeta nu z3),  z2 z3 - z1^2 + zeta nu z1 z3,  -z3^2)

The conserved quantities are I1 = B(z, z) and I2 = B(z, Phi^-1 z); their
coordinate forms per case live in ``first_integrals``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import bracket_coords
from .normal_form import Case, NormalForm, SingularMapError, invert_params

__all__ = [
    "EAField",
    "build_field",
    "field_from_coeffs",
    "eval_field",
    "lax_rhs",
    "first_integrals",
    "first_integral_gradients",
    "group_reconstruct",
]


@dataclass(frozen=True)
class EAField:
    """Case-specific quadratic field in an adapted basis.

    ``coeffs`` are the polynomial coefficients listed in the module
    docstring ((a, b, c) / (a, b) / (a, b) / (zeta, nu)); ``iparams`` are
    the inverse-map parameters needed by the first integrals
    ((nu1, nu2, nu3) / (eta, gamma, zeta) / (eta, nu, zeta) / (nu, zeta)).
    """

    case: Case
    coeffs: tuple
    iparams: tuple
    delta: int = 1
    mode: str = "real"

    def __post_init__(self):
        if self.case is Case.CASE1:
            a, b, c = self.coeffs
            if abs(c - (a + b)) > 1e-12 * max(1.0, abs(a), abs(b)):
                raise ValueError("case-1 coefficients must satisfy c = a + b")
        elif self.case is Case.CASE2:
            if self.coeffs[1] == 0:
                raise ValueError("case-2 coefficient b must be nonzero")
        elif self.case is Case.CASE3:
            if self.coeffs[1] == 0:
                raise ValueError("case-3 coefficient b must be nonzero")
        elif self.case is Case.CASE4:
            if self.coeffs[0] == 0 or self.coeffs[1] == 0:
                raise ValueError("case-4 parameters zeta, nu must be nonzero")
        if self.delta not in (-1, 1):
            raise ValueError("delta must be +-1")


def build_field(nf: NormalForm) -> EAField:
    """Field of the Lax system in the adapted basis of a normal form."""
    inv = invert_params(nf)
    if nf.case is Case.CASE1:
        nu1, nu2, nu3 = inv
        coeffs = (nu2 - nu3, nu3 - nu1, nu2 - nu1)
    elif nf.case is Case.CASE2:
        eta, gamma, zeta = inv
        coeffs = (gamma - eta, zeta)
    elif nf.case is Case.CASE3:
        eta, nu, zeta = inv
        coeffs = (eta - nu, zeta * nu * nu)
    else:
        nu, zeta = inv
        coeffs = (zeta, nu)
    return EAField(nf.case, coeffs, inv, nf.delta, nf.mode)


def field_from_coeffs(case: Case, coeffs, delta: int = 1, mode: str = "real") -> EAField:
    """Field from raw coefficients, synthesising consistent first-integral
    parameters (case 1 pins nu1 = 0; the integrals differ from the metric
    ones by a multiple of I1, which is still conserved)."""
    case = Case(case)
    if case is Case.CASE1:
        a, b = coeffs[0], coeffs[1]
        coeffs = (a, b, a + b)
        iparams = (0.0, a + b, b)
    elif case is Case.CASE2:
        a, b = coeffs
        iparams = (0.0, a, b)  # eta = 0, gamma = a, zeta = b
    elif case is Case.CASE3:
        a, b = coeffs
        # eta - nu = a and zeta nu^2 = b with nu = 1
        iparams = (a + 1.0, 1.0, b)
    else:
        zeta, nu = coeffs
        iparams = (nu, zeta)
        coeffs = (zeta, nu)
    return EAField(case, tuple(coeffs), iparams, delta, mode)


def eval_field(f: EAField, z):
    """Right-hand side of the flow at z (adapted coordinates).

    Accepts a single 3-vector or an (..., 3) array.
    """
    z = np.asarray(z)
    z1, z2, z3 = z[..., 0], z[..., 1], z[..., 2]
    if f.case is Case.CASE1:
        a, b, c = f.coeffs
        out = np.stack([a * z2 * z3, b * z1 * z3, c * z1 * z2], axis=-1)
    elif f.case is Case.CASE2:
        a, b = f.coeffs
        out = np.stack(
            [b * (z2 * z2 + z3 * z3), z1 * (a * z3 - b * z2), z1 * (a * z2 + b * z3)],
            axis=-1,
        )
    elif f.case is Case.CASE3:
        a, b = f.coeffs
        out = np.stack(
            [b * z3 * z3, -z1 * (a * z2 + b * z3), a * z1 * z3], axis=-1
        )
    else:
        zeta, nu = f.coeffs
        k = zeta * nu * nu
        out = np.stack(
            [
                k * z3 * (z1 - zeta * nu * z3),
                k * (z2 * z3 - z1 * z1 + zeta * nu * z1 * z3),
                -k * z3 * z3,
            ],
            axis=-1,
        )
    return f.delta * out


def lax_rhs(phi, z):
    """[z, Phi^-1 z] in standard coordinates (basis-independent form)."""
    phi = np.asarray(phi)
    z = np.asarray(z)
    scale = max(1.0, float(np.max(np.abs(phi))))
    if abs(np.linalg.det(phi)) <= 1e-13 * scale**3:
        raise SingularMapError("phi is numerically singular")
    return bracket_coords(z, np.linalg.solve(phi, z))


def first_integrals(f: EAField, z):
    """(I1, I2) = (B(z, z), B(z, Phi^-1 z)) in adapted coordinates."""
    z = np.asarray(z)
    z1, z2, z3 = z[..., 0], z[..., 1], z[..., 2]
    if f.case in (Case.CASE1, Case.CASE2):
        i1 = z1 * z1 + z2 * z2 - z3 * z3
        if f.case is Case.CASE1:
            nu1, nu2, nu3 = f.iparams
            i2 = nu1 * z1 * z1 + nu2 * z2 * z2 - nu3 * z3 * z3
        else:
            eta, gamma, zeta = f.iparams
            i2 = eta * z1 * z1 + gamma * (z2 * z2 - z3 * z3) + 2.0 * zeta * z2 * z3
    else:
        i1 = z1 * z1 + 2.0 * z2 * z3
        if f.case is Case.CASE3:
            eta, nu, zeta = f.iparams
            i2 = eta * z1 * z1 + 2.0 * nu * z2 * z3 - zeta * nu * nu * z3 * z3
        else:
            nu, zeta = f.iparams
            i2 = nu * i1 - 2.0 * zeta * nu * nu * z1 * z3 + zeta * zeta * nu**3 * z3 * z3
    return i1, i2


def first_integral_gradients(f: EAField, z):
    """Gradients (dI1, dI2) at z; used to certify conservation pointwise."""
    z = np.asarray(z)
    z1, z2, z3 = z[..., 0], z[..., 1], z[..., 2]
    if f.case in (Case.CASE1, Case.CASE2):
        g1 = np.stack([2 * z1, 2 * z2, -2 * z3], axis=-1)
        if f.case is Case.CASE1:
            nu1, nu2, nu3 = f.iparams
            g2 = np.stack([2 * nu1 * z1, 2 * nu2 * z2, -2 * nu3 * z3], axis=-1)
        else:
            eta, gamma, zeta = f.iparams
            g2 = np.stack(
                [
                    2 * eta * z1,
                    2 * gamma * z2 + 2 * zeta * z3,
                    -2 * gamma * z3 + 2 * zeta * z2,
                ],
                axis=-1,
            )
    else:
        g1 = np.stack([2 * z1, 2 * z3, 2 * z2], axis=-1)
        if f.case is Case.CASE3:
            eta, nu, zeta = f.iparams
            g2 = np.stack(
                [2 * eta * z1, 2 * nu * z3, 2 * nu * z2 - 2 * zeta * nu * nu * z3],
                axis=-1,
            )
        else:
            nu, zeta = f.iparams
            g2 = np.stack(
                [
                    2 * nu * z1 - 2 * zeta * nu * nu * z3,
                    2 * nu * z3,
                    2 * nu * z2 - 2 * zeta * nu * nu * z1 + 2 * zeta * zeta * nu**3 * z3,
                ],
                axis=-1,
            )
    return g1, g2


def group_reconstruct(x_samples, dt):
    """Integrate a group path from velocity samples in the algebra.

    ``x_samples`` is an (N, 3) array of standard coordinates of x(t) at a
    uniform grid of spacing ``dt`` with N odd: samples at even indices are
    the classical-RK4 nodes and the odd ones supply the midpoints, so the
    scheme is genuinely 4th order in the coarse step H = 2 dt.  Solves
    gamma' = gamma x(t) from the identity, renormalising det(gamma) to 1
    after every step.

    Returns (gammas, truncated): gammas has shape (N//2 + 1, 2, 2) and
    holds the group path at t = 0, H, 2H, ...; truncated is True when a
    non-finite sample cut the integration short.
    """
    from .algebra import to_matrix

    x_samples = np.asarray(x_samples)
    n = x_samples.shape[0]
    if n < 3 or n % 2 == 0:
        raise ValueError("need an odd number (>= 3) of uniformly spaced samples")
    H = 2.0 * dt
    dtype = complex if np.iscomplexobj(x_samples) else float
    gammas = [np.eye(2, dtype=dtype)]
    truncated = False
    g = gammas[0]
    for k in range(0, n - 2, 2):
        if not (
            np.all(np.isfinite(x_samples[k]))
            and np.all(np.isfinite(x_samples[k + 1]))
            and np.all(np.isfinite(x_samples[k + 2]))
        ):
            truncated = True
            break
        x0 = to_matrix(x_samples[k])
        xm = to_matrix(x_samples[k + 1])
        x1 = to_matrix(x_samples[k + 2])
        k1 = g @ x0
        k2 = (g + 0.5 * H * k1) @ xm
        k3 = (g + 0.5 * H * k2) @ xm
        k4 = (g + H * k3) @ x1
        g = g + (H / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        g = g / np.sqrt(det)
        gammas.append(g)
    return np.stack(gammas), truncated
