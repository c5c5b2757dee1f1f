"""Deterministic random generators for self-adjoint maps and flows.

Maps are produced by conjugating a normal-form template by a random
isometry of the Killing form (an exponential of a Gram-antisymmetric
matrix), composed with a pseudo-orthonormal seed basis for the Jordan
cases.  Parameters are kept away from the degeneracy boundaries so the
reduction is unambiguous at double precision.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .algebra import GRAM_STANDARD
from .normal_form import Case, template

__all__ = [
    "PON_SEED",
    "so21_element",
    "random_isometry",
    "random_params",
    "random_phi",
    "random_unit",
]

# columns: a pseudo-orthonormal basis expressed in the standard basis
PON_SEED = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)],
        [0.0, 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)],
    ]
)


def so21_element(p, q, r):
    """Gram-antisymmetric matrix: A^T G + G A = 0 for G = diag(1,1,-1)."""
    return np.array([[0.0, -p, q], [p, 0.0, r], [q, r, 0.0]])


def random_isometry(rng, scale: float = 0.6):
    """Isometry of the Killing form in the identity component."""
    p, q, r = rng.uniform(-scale, scale, size=3)
    return expm(so21_element(p, q, r))


def _signed_uniform(rng, lo, hi):
    return rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)


def random_params(case: Case, rng, complete: bool | None = None):
    """Normal-form parameters with safe separations.

    For cases 1 and 3, ``complete`` forces the completeness class of the
    resulting metric (None leaves it to chance).
    """
    case = Case(case)
    if case is Case.CASE1:
        while True:
            lam = np.array([_signed_uniform(rng, 0.45, 2.2) for _ in range(3)])
            if np.min(np.abs(lam[:, None] - lam[None, :]) + np.eye(3)) < 0.08:
                continue
            nu = 1.0 / lam
            ab = (nu[1] - nu[2]) * (nu[2] - nu[0])
            if abs(ab) < 1e-3:
                continue
            if complete is None or (ab <= 0) == complete:
                return tuple(lam)
    if case is Case.CASE2:
        mu = _signed_uniform(rng, 0.45, 2.2)
        alpha = _signed_uniform(rng, 0.45, 2.2)
        beta = rng.uniform(0.3, 1.8)
        return (mu, alpha, beta)
    if case is Case.CASE3:
        while True:
            mu = _signed_uniform(rng, 0.45, 2.2)
            lam = _signed_uniform(rng, 0.45, 2.2)
            if abs(mu - lam) < 0.08:
                continue
            zeta = _signed_uniform(rng, 0.35, 1.8)
            val = (1.0 / mu - 1.0 / lam) * zeta
            if abs(val) < 1e-3:
                continue
            if complete is None or (val <= 0) == complete:
                return (mu, lam, zeta)
    lam = _signed_uniform(rng, 0.45, 2.2)
    zeta = rng.uniform(0.35, 1.8)
    return (lam, zeta)


def random_phi(case: Case, rng, complete: bool | None = None, conjugate: bool = True):
    """Random B-self-adjoint map of the requested normal-form case."""
    case = Case(case)
    params = random_params(case, rng, complete)
    T = template(case, params)
    M = random_isometry(rng) if conjugate else np.eye(3)
    if case in (Case.CASE3, Case.CASE4):
        M = M @ PON_SEED
    return M @ T @ np.linalg.inv(M), params


def random_unit(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)
