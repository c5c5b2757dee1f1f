"""Reduction of a B-self-adjoint map on sl(2) to an adapted normal form.

A self-adjoint map falls into exactly one of four Jordan-type classes:

* case 1 -- diagonalisable over the ground field, diag(l1, l2, l3) in an
  orthonormal basis (over R the third vector is the timelike one);
* case 2 -- one real and two complex-conjugate eigenvalues (real mode
  only), block diag(mu, [[alpha, beta], [-beta, alpha]]) in an
  orthonormal basis, beta > 0 after normalisation;
* case 3 -- an eigenvalue whose algebraic multiplicity exceeds the
  geometric one by 1, [[mu,0,0],[0,l,zeta],[0,0,l]] in a
  pseudo-orthonormal basis, normalised so zeta = q(v3, v3);
* case 4 -- a single eigenvalue with a full Jordan chain,
  [[l,0,zeta],[zeta,l,0],[0,0,l]] in a pseudo-orthonormal basis,
  with zeta > 0 in real mode.

The change of basis is built constructively: eigenvectors of distinct
eigenvalues are automatically B-orthogonal, and the off-pattern Gram
entries of generalised eigenvectors are removed by explicit shear
corrections that leave the matrix shape invariant.  Every reduction is
certified a posteriori (template residual and Gram residual); failures
raise instead of returning a wrong form.

Eigenvalues come out of a closed-form cubic (Cardano, one guarded Newton
polish step per root) and are merged by a relative clustering threshold;
the geometric multiplicity is a singular-value rank test.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .algebra import (
    GRAM_PSEUDO_ORTHONORMAL,
    GRAM_STANDARD,
    BasisKind,
    BasisKindTag,
    check_self_adjoint,
    classify_basis,
)

__all__ = [
    "Case",
    "Eigenvalue",
    "Spectrum",
    "NormalForm",
    "NotSelfAdjointError",
    "SingularMapError",
    "ClusteringAmbiguityError",
    "ReductionError",
    "cubic_roots",
    "spectrum3",
    "template",
    "reduce",
    "invert_params",
]

CLUSTER_TOL = 1e-7
RANK_TOL = 1e-8
CERT_TOL = 1e-8


class Case(IntEnum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4


class NotSelfAdjointError(ValueError):
    pass


class SingularMapError(ValueError):
    pass


class ClusteringAmbiguityError(RuntimeError):
    """Eigenvalue clustering and the rank test disagree."""


class ReductionError(RuntimeError):
    """The constructed basis failed its certification."""


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    alg_mult: int
    geo_mult: int


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[Eigenvalue, ...]
    tol_cluster: float

    def max_geo_mult(self) -> int:
        return max(e.geo_mult for e in self.eigenvalues)


@dataclass(frozen=True)
class NormalForm:
    """Case tag, case parameters and the adapted change of basis.

    ``P`` has the adapted basis vectors as columns (standard coordinates),
    so that P^-1 Phi P equals ``template(case, params)``.  ``mode`` is
    'real' or 'complex'; params are

    * case 1: (l1, l2, l3)
    * case 2: (mu, alpha, beta)
    * case 3: (mu, l, zeta)
    * case 4: (l, zeta)
    """

    case: Case
    params: tuple
    P: np.ndarray
    basis_kind: BasisKind
    mode: str

    @property
    def delta(self) -> int:
        return self.basis_kind.delta


def cubic_roots(c2, c1, c0):
    """Roots of x^3 + c2 x^2 + c1 x + c0 (Cardano), as three complex numbers."""
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    shift = -c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = c0 + c2 * (2.0 * c2 * c2 - 9.0 * c1) / 27.0
    scale = max(abs(p), abs(q), 1e-300)
    if abs(p) <= 1e-30 * scale and abs(q) <= 1e-30 * scale:
        base = [shift, shift, shift]
    else:
        disc = cmath.sqrt(q * q / 4.0 + p * p * p / 27.0)
        u3 = -q / 2.0 + disc
        alt = -q / 2.0 - disc
        if abs(alt) > abs(u3):
            u3 = alt
        u = u3 ** (1.0 / 3.0)
        omega = complex(-0.5, 0.5 * np.sqrt(3.0))
        base = []
        for k in range(3):
            uk = u * omega**k
            base.append(uk - p / (3.0 * uk) + shift)
    roots = []
    for x in base:
        f = ((x + c2) * x + c1) * x + c0
        df = (3.0 * x + 2.0 * c2) * x + c1
        if df != 0:
            dx = f / df
            # polish only when it is a genuinely small correction; near a
            # multiple root f/df is eps/eps noise of order one
            if abs(dx) <= 1e-3 * (1.0 + abs(x)):
                x = x - dx
        roots.append(x)
    return roots


def _rank(mat, thresh):
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > thresh))


def spectrum3(phi, tol_cluster: float | None = None, rank_tol: float | None = None) -> Spectrum:
    """Clustered spectrum of a 3x3 map with algebraic/geometric multiplicities.

    Roots within ``tol_cluster`` (default 1e-7 * ||phi||) of each other are
    merged into a single eigenvalue (multiplicities summed, value
    averaged); the geometric multiplicity is 3 minus the numerical rank of
    (phi - l I) at the ``rank_tol`` threshold (default 1e-8 * ||phi||).
    """
    phi = np.asarray(phi)
    scale = max(1.0, float(np.max(np.abs(phi))))
    tol_cluster = CLUSTER_TOL * scale if tol_cluster is None else tol_cluster
    rank_tol = RANK_TOL * scale if rank_tol is None else rank_tol
    real_mode = not np.iscomplexobj(phi)

    tr = complex(np.trace(phi))
    m2 = (tr * tr - complex(np.trace(phi @ phi))) / 2.0
    det = complex(np.linalg.det(phi))
    roots = cubic_roots(-tr, m2, -det)

    groups: list[list[complex]] = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        for g in groups:
            if any(abs(r - s) <= tol_cluster for s in g):
                g.append(r)
                break
        else:
            groups.append([r])
    eigs = []
    for g in groups:
        val = sum(g) / len(g)
        if real_mode and abs(val.imag) <= tol_cluster:
            val = complex(val.real, 0.0)
        geo = 3 - _rank(phi - val * np.eye(3), rank_tol)
        geo = max(1, min(geo, len(g)))
        eigs.append(Eigenvalue(val, len(g), geo))
    if real_mode:
        nonreal = [e for e in eigs if e.value.imag != 0]
        if nonreal and (len(nonreal) != 2 or sum(e.alg_mult for e in nonreal) != 2):
            raise ClusteringAmbiguityError(
                f"inconsistent complex pairing after clustering: {eigs}"
            )
    eigs.sort(key=lambda e: (e.value.real, e.value.imag))
    return Spectrum(tuple(eigs), tol_cluster)


def template(case: Case, params) -> np.ndarray:
    """Matrix template of a normal form in its adapted basis."""
    if case is Case.CASE1:
        l1, l2, l3 = params
        return np.diag([l1, l2, l3])
    if case is Case.CASE2:
        mu, alpha, beta = params
        return np.array([[mu, 0, 0], [0, alpha, beta], [0, -beta, alpha]])
    if case is Case.CASE3:
        mu, lam, zeta = params
        return np.array([[mu, 0, 0], [0, lam, zeta], [0, 0, lam]])
    if case is Case.CASE4:
        lam, zeta = params
        return np.array([[lam, 0, zeta], [zeta, lam, 0], [0, 0, lam]])
    raise ValueError(case)


def _B(x, y):
    """Bilinear Killing pairing of standard-coordinate triples (no conjugation)."""
    return x @ GRAM_STANDARD @ y


def _sqrt(x, real_mode):
    if real_mode:
        if x <= 0:
            raise ReductionError(f"needed a positive norm, got {x}")
        return float(np.sqrt(x))
    return complex(cmath.sqrt(x))


def _null_vector(mat):
    _, _, vh = np.linalg.svd(mat)
    return np.conj(vh[-1])


def _null_space(mat, thresh):
    _, s, vh = np.linalg.svd(mat)
    return [np.conj(vh[i]) for i in range(3) if s[i] <= thresh]


def _project_out(w, ortho):
    for u in ortho:
        w = w - (_B(u, w) / _B(u, u)) * u
    return w


def _pick_anisotropic(vectors, ortho, real_mode):
    """Some combination of ``vectors``, B-orthogonalised against ``ortho``,
    whose B-norm is bounded away from zero.  Needed because an SVD null
    basis of a Lorentzian plane (or of a complex quadric) may be isotropic.
    """
    cands = list(vectors)
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            cands.append(vectors[i] + vectors[j])
            cands.append(vectors[i] - vectors[j])
            if not real_mode:
                cands.append(vectors[i] + 1j * vectors[j])
                cands.append(vectors[i] - 1j * vectors[j])
    for w0 in cands:
        w = _project_out(w0, ortho)
        nrm = float(np.max(np.abs(w)))
        if nrm == 0.0:
            continue
        if abs(_B(w, w)) > 1e-10 * nrm * nrm:
            return w
    raise ReductionError("could not find an anisotropic eigenvector")


def _eig_value(e: Eigenvalue, real_mode):
    return e.value.real if real_mode else e.value


def _case1(phi, spec, real_mode, rank_tol):
    """Orthonormal eigenbasis for a diagonalisable map."""
    null_tol = rank_tol * 10
    vecs, vals = [], []
    for e in spec.eigenvalues:
        lam = _eig_value(e, real_mode)
        A = phi - lam * np.eye(3)
        basis = _null_space(A, null_tol)
        if len(basis) < e.geo_mult:
            basis = _null_space(A, null_tol * 100)
        if len(basis) < e.geo_mult:
            raise ReductionError(f"eigenspace extraction failed for {lam}")
        basis = basis[::-1][: e.geo_mult]  # smallest singular values first
        picked = []
        for _ in range(e.geo_mult):
            w = _pick_anisotropic(basis, vecs + picked, real_mode)
            picked.append(w)
        vecs.extend(picked)
        vals.extend([lam] * e.geo_mult)

    norms = [_B(v, v) for v in vecs]
    if real_mode:
        pos = [i for i in range(3) if norms[i] > 0]
        neg = [i for i in range(3) if norms[i] < 0]
        if len(pos) != 2 or len(neg) != 1:
            raise ReductionError(f"signature of eigenbasis is not (2,1): {norms}")
        pos.sort(key=lambda i: vals[i])  # canonical: spacelike pair by eigenvalue
        order = pos + neg
        cols = [vecs[i] / np.sqrt(abs(norms[i])) for i in order]
    else:
        order = sorted(range(3), key=lambda i: (complex(vals[i]).real, complex(vals[i]).imag))
        cols = [vecs[i] / cmath.sqrt(norms[i]) for i in order]
        cols[2] = cols[2] * 1j  # formal timelike slot: B(v3, v3) = -1
    lams = [vals[i] for i in order]
    return Case.CASE1, tuple(lams), np.stack(cols, axis=1)


def _case2(phi, spec):
    """Orthonormal basis splitting the complex eigenvector pair (real mode)."""
    mu_e = next(e for e in spec.eigenvalues if e.value.imag == 0)
    lam_e = next(e for e in spec.eigenvalues if e.value.imag > 0)
    mu = mu_e.value.real
    alpha, beta = lam_e.value.real, lam_e.value.imag

    v1 = np.real(_null_vector(phi - mu * np.eye(3)))
    n1 = _B(v1, v1)
    if n1 <= 0:
        raise ReductionError("real eigenvector of case 2 must be spacelike")
    v1 = v1 / np.sqrt(n1)

    V = _null_vector(phi.astype(complex) - complex(alpha, beta) * np.eye(3))
    h = _B(V, V)  # complex bilinear extension of the Killing form
    if abs(h) < 1e-14:
        raise ReductionError("degenerate complex eigenvector in case 2")
    V = V * cmath.sqrt(2.0 / h)
    v2, v3 = np.real(V), np.imag(V)
    if beta < 0:
        beta, v3 = -beta, -v3
    return Case.CASE2, (mu, alpha, beta), np.stack([v1, v2, v3], axis=1)


def _case3(phi, spec, real_mode, rank_tol):
    """Pseudo-orthonormal basis for a defect-one eigenvalue."""
    null_tol = rank_tol * 10
    eigs = sorted(spec.eigenvalues, key=lambda e: e.alg_mult)
    if len(eigs) == 2:
        mu = _eig_value(eigs[0], real_mode)
        lam = _eig_value(eigs[1], real_mode)
        v1 = _null_vector(phi - mu * np.eye(3))
        v2 = _null_vector(phi - lam * np.eye(3))
        v3, *_ = np.linalg.lstsq(phi - lam * np.eye(3), v2, rcond=None)
    else:
        # triple eigenvalue, geometric multiplicity two
        lam = _eig_value(eigs[0], real_mode)
        mu = lam
        N = phi - lam * np.eye(3)
        w = max((e for e in np.eye(3, dtype=phi.dtype)), key=lambda c: np.linalg.norm(N @ c))
        if np.linalg.norm(N @ w) <= null_tol:
            raise ReductionError("case-3 triple eigenvalue with vanishing nilpotent part")
        v2 = N @ w
        v3 = w
        ns = _null_space(N, null_tol)
        if len(ns) < 2:
            ns = _null_space(N, null_tol * 100)
        if len(ns) < 2:
            raise ReductionError("case-3 kernel extraction failed")
        v2u = v2 / np.linalg.norm(v2)
        v1 = max(
            (n - (np.conj(v2u) @ n) * v2u for n in ns),
            key=lambda u: float(np.linalg.norm(u)),
        )
    if real_mode:
        v1, v2, v3 = (np.real(v) for v in (v1, v2, v3))

    b11 = _B(v1, v1)
    b23 = _B(v2, v3)
    if abs(b23) < 1e-13 or abs(b11) < 1e-13:
        raise ReductionError("unexpected Gram degeneracies in case 3")
    s11 = _sqrt(b11, real_mode) if not real_mode else _sqrt(float(b11), real_mode)
    u1 = v1 / s11 - (_B(v1, v3) / (b23 * s11)) * v2
    u2 = v2 / b23
    u3 = v3 - (_B(v3, v3) / (2.0 * b23)) * v2
    zeta = _B(phi @ u3, u3)  # equals q(u3, u3)
    if real_mode:
        mu, lam, zeta = float(np.real(mu)), float(np.real(lam)), float(np.real(zeta))
    return Case.CASE3, (mu, lam, zeta), np.stack([u1, u2, u3], axis=1)


def _case4(phi, spec, real_mode, rank_tol):
    """Pseudo-orthonormal basis for a full Jordan chain."""
    lam = _eig_value(spec.eigenvalues[0], real_mode)
    N = phi - lam * np.eye(3)
    N2 = N @ N
    v3 = max((e for e in np.eye(3, dtype=phi.dtype)), key=lambda c: np.linalg.norm(N2 @ c))
    if np.linalg.norm(N2 @ v3) <= rank_tol * 10:
        raise ReductionError("case-4 chain generator not found")
    v1 = N @ v3
    v2 = N2 @ v3

    b11 = _B(v1, v1)
    b13 = _B(v1, v3)
    b23 = _B(v2, v3)
    if abs(b11) < 1e-13 or abs(b23) < 1e-13:
        raise ReductionError("unexpected Gram degeneracies in case 4")
    K = -b13 / (2.0 * b11)
    u1 = v1 + K * v2
    u2 = v2
    L = -(_B(v3, v3) + 2.0 * K * b13 + K * K * b11) / (2.0 * b23)
    u3 = v3 + K * v1 + L * v2
    zeta = _sqrt(_B(u1, u1) if not real_mode else float(_B(u1, u1)), real_mode)
    w1 = u1 / zeta
    w2 = u2 / _B(u2, u3)
    w3 = u3
    if real_mode:
        lam, zeta = float(np.real(lam)), float(np.real(zeta))
    return Case.CASE4, (lam, zeta), np.stack([w1, w2, w3], axis=1)


def _certify(phi, case, params, P, tol):
    scale = max(1.0, float(np.max(np.abs(phi))))
    T = template(case, params)
    res = np.max(np.abs(np.linalg.solve(P, phi @ P) - T))
    if res > tol * scale:
        raise ReductionError(
            f"template residual {res:.3e} exceeds {tol * scale:.3e} (case {int(case)})"
        )
    G = P.T @ GRAM_STANDARD @ P
    target = GRAM_STANDARD if case in (Case.CASE1, Case.CASE2) else GRAM_PSEUDO_ORTHONORMAL
    gres = np.max(np.abs(G - target))
    if gres > tol * max(1.0, float(np.max(np.abs(P))) ** 2):
        raise ReductionError(f"Gram residual {gres:.3e} exceeds tolerance (case {int(case)})")


def _basis_kind_of(P, case) -> BasisKind:
    kind = classify_basis(P[:, 0], P[:, 1], P[:, 2], tol=1e-6)
    expected = (
        BasisKindTag.ORTHONORMAL
        if case in (Case.CASE1, Case.CASE2)
        else BasisKindTag.PSEUDO_ORTHONORMAL
    )
    if kind.kind is not expected or kind.delta == 0:
        raise ReductionError(f"adapted basis failed its kind check: got {kind}")
    return kind


def reduce(
    phi,
    tol: float = 1e-9,
    tol_cluster: float | None = None,
    rank_tol: float | None = None,
) -> NormalForm:
    """Reduce a B-self-adjoint map to its adapted normal form.

    Raises NotSelfAdjointError / SingularMapError for invalid input and
    ReductionError or ClusteringAmbiguityError when the numerics cannot
    certify a form at the requested tolerances.
    """
    phi = np.asarray(phi)
    real_mode = not np.iscomplexobj(phi)
    phi = phi.astype(float if real_mode else complex)
    if not check_self_adjoint(phi, tol):
        scale = max(1.0, float(np.max(np.abs(phi))))
        if abs(np.linalg.det(phi)) <= tol * scale**3:
            raise SingularMapError("map is numerically singular")
        raise NotSelfAdjointError("map is not B-self-adjoint")
    scale = max(1.0, float(np.max(np.abs(phi))))
    spec = spectrum3(phi, tol_cluster, rank_tol)
    r_tol = RANK_TOL * scale if rank_tol is None else rank_tol

    mults = sorted((e.alg_mult, e.geo_mult) for e in spec.eigenvalues)
    if real_mode and any(e.value.imag != 0 for e in spec.eigenvalues):
        case, params, P = _case2(phi, spec)
    elif mults in ([(1, 1), (1, 1), (1, 1)], [(1, 1), (2, 2)], [(3, 3)]):
        case, params, P = _case1(phi, spec, real_mode, r_tol)
    elif mults in ([(1, 1), (2, 1)], [(3, 2)]):
        case, params, P = _case3(phi, spec, real_mode, r_tol)
    elif mults == [(3, 1)]:
        case, params, P = _case4(phi, spec, real_mode, r_tol)
    else:
        raise ClusteringAmbiguityError(
            f"eigenvalue clustering inconsistent with rank test: {spec.eigenvalues}"
        )

    if real_mode:
        P = np.real(np.asarray(P)).astype(float)
    _certify(phi, case, params, P, CERT_TOL)
    kind = _basis_kind_of(P, case)
    return NormalForm(case, params, P, kind, "real" if real_mode else "complex")


def invert_params(nf: NormalForm):
    """Parameters of the inverse map in the same adapted basis.

    Returns (nu1, nu2, nu3) for case 1, (eta, gamma, zeta) for case 2
    (the inverse rotation block), (eta, nu, zeta) for case 3 and
    (nu, zeta) for case 4.  Raises SingularMapError on a zero eigenvalue.
    """
    if nf.case is Case.CASE1:
        l1, l2, l3 = nf.params
        if any(abs(l) < 1e-14 for l in (l1, l2, l3)):
            raise SingularMapError("zero eigenvalue")
        return (1.0 / l1, 1.0 / l2, 1.0 / l3)
    if nf.case is Case.CASE2:
        mu, alpha, beta = nf.params
        d = alpha * alpha + beta * beta
        if abs(mu) < 1e-14 or abs(d) < 1e-28:
            raise SingularMapError("zero eigenvalue")
        return (1.0 / mu, alpha / d, -beta / d)
    if nf.case is Case.CASE3:
        mu, lam, zeta = nf.params
        if abs(mu) < 1e-14 or abs(lam) < 1e-14:
            raise SingularMapError("zero eigenvalue")
        return (1.0 / mu, 1.0 / lam, zeta)
    lam, zeta = nf.params
    if abs(lam) < 1e-14:
        raise SingularMapError("zero eigenvalue")
    return (1.0 / lam, zeta)
