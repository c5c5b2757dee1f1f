"""Core structure of the Lie algebra sl(2) over R or C.

Everything downstream is phrased in a fixed "standard" basis (e1, e2, e3)
of trace-free 2x2 matrices::

    e1 = [[ 1/2, 0  ],    e2 = [[ 0,   1/2],    e3 = [[ 0,   1/2],
          [ 0,  -1/2]]          [ 1/2, 0  ]]          [-1/2, 0  ]]

with bracket table [e1,e2] = e3, [e1,e3] = e2, [e2,e3] = -e1 and Killing
form normalised to B(x, y) = 2 Tr(xy), of signature (2,1): the Gram matrix
of (e1,e2,e3) is diag(1, 1, -1).

Two distinguished basis normalisations recur throughout the package:

* orthonormal:         B(v1,v1) = B(v2,v2) = -B(v3,v3) = 1, rest zero;
* pseudo-orthonormal:  B(v1,v1) = B(v2,v3) = 1, rest zero.

Each forces the bracket table up to a sign delta in {-1, +1}.  Over C the
same normalisations are kept formally (there is no signature).

All functions accept real or complex data; no silent promotion happens,
the scalar field is whatever the caller supplies.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "STANDARD_BASIS_MATRICES",
    "GRAM_STANDARD",
    "GRAM_ORTHONORMAL",
    "GRAM_PSEUDO_ORTHONORMAL",
    "Basis",
    "STANDARD_BASIS",
    "AlgebraElement",
    "BasisKindTag",
    "BasisKind",
    "BasisMismatchError",
    "DegenerateBasisError",
    "bracket_coords",
    "bracket",
    "killing",
    "killing_matrix",
    "ad_matrix",
    "to_matrix",
    "from_matrix",
    "check_self_adjoint",
    "classify_basis",
]

# 2x2 matrix realisation of the standard basis.
STANDARD_BASIS_MATRICES = (
    np.array([[0.5, 0.0], [0.0, -0.5]]),
    np.array([[0.0, 0.5], [0.5, 0.0]]),
    np.array([[0.0, 0.5], [-0.5, 0.0]]),
)

# Gram matrix of B(x,y) = 2 Tr(xy) in the standard basis.
GRAM_STANDARD = np.diag([1.0, 1.0, -1.0])
GRAM_ORTHONORMAL = GRAM_STANDARD
GRAM_PSEUDO_ORTHONORMAL = np.array(
    [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
)

DEFAULT_TOL = 1e-9


class BasisMismatchError(ValueError):
    """Raised when two elements do not refer to the same basis."""


class DegenerateBasisError(ValueError):
    """Raised when a supposed basis triple is (numerically) dependent."""


@dataclass(frozen=True)
class Basis:
    """A basis of sl(2) given by its column matrix in standard coordinates.

    ``matrix[:, k]`` holds the standard coordinates of the k-th basis
    vector.  Two bases compare equal iff their ids match.
    """

    basis_id: str
    matrix: np.ndarray

    def __eq__(self, other):
        return isinstance(other, Basis) and self.basis_id == other.basis_id

    def __hash__(self):
        return hash(self.basis_id)

    def to_standard(self, coords):
        return self.matrix @ np.asarray(coords)

    def from_standard(self, coords):
        return np.linalg.solve(self.matrix, np.asarray(coords))


STANDARD_BASIS = Basis("standard", np.eye(3))


@dataclass
class AlgebraElement:
    """An element of sl(2) as a coordinate triple over a known basis."""

    coords: np.ndarray
    basis: Basis = STANDARD_BASIS

    def __post_init__(self):
        self.coords = np.asarray(self.coords)
        if self.coords.shape != (3,):
            raise ValueError("coords must be a 3-vector")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("coords must be finite")


class BasisKindTag(Enum):
    ORTHONORMAL = "orthonormal"
    PSEUDO_ORTHONORMAL = "pseudo-orthonormal"
    NEITHER = "neither"


@dataclass(frozen=True)
class BasisKind:
    kind: BasisKindTag
    delta: int = 0

    def __str__(self):
        if self.kind is BasisKindTag.NEITHER:
            return "neither"
        return f"{self.kind.value}(delta={self.delta:+d})"


def bracket_coords(a, b):
    """Bracket of two coordinate triples in the standard basis.

    Structure constants of the table [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=-e1.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return np.stack(
        [
            -(a[1] * b[2] - a[2] * b[1]),
            a[0] * b[2] - a[2] * b[0],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Lie bracket [x, y]; both arguments must live in the same basis."""
    if x.basis != y.basis:
        raise BasisMismatchError(
            f"bracket of elements in different bases: {x.basis.basis_id!r} vs {y.basis.basis_id!r}"
        )
    if x.basis == STANDARD_BASIS:
        return AlgebraElement(bracket_coords(x.coords, y.coords), x.basis)
    zs = bracket_coords(x.basis.to_standard(x.coords), y.basis.to_standard(y.coords))
    return AlgebraElement(x.basis.from_standard(zs), x.basis)


def killing_matrix(basis: Basis = STANDARD_BASIS) -> np.ndarray:
    """Gram matrix of B in the given basis."""
    P = basis.matrix
    return P.T @ GRAM_STANDARD @ P


def killing(x: AlgebraElement, y: AlgebraElement):
    """Killing form B(x, y) = 2 Tr(xy)."""
    if x.basis != y.basis:
        raise BasisMismatchError("killing form of elements in different bases")
    G = killing_matrix(x.basis)
    return x.coords @ G @ y.coords


def ad_matrix(coords) -> np.ndarray:
    """Matrix of ad_x on standard coordinates, columns ad_x(e_k)."""
    cols = [bracket_coords(coords, e) for e in np.eye(3)]
    return np.stack(cols, axis=1)


def to_matrix(coords) -> np.ndarray:
    """2x2 trace-free matrix with the given standard coordinates."""
    coords = np.asarray(coords)
    return (
        coords[0] * STANDARD_BASIS_MATRICES[0]
        + coords[1] * STANDARD_BASIS_MATRICES[1]
        + coords[2] * STANDARD_BASIS_MATRICES[2]
    )


def from_matrix(m) -> np.ndarray:
    """Standard coordinates of a trace-free 2x2 matrix."""
    m = np.asarray(m)
    return np.stack([m[0, 0] - m[1, 1], m[0, 1] + m[1, 0], m[0, 1] - m[1, 0]])


def check_self_adjoint(phi, tol: float = DEFAULT_TOL) -> bool:
    """True iff phi is an invertible B-self-adjoint map in standard coords.

    Self-adjointness means phi^T G = G phi for the standard Gram matrix G;
    the check is scale-aware (residual measured relative to ||phi||).
    """
    phi = np.asarray(phi)
    if phi.shape != (3, 3):
        raise ValueError("phi must be 3x3")
    scale = max(1.0, float(np.max(np.abs(phi))))
    res = np.max(np.abs(phi.T @ GRAM_STANDARD - GRAM_STANDARD @ phi))
    if res > tol * scale:
        return False
    return abs(np.linalg.det(phi)) > tol * scale**3


def _delta_from_component(value, tol):
    """Snap a bracket component to +-1, or 0 if it is neither."""
    if abs(value - 1.0) <= tol:
        return 1
    if abs(value + 1.0) <= tol:
        return -1
    return 0


def classify_basis(v1, v2, v3, tol: float = DEFAULT_TOL) -> BasisKind:
    """Classify a basis triple (standard coordinates) up to reordering.

    Returns Orthonormal(delta) when some reordering has Gram diag(1,1,-1),
    PseudoOrthonormal(delta) when some reordering has B(v1,v1)=B(v2,v3)=1
    and all the other pairings zero, and Neither otherwise.  delta is read
    off the bracket table ([v1,v2] against v3 in the orthonormal case,
    [v2,v3] against v1 in the pseudo-orthonormal one).
    """
    V = np.stack([np.asarray(v1), np.asarray(v2), np.asarray(v3)], axis=1)
    scale = float(np.max(np.abs(V)))
    if scale == 0.0 or abs(np.linalg.det(V)) <= tol * scale**3:
        raise DegenerateBasisError("basis triple is numerically dependent")
    G = V.T @ GRAM_STANDARD @ V

    def near(x, y):
        return abs(x - y) <= tol * max(1.0, scale**2)

    off_zero = all(near(G[i, j], 0.0) for i in range(3) for j in range(3) if i != j)
    if off_zero:
        diag = [G[i, i] for i in range(3)]
        pos = [i for i in range(3) if near(diag[i], 1.0)]
        neg = [i for i in range(3) if near(diag[i], -1.0)]
        if len(pos) == 2 and len(neg) == 1:
            order = pos + neg
            W = V[:, order]
            comp = np.linalg.solve(W, bracket_coords(W[:, 0], W[:, 1]))
            # [v1,v2] must be delta*v3 exactly (other components vanish).
            if near(comp[0], 0.0) and near(comp[1], 0.0):
                delta = _delta_from_component(comp[2], tol * max(1.0, scale))
                if delta:
                    return BasisKind(BasisKindTag.ORTHONORMAL, delta)
        return BasisKind(BasisKindTag.NEITHER)

    # Pseudo-orthonormal: find the index with unit norm, orthogonal to the
    # other two, which in turn are null and pair to 1.
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        if (
            near(G[i, i], 1.0)
            and near(G[i, j], 0.0)
            and near(G[i, k], 0.0)
            and near(G[j, j], 0.0)
            and near(G[k, k], 0.0)
            and near(G[j, k], 1.0)
        ):
            W = V[:, [i, j, k]]
            comp = np.linalg.solve(W, bracket_coords(W[:, 1], W[:, 2]))
            if near(comp[1], 0.0) and near(comp[2], 0.0):
                delta = _delta_from_component(comp[0], tol * max(1.0, scale))
                if delta:
                    return BasisKind(BasisKindTag.PSEUDO_ORTHONORMAL, delta)
            return BasisKind(BasisKindTag.NEITHER)
    return BasisKind(BasisKindTag.NEITHER)
