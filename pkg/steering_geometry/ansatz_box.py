"""Polyhedral boxes generated by local-hidden-state ansaetze.

box(U) = {sum_i beta_i B_i : 0 <= beta_i <= 1} is the zonotope spanned by
the generators B_i; its vertex sum_i B_i is the principal vertex. Spherical
ansaetze put weight u(n) on the boundary rays (1, n) of the positive cone,
either uniformly or as a finite mixture of point masses.

All support functions use the Hilbert-Schmidt pairing <a, b> = a.b / 2.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import lsq_linear

from steering_geometry.config import DEFAULT_CONE_TOL
from steering_geometry.errors import (
    DomainError,
    GeometricInfeasibilityError,
    InvalidInputError,
    RankError,
)
from steering_geometry.pauli_space import PauliVector, classify_cone

logger = logging.getLogger(__name__)

FACET_MERGE_TOL = 1e-9
RANK_TOL = 1e-10
UNIT_NORM_TOL = 1e-12
NORMALIZATION_TOL = 1e-10
TIE_TOL = 1e-12
# rows of directions evaluated at once against a large mixture
_CHUNK = 256


@dataclass(frozen=True)
class FiniteAnsatz:
    """A finite family of positive generators B_1..B_m.

    Attributes:
        generators: The generators as PauliVectors.
    """

    generators: Tuple[PauliVector, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise InvalidInputError("an ansatz needs at least one generator")
        for i, g in enumerate(gens):
            if not classify_cone(g, DEFAULT_CONE_TOL).in_forward_cone:
                raise InvalidInputError(f"generator {i} is not a positive operator: {g.x}")
        x0 = sum(g.x0 for g in gens)
        if not 0.0 < x0 <= 2.0 + DEFAULT_CONE_TOL:
            raise InvalidInputError(f"principal vertex X0 must lie in (0, 2], got {x0}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_array(cls, arr) -> "FiniteAnsatz":
        """Build from an (m, 4) array of generator coordinates."""
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        return cls(tuple(PauliVector.from_array(row) for row in arr))

    @property
    def matrix(self) -> np.ndarray:
        """Generator coordinates as the columns of a 4 x m matrix."""
        return np.column_stack([g.as_array() for g in self.generators])

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True, eq=False)
class SphericalAnsatz:
    """A distribution of weight over the boundary rays (1, n) of the positive cone.

    ``weights`` and ``directions`` are both None for the uniform distribution
    and describe point masses otherwise.
    """

    weights: Optional[np.ndarray] = None
    directions: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.weights is None) != (self.directions is None):
            raise InvalidInputError("weights and directions must be given together")
        if self.weights is None:
            return
        w = np.asarray(self.weights, dtype=float).ravel()
        n = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if n.shape != (len(w), 3):
            raise InvalidInputError(f"directions must have shape ({len(w)}, 3), got {n.shape}")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(n)):
            raise InvalidInputError("weights and directions must be finite")
        if np.any(w <= 0):
            raise InvalidInputError("mixture weights must be positive")
        if np.max(np.abs(np.linalg.norm(n, axis=1) - 1.0)) > UNIT_NORM_TOL:
            raise InvalidInputError("mixture directions must be unit vectors")
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
            raise InvalidInputError(f"mixture weights must sum to 1, got {w.sum()!r}")
        w.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "directions", n)

    @classmethod
    def uniform(cls) -> "SphericalAnsatz":
        return cls()

    @classmethod
    def mixture(cls, weights: Sequence[float], directions) -> "SphericalAnsatz":
        return cls(weights=np.asarray(weights, dtype=float), directions=np.asarray(directions, dtype=float))

    @property
    def is_uniform(self) -> bool:
        return self.weights is None

    @property
    def variant(self) -> str:
        return "uniform" if self.is_uniform else "mixture"

    def as_finite(self) -> FiniteAnsatz:
        """The point masses of a mixture as explicit generators w_k (1, n_k)."""
        if self.is_uniform:
            raise DomainError("the uniform ansatz has no finite generator family")
        coords = np.hstack([np.ones((len(self.weights), 1)), self.directions])
        return FiniteAnsatz.from_array(self.weights[:, None] * coords)


Ansatz = Union[FiniteAnsatz, SphericalAnsatz]


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A boundary point of a spherical box produced by a cap response.

    Attributes:
        x0: Trace coordinate of the point.
        b: Spatial coordinates (X1, X2, X3).
        lam: Cap threshold; the response is 1 where n0.n > lam.
        n0: Unit cap axis.
        g_values: Per-direction weights applied on the tie set n0.n == lam.
    """

    x0: float
    b: np.ndarray
    lam: float
    n0: np.ndarray
    g_values: Optional[np.ndarray] = None

    @property
    def point(self) -> PauliVector:
        return PauliVector.from_array(np.concatenate([[self.x0], self.b]))

    @property
    def normal(self) -> PauliVector:
        """Direction (-lam, n0) in which this point maximises <., w> over the box."""
        return PauliVector.from_array(np.concatenate([[-self.lam], self.n0]))


@dataclass(frozen=True, eq=False)
class FacetNormals:
    """Facet normals of a finite box.

    Attributes:
        normals: Unit outward normals, both signs of every distinct facet plane.
        degenerate: True when the generators do not span R^4.
        span: Orthonormal basis (columns) of the generators' span.
    """

    normals: List[PauliVector]
    degenerate: bool
    span: np.ndarray

    def as_array(self) -> np.ndarray:
        if not self.normals:
            return np.zeros((0, 4))
        return np.array([n.x for n in self.normals])


def principal_vertex(ansatz: Ansatz) -> PauliVector:
    """sum_i B_i for finite ansaetze, (1, integral of n dmu) for spherical ones."""
    if isinstance(ansatz, FiniteAnsatz):
        return PauliVector.from_array(ansatz.matrix.sum(axis=1))
    if ansatz.is_uniform:
        return PauliVector((1.0, 0.0, 0.0, 0.0))
    return PauliVector.from_array(np.concatenate([[1.0], ansatz.weights @ ansatz.directions]))


def _directions(w) -> np.ndarray:
    arr = w.as_array() if isinstance(w, PauliVector) else np.asarray(w, dtype=float)
    if arr.shape[-1] != 4:
        raise InvalidInputError(f"expected 4 coordinates, got shape {arr.shape}")
    return arr


def uniform_box_support(w: np.ndarray) -> np.ndarray:
    """Closed-form support of the uniform box, row-wise over (..., 4).

    With a = w0 and r = |w_vec| the integral of max(0, (a + r t)/2) over the
    uniform measure on t in [-1, 1] is a/2 for a >= r, zero for a <= -r and
    (a + r)^2 / (8 r) in between.
    """
    a = w[..., 0]
    r = np.linalg.norm(w[..., 1:], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        middle = (a + r) ** 2 / (8.0 * r)
    return np.where(a >= r, 0.5 * a, np.where(a <= -r, 0.0, middle))


def _mixture_support(ansatz: SphericalAnsatz, w: np.ndarray) -> np.ndarray:
    flat = w.reshape(-1, 4)
    out = np.empty(len(flat))
    for start in range(0, len(flat), _CHUNK):
        block = flat[start : start + _CHUNK]
        proj = 0.5 * (block[:, :1] + block[:, 1:] @ ansatz.directions.T)
        out[start : start + _CHUNK] = np.maximum(proj, 0.0) @ ansatz.weights
    return out.reshape(w.shape[:-1])


def box_support(ansatz: Ansatz, w: Union[PauliVector, np.ndarray]) -> Union[float, np.ndarray]:
    """Support function of box(ansatz) in direction(s) w.

    Args:
        ansatz: Finite or spherical ansatz.
        w: A PauliVector or an array of shape (..., 4).

    Returns:
        A float for a PauliVector, otherwise an array over the leading axes.
    """
    arr = _directions(w)
    if isinstance(ansatz, FiniteAnsatz):
        h = np.maximum(0.5 * arr @ ansatz.matrix, 0.0).sum(axis=-1)
    elif ansatz.is_uniform:
        h = uniform_box_support(arr)
    else:
        h = _mixture_support(ansatz, arr)
    return float(h) if isinstance(w, PauliVector) else h


def uniform_cross_section_radius(x0: float) -> float:
    """Radius x0 (1 - x0) of the uniform box's ball cross-section at X0 = x0.

    Raises:
        DomainError: If x0 lies outside [0, 1].
    """
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0 must lie in [0, 1], got {x0}")
    return x0 * (1.0 - x0)


def boundary_point(
    ansatz: SphericalAnsatz,
    n0,
    lam: float,
    g: Union[None, float, Sequence[float]] = None,
) -> BoundaryPoint:
    """Boundary point of a spherical box from the cap response 1[n0.n > lam].

    For the uniform ansatz the tie set has measure zero and the cap integrals
    are x0 = (1 - lam)/2 and b = (1 - lam^2)/4 * n0, with lam clipped to
    [-1, 1]. For a mixture, ties n0.n_k == lam are weighted by ``g``.

    Args:
        ansatz: Spherical ansatz.
        n0: Cap axis (normalised here).
        lam: Cap threshold; values outside [-1, 1] give the empty or full cap.
        g: Tie weights in [0, 1]; a scalar or one value per mixture direction.
            Ignored for the uniform ansatz.

    Returns:
        The BoundaryPoint.
    """
    n0 = np.asarray(n0, dtype=float).ravel()
    norm = np.linalg.norm(n0)
    if n0.shape != (3,) or norm == 0 or not np.isfinite(norm):
        raise InvalidInputError(f"n0 must be a non-zero 3-vector, got {n0}")
    n0 = n0 / norm
    lam = float(lam)

    if ansatz.is_uniform:
        t = min(max(lam, -1.0), 1.0)
        x0 = (1.0 - t) / 2.0
        b = (1.0 - t * t) / 4.0 * n0
        return BoundaryPoint(x0=x0, b=b, lam=lam, n0=n0)

    cosines = ansatz.directions @ n0
    ties = np.abs(cosines - lam) <= TIE_TOL
    if g is None:
        g_values = np.zeros(len(cosines))
    else:
        g_values = np.broadcast_to(np.asarray(g, dtype=float), cosines.shape).copy()
        if np.any((g_values < 0.0) | (g_values > 1.0)):
            raise InvalidInputError("tie weights g must lie in [0, 1]")
    response = np.where(ties, g_values, (cosines > lam).astype(float))
    mass = ansatz.weights * response
    return BoundaryPoint(
        x0=float(mass.sum()),
        b=mass @ ansatz.directions,
        lam=lam,
        n0=n0,
        g_values=np.where(ties, g_values, 0.0),
    )


def boundary_residual(ansatz: SphericalAnsatz, point: BoundaryPoint) -> float:
    """|h_box(w) - <p, w>| in the point's own normal direction w = (-lam, n0).

    Zero (up to rounding) exactly when the point attains the support there.
    """
    w = point.normal
    value = 0.5 * float(w.as_array() @ point.point.as_array())
    return abs(box_support(ansatz, w) - value)


def facet_normals(ansatz: FiniteAnsatz) -> FacetNormals:
    """Facet normals of the zonotope spanned by the generators.

    Every facet of a 4D zonotope is parallel to three generators, so its
    normal spans the kernel of their 3 x 4 coordinate matrix. Dependent
    triples are skipped and duplicate planes merged.

    Raises:
        InvalidInputError: With fewer than three generators.
    """
    if len(ansatz) < 3:
        raise InvalidInputError(f"facet enumeration needs at least 3 generators, got {len(ansatz)}")
    gens = ansatz.matrix.T
    u, s, _ = np.linalg.svd(gens.T)
    rank = int(np.sum(s > RANK_TOL * max(s[0], 1.0)))
    span = u[:, :rank]
    if rank < 4:
        logger.warning("box generators span only a %d-dimensional subspace", rank)
        return FacetNormals(normals=[], degenerate=True, span=span)

    found: List[np.ndarray] = []
    for triple in itertools.combinations(range(len(gens)), 3):
        sub = gens[list(triple)]
        _, sv, vh = np.linalg.svd(sub)
        if sv[-1] <= RANK_TOL * max(sv[0], 1.0):
            continue
        kernel = vh[-1] / np.linalg.norm(vh[-1])
        for candidate in (kernel, -kernel):
            if not any(np.linalg.norm(candidate - f) <= FACET_MERGE_TOL for f in found):
                found.append(candidate)
    logger.debug("enumerated %d facet normals from %d generators", len(found), len(gens))
    return FacetNormals(
        normals=[PauliVector.from_array(f) for f in found],
        degenerate=False,
        span=span,
    )


def box_from_cone(generators: Sequence[PauliVector], center: PauliVector) -> FiniteAnsatz:
    """Box equal to cone(U) intersected with its reflection through ``center``.

    Writing 2*center = sum_i gamma_i B_i, the reflected cone contains
    lam * B_i exactly for lam <= gamma_i, so the rescaled generators are
    gamma_i B_i and their principal vertex is 2*center.

    Raises:
        RankError: If the four generators are linearly dependent.
        GeometricInfeasibilityError: If some gamma_i <= 0.
    """
    gens = list(generators)
    if len(gens) != 4:
        raise InvalidInputError(f"box_from_cone needs exactly 4 generators, got {len(gens)}")
    mat = np.column_stack([g.as_array() for g in gens])
    s = np.linalg.svd(mat, compute_uv=False)
    if s[-1] <= RANK_TOL * max(s[0], 1.0):
        raise RankError("cone generators are linearly dependent")
    gamma = np.linalg.solve(mat, 2.0 * center.as_array())
    if np.any(gamma <= 0.0):
        raise GeometricInfeasibilityError(
            f"reflected cone does not reach every generator ray (scales {gamma})"
        )
    return FiniteAnsatz(tuple(g * float(c) for g, c in zip(gens, gamma)))


def solve_box_weights(ansatz: FiniteAnsatz, target: PauliVector) -> Tuple[np.ndarray, float]:
    """Weights in [0, 1]^m minimising |sum_i beta_i B_i - target|.

    Returns:
        (weights, residual norm).
    """
    mat = ansatz.matrix
    result = lsq_linear(mat, target.as_array(), bounds=(0.0, 1.0), method="bvls", tol=1e-14)
    beta = np.clip(result.x, 0.0, 1.0)
    residual = float(np.linalg.norm(mat @ beta - target.as_array()))
    return beta, residual


def contains_point(ansatz: FiniteAnsatz, v: PauliVector, tol: float = 1e-8) -> bool:
    """Membership of a point in a finite box."""
    return solve_box_weights(ansatz, v)[1] <= tol
