"""Two-qubit states, EPR maps and Alice's steering ellipsoid.

A state is stored through its correlation matrix
Theta_ij = Tr[rho (sigma_i^A (x) sigma_j^B)], rows indexing A and columns
indexing B. Alice's EPR map A -> Tr_A[rho (A (x) I)] acts on Pauli
coordinates as the matrix 1/2 * Theta^T; Bob's map is 1/2 * Theta.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from steering_geometry.errors import (
    InvalidInputError,
    ProjectionUndefinedError,
    StateValidationError,
)
from steering_geometry.pauli_space import IDENTITY, PAULI, PauliVector, outcome_support

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
RANK_TOL = 1e-10

# sigma_i (x) sigma_j for i, j = 0..3
PAULI_PAIRS = np.array([[np.kron(a, b) for b in PAULI] for a in PAULI])


class Side(Enum):
    """Direction of an EPR map."""

    ALICE_TO_BOB = "alice_to_bob"
    BOB_TO_ALICE = "bob_to_alice"


class Party(Enum):
    A = "A"
    B = "B"


def reconstruct_density(theta: np.ndarray) -> np.ndarray:
    """rho = 1/4 * sum_ij Theta_ij sigma_i (x) sigma_j."""
    return 0.25 * np.einsum("ij,ijkl->kl", np.asarray(theta, dtype=float), PAULI_PAIRS)


def _validate_density(rho: np.ndarray) -> float:
    """Check the density-matrix invariants and return the smallest eigenvalue."""
    if rho.shape != (4, 4):
        raise StateValidationError("shape", f"expected a 4x4 matrix, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise StateValidationError("shape", "entries must be finite")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise StateValidationError("hermitian", "rho differs from its adjoint")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > TRACE_TOL:
        raise StateValidationError("trace", f"trace is {trace!r}, expected 1")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if min_eig < -PSD_TOL:
        raise StateValidationError("positivity", f"smallest eigenvalue is {min_eig:.3e}")
    return min_eig


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A validated two-qubit state in correlation-matrix form.

    Attributes:
        theta: 4x4 real matrix Theta_ij = Tr[rho (sigma_i (x) sigma_j)].
        psd_margin: Smallest eigenvalue of the reconstructed density matrix.
    """

    theta: np.ndarray
    psd_margin: float = field(default=0.0)

    @classmethod
    def from_theta(cls, theta) -> "TwoQubitState":
        """Validate a correlation matrix by reconstructing rho.

        Raises:
            StateValidationError: If the reconstruction is not a density matrix.
        """
        theta = np.array(theta, dtype=float)
        if theta.shape != (4, 4):
            raise StateValidationError("shape", f"theta must be 4x4, got {theta.shape}")
        margin = _validate_density(reconstruct_density(theta))
        theta.setflags(write=False)
        return cls(theta=theta, psd_margin=margin)

    @property
    def density(self) -> np.ndarray:
        return reconstruct_density(self.theta)

    @property
    def bloch_a(self) -> np.ndarray:
        return np.array(self.theta[1:, 0])

    @property
    def bloch_b(self) -> np.ndarray:
        return np.array(self.theta[0, 1:])

    @property
    def correlations(self) -> np.ndarray:
        return np.array(self.theta[1:, 1:])


def theta_from_density(rho: np.ndarray) -> TwoQubitState:
    """Correlation matrix of a density matrix.

    Args:
        rho: 4x4 complex Hermitian, unit-trace, positive semi-definite matrix.

    Returns:
        The validated TwoQubitState.

    Raises:
        StateValidationError: Naming the violated invariant.
    """
    rho = np.asarray(rho, dtype=complex)
    margin = _validate_density(rho)
    theta = np.einsum("kl,ijlk->ij", rho, PAULI_PAIRS).real
    theta.setflags(write=False)
    return TwoQubitState(theta=theta, psd_margin=margin)


@dataclass(frozen=True, eq=False)
class EprMap:
    """Linear action of an EPR map on Pauli coordinates.

    Attributes:
        m: 4x4 real matrix.
        side: Which party's operators are mapped.
    """

    m: np.ndarray
    side: Side = Side.ALICE_TO_BOB

    @property
    def rank(self) -> int:
        s = np.linalg.svd(self.m, compute_uv=False)
        return int(np.sum(s > RANK_TOL * max(1.0, s[0])))

    @property
    def is_degenerate(self) -> bool:
        return self.rank < 4

    @property
    def vertex(self) -> PauliVector:
        """Image of the identity: the reduced state of the receiving party."""
        return apply_map(self, IDENTITY)

    @property
    def center(self) -> PauliVector:
        """Centre of symmetry of the steering outcomes, half the vertex."""
        return self.vertex * 0.5


def epr_map(state: TwoQubitState, side: Side = Side.ALICE_TO_BOB) -> EprMap:
    """Alice's map 1/2 * Theta^T, or Bob's map 1/2 * Theta."""
    theta = state.theta.T if side is Side.ALICE_TO_BOB else state.theta
    m = 0.5 * np.array(theta, dtype=float)
    m.setflags(write=False)
    return EprMap(m=m, side=side)


def apply_map(map_: EprMap, v: Union[PauliVector, np.ndarray]) -> Union[PauliVector, np.ndarray]:
    """Coordinates m . v; arrays of shape (..., 4) are mapped row-wise."""
    if isinstance(v, PauliVector):
        return PauliVector.from_array(map_.m @ v.as_array())
    return np.asarray(v, dtype=float) @ map_.m.T


def reduced_state(state: TwoQubitState, side: Party = Party.B) -> PauliVector:
    """Pauli coordinates of Tr_A(rho) (side B) or Tr_B(rho) (side A)."""
    if side is Party.B:
        return PauliVector.from_array(state.theta[0, :])
    return PauliVector.from_array(state.theta[:, 0])


def steering_support(map_: EprMap, w: Union[PauliVector, np.ndarray]) -> Union[float, np.ndarray]:
    """Support function of the steering outcomes: h_M(m^T w).

    Args:
        map_: The EPR map.
        w: Direction, a PauliVector or an array of shape (..., 4).
    """
    if isinstance(w, PauliVector):
        return outcome_support(PauliVector.from_array(map_.m.T @ w.as_array()))
    return outcome_support(np.asarray(w, dtype=float) @ map_.m)


@dataclass(frozen=True, eq=False)
class EllipsoidReport:
    """Alice's steering ellipsoid in Bob's Bloch ball.

    Attributes:
        center: Bloch vector of the centre.
        semiaxes: Semiaxis lengths, sorted descending.
        orientation: Columns are the unit axes matching ``semiaxes``.
        degenerate: True when the EPR map has rank below 4.
    """

    center: np.ndarray
    semiaxes: np.ndarray
    orientation: np.ndarray
    degenerate: bool

    @property
    def shape_matrix(self) -> np.ndarray:
        """Q with the ellipsoid {c + Q^(1/2) u : |u| <= 1}."""
        return self.orientation @ np.diag(self.semiaxes ** 2) @ self.orientation.T

    def support(self, u: np.ndarray) -> np.ndarray:
        """3D support function u.c + sqrt(u^T Q u), row-wise for u of shape (..., 3)."""
        u = np.asarray(u, dtype=float)
        q = np.einsum("...i,ij,...j->...", u, self.shape_matrix, u)
        return u @ self.center + np.sqrt(np.maximum(q, 0.0))


def steering_ellipsoid(state: TwoQubitState, tol: float = RANK_TOL) -> EllipsoidReport:
    """Projective image of Alice's pure states in Bob's Bloch hyperplane.

    A projector with Bloch vector n is sent to (b + T^T n) / (1 + a.n), where
    a, b are the local Bloch vectors and T the correlation block of Theta.
    Those points form the ellipsoid with centre (b - T^T a) / (1 - |a|^2) and
    shape matrix (T^T - b a^T)(I + a a^T / (1 - |a|^2))(T - a b^T) / (1 - |a|^2).

    Raises:
        ProjectionUndefinedError: If Alice's reduced state is pure, so that X0
            of some mapped projector vanishes.
    """
    a, b, t = state.bloch_a, state.bloch_b, state.correlations
    gamma = 1.0 - float(a @ a)
    if gamma <= tol:
        raise ProjectionUndefinedError(
            "Alice's reduced state lies on the Bloch sphere; X0 of a mapped projector vanishes"
        )
    center = (b - t.T @ a) / gamma
    left = t.T - np.outer(b, a)
    q = left @ (np.eye(3) + np.outer(a, a) / gamma) @ left.T / gamma
    q = 0.5 * (q + q.T)
    evals, evecs = np.linalg.eigh(q)
    order = np.argsort(evals)[::-1]
    semiaxes = np.sqrt(np.clip(evals[order], 0.0, None))
    orientation = evecs[:, order]
    degenerate = epr_map(state).is_degenerate
    logger.debug("steering ellipsoid centre=%s semiaxes=%s", center, semiaxes)
    return EllipsoidReport(
        center=center,
        semiaxes=semiaxes,
        orientation=orientation,
        degenerate=degenerate,
    )


def pure_state_images(state: TwoQubitState, directions: np.ndarray) -> np.ndarray:
    """Normalised Bob states steered by Alice's projectors (1, n).

    Args:
        state: The two-qubit state.
        directions: Unit Bloch vectors of shape (N, 3).

    Returns:
        Bloch vectors of shape (N, 3).

    Raises:
        ProjectionUndefinedError: If some mapped projector has vanishing X0.
    """
    directions = np.asarray(directions, dtype=float)
    if directions.ndim != 2 or directions.shape[1] != 3:
        raise InvalidInputError(f"directions must have shape (N, 3), got {directions.shape}")
    projectors = np.hstack([np.ones((len(directions), 1)), directions])
    images = apply_map(epr_map(state), projectors)
    x0 = images[:, 0]
    if np.any(x0 <= RANK_TOL):
        raise ProjectionUndefinedError("a mapped projector has vanishing X0")
    return images[:, 1:] / x0[:, None]
