"""Pauli coordinates of single-qubit Hermitian operators.

Every Hermitian 2x2 operator is written A = 1/2 * sum_i X_i sigma_i with
X_i = Tr(A sigma_i), which identifies the operator space with R^4. Under
this identification the Hilbert-Schmidt inner product Tr(A B) becomes
1/2 * sum_i a_i b_i, the positive operators form the forward light-cone at
the origin and the measurement outcomes {0 <= M <= I} form a double-cone
between O = (0,0,0,0) and I = (2,0,0,0).
"""

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from steering_geometry.config import DEFAULT_CONE_TOL
from steering_geometry.errors import InvalidInputError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)

ROUND_TRIP_TOL = 1e-12


@dataclass(frozen=True)
class PauliVector:
    """A Hermitian qubit operator as its four Pauli coordinates.

    Attributes:
        x: Coordinates (X0, X1, X2, X3).
    """

    x: Tuple[float, float, float, float]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.x)
        if len(coords) != 4:
            raise InvalidInputError(f"PauliVector needs 4 coordinates, got {len(coords)}")
        if not all(np.isfinite(coords)):
            raise InvalidInputError(f"PauliVector coordinates must be finite, got {coords}")
        object.__setattr__(self, "x", coords)

    @classmethod
    def of(cls, *coords: float) -> "PauliVector":
        """Shorthand: ``PauliVector.of(1, 0, 0, 1)``."""
        if len(coords) == 1:
            return cls(tuple(coords[0]))
        return cls(tuple(coords))

    @classmethod
    def from_array(cls, arr: Union[np.ndarray, Iterable[float]]) -> "PauliVector":
        return cls(tuple(np.asarray(arr, dtype=float).ravel()))

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "PauliVector":
        """Coordinates X_i = Tr(A sigma_i) of a Hermitian 2x2 matrix."""
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (2, 2):
            raise InvalidInputError(f"expected a 2x2 matrix, got shape {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=ROUND_TRIP_TOL):
            raise InvalidInputError("matrix is not Hermitian")
        return cls(tuple(np.trace(mat @ s).real for s in PAULI))

    def to_matrix(self) -> np.ndarray:
        """The 2x2 Hermitian matrix 1/2 * sum_i X_i sigma_i."""
        return 0.5 * sum(c * s for c, s in zip(self.x, PAULI))

    def as_array(self) -> np.ndarray:
        return np.array(self.x, dtype=float)

    @property
    def x0(self) -> float:
        return self.x[0]

    @property
    def bloch(self) -> np.ndarray:
        """The spatial part (X1, X2, X3)."""
        return np.array(self.x[1:], dtype=float)

    def __add__(self, other: "PauliVector") -> "PauliVector":
        return PauliVector.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "PauliVector") -> "PauliVector":
        return PauliVector.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "PauliVector":
        return PauliVector.from_array(-self.as_array())

    def __mul__(self, scalar: float) -> "PauliVector":
        return PauliVector.from_array(float(scalar) * self.as_array())

    __rmul__ = __mul__


IDENTITY = PauliVector((2.0, 0.0, 0.0, 0.0))
ZERO = PauliVector((0.0, 0.0, 0.0, 0.0))
HALF_IDENTITY = PauliVector((1.0, 0.0, 0.0, 0.0))


@dataclass(frozen=True)
class ConeMembership:
    """Result of :func:`classify_cone`.

    Attributes:
        in_forward_cone: The operator is positive semi-definite (within tol).
        in_backward_cone: I - operator is positive semi-definite (within tol).
        margin: min(lambda_min, 1 - lambda_max); negative outside the double-cone.
    """

    in_forward_cone: bool
    in_backward_cone: bool
    margin: float

    @property
    def in_double_cone(self) -> bool:
        return self.in_forward_cone and self.in_backward_cone


def _coords(v: Union[PauliVector, np.ndarray]) -> np.ndarray:
    arr = v.as_array() if isinstance(v, PauliVector) else np.asarray(v, dtype=float)
    if arr.shape[-1] != 4:
        raise InvalidInputError(f"expected 4 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("coordinates must be finite")
    return arr


def inner(a: Union[PauliVector, np.ndarray], b: Union[PauliVector, np.ndarray]) -> float:
    """Hilbert-Schmidt inner product Tr(A B) = 1/2 * sum_i a_i b_i."""
    return 0.5 * float(np.dot(_coords(a), _coords(b)))


def eigenvalues_of(v: PauliVector) -> Tuple[float, float]:
    """Eigenvalues (lambda_minus, lambda_plus) = ((X0 - |X|)/2, (X0 + |X|)/2).

    Args:
        v: Operator coordinates.

    Returns:
        The two eigenvalues in ascending order.

    Raises:
        InvalidInputError: If any coordinate is not finite.
    """
    arr = _coords(v)
    r = float(np.linalg.norm(arr[1:]))
    return (arr[0] - r) / 2.0, (arr[0] + r) / 2.0


def _eigenvalue_arrays(coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    r = np.linalg.norm(coords[..., 1:], axis=-1)
    return (coords[..., 0] - r) / 2.0, (coords[..., 0] + r) / 2.0


def _in_forward(arr: np.ndarray, tol: float) -> bool:
    return bool(arr[0] >= -tol and arr[0] ** 2 >= float(np.dot(arr[1:], arr[1:])) - tol)


def classify_cone(v: PauliVector, tol: float = DEFAULT_CONE_TOL) -> ConeMembership:
    """Classify an operator against the forward cone at O and backward cone at I.

    Args:
        v: Operator coordinates.
        tol: Non-negative slack applied to both light-cone inequalities.

    Returns:
        ConeMembership with both flags and the eigenvalue margin.
    """
    if tol < 0:
        raise InvalidInputError(f"tol must be non-negative, got {tol}")
    arr = _coords(v)
    lo, hi = eigenvalues_of(v)
    return ConeMembership(
        in_forward_cone=_in_forward(arr, tol),
        in_backward_cone=_in_forward(IDENTITY.as_array() - arr, tol),
        margin=min(lo, 1.0 - hi),
    )


def in_bloch_ball(v: PauliVector, tol: float = DEFAULT_CONE_TOL) -> bool:
    """True for unit-trace positive operators (qubit states)."""
    return abs(v.x0 - 1.0) <= tol and float(np.linalg.norm(v.bloch)) <= 1.0 + tol


def outcome_support(c: Union[PauliVector, np.ndarray]) -> Union[float, np.ndarray]:
    """Support function of the outcome double-cone {0 <= M <= I}.

    max_M Tr(C M) is the sum of the positive eigenvalues of C.

    Args:
        c: Direction, either a PauliVector or an array of shape (..., 4).

    Returns:
        A float for a single PauliVector, otherwise an array over the leading axes.
    """
    lo, hi = _eigenvalue_arrays(_coords(c))
    h = np.maximum(lo, 0.0) + np.maximum(hi, 0.0)
    return float(h) if isinstance(c, PauliVector) else h


def reflect_through(v: PauliVector, center: PauliVector) -> PauliVector:
    """Point reflection 2*center - v."""
    return PauliVector.from_array(2.0 * center.as_array() - v.as_array())
