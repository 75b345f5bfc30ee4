"""Named two-qubit state families and seeded random states."""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from steering_geometry.epr import TwoQubitState, theta_from_density
from steering_geometry.errors import DomainError

# Random states use numpy's default Generator, i.e. the PCG64 bit generator.
PRNG_NAME = "numpy.random.default_rng (PCG64)"
MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class Werner:
    """p |Phi+><Phi+| + (1 - p) I/4."""

    p: float


@dataclass(frozen=True)
class ModifiedWerner:
    """p |Phi+><Phi+| + (1 - p) (I + q sigma_z)/2 (x) I/2."""

    p: float
    q: float


@dataclass(frozen=True)
class BellPhiPlus:
    pass


@dataclass(frozen=True)
class Product:
    bloch_a: Tuple[float, float, float]
    bloch_b: Tuple[float, float, float]


@dataclass(frozen=True)
class RandomState:
    seed: int


StateSpec = Union[Werner, ModifiedWerner, BellPhiPlus, Product, RandomState]


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def _bloch(name: str, vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be 3 finite reals, got {vec}")
    if np.linalg.norm(arr) > 1.0 + 1e-12:
        raise DomainError(f"{name} must have norm at most 1, got {np.linalg.norm(arr)}")
    return arr


def werner_theta(p: float) -> np.ndarray:
    return np.diag([1.0, p, -p, p])


def build(spec: StateSpec) -> TwoQubitState:
    """Construct and validate the state a spec names.

    Args:
        spec: One of the StateSpec variants.

    Returns:
        A validated TwoQubitState.

    Raises:
        DomainError: If a parameter is out of range.
    """
    if isinstance(spec, Werner):
        _check_unit_interval("p", spec.p)
        return TwoQubitState.from_theta(werner_theta(spec.p))

    if isinstance(spec, ModifiedWerner):
        _check_unit_interval("p", spec.p)
        if abs(spec.q) > 1.0:
            raise DomainError(f"|q| must be at most 1, got {spec.q}")
        theta = werner_theta(spec.p)
        # Alice's marginal carries the local bias: rows index A
        theta[3, 0] = spec.q * (1.0 - spec.p)
        return TwoQubitState.from_theta(theta)

    if isinstance(spec, BellPhiPlus):
        return TwoQubitState.from_theta(werner_theta(1.0))

    if isinstance(spec, Product):
        a = np.concatenate([[1.0], _bloch("bloch_a", spec.bloch_a)])
        b = np.concatenate([[1.0], _bloch("bloch_b", spec.bloch_b)])
        return TwoQubitState.from_theta(np.outer(a, b))

    if isinstance(spec, RandomState):
        return random_state(spec.seed)

    raise DomainError(f"unknown state spec {spec!r}")


def random_state(seed: int) -> TwoQubitState:
    """Seeded random density matrix G G^dag / Tr(G G^dag).

    G has independent standard-normal real and imaginary parts drawn from
    ``numpy.random.default_rng(seed)``, so equal seeds give bit-identical
    states on a given numpy release.
    """
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return theta_from_density(0.5 * (rho + rho.conj().T))
