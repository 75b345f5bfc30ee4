"""Deterministic point sets on the unit spheres S^2 and S^3."""

import numpy as np
from scipy.stats import norm, qmc

# 1/phi for the one-dimensional golden-ratio (R_1) sequence
_INV_GOLDEN = 0.6180339887498949


def quasi_uniform_directions(n: int, seed: float = 0.5) -> np.ndarray:
    """Quasi-uniform unit vectors on S^2.

    Uses the golden-ratio additive recurrence for the azimuth and equal-area
    strata in z, so the empirical measure converges to the uniform one.

    Args:
        n: Number of points.
        seed: Offset of the additive recurrence.

    Returns:
        Array of shape (n, 3).
    """
    if n <= 0:
        return np.zeros((0, 3))
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = 2.0 * np.pi * ((seed + _INV_GOLDEN * (i + 1)) % 1.0)
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def quasi_random_sphere4(n: int, seed: int) -> np.ndarray:
    """Low-discrepancy unit vectors on S^3.

    Scrambled Halton points in the open unit cube are mapped through the
    inverse normal CDF and normalised, which pushes a low-discrepancy cube
    sample onto the sphere.

    Args:
        n: Number of points.
        seed: Scrambling seed; equal seeds give equal point sets.

    Returns:
        Array of shape (n, 4).
    """
    if n <= 0:
        return np.zeros((0, 4))
    cube = qmc.Halton(d=4, scramble=True, seed=seed).random(n)
    cube = np.clip(cube, 1e-12, 1.0 - 1e-12)
    gauss = norm.ppf(cube)
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def antipodal_directions(n: int) -> np.ndarray:
    """Quasi-uniform unit vectors on S^2 closed under n -> -n.

    The points come in antipodal pairs, so their sum vanishes and an
    equal-weight mixture over them has zero mean direction. Odd ``n`` is
    rounded up to the next even count.

    Returns:
        Array of shape (2 * ceil(n / 2), 3).
    """
    half = quasi_uniform_directions((max(n, 0) + 1) // 2)
    return np.vstack([half, -half])
