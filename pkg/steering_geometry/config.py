"""Runtime defaults, overridable from the environment.

Set e.g. ``STEERING_GEOMETRY_DIRECTIONS=4096`` to change the direction
budget of spherical containment checks without touching code.
"""

import os
from dataclasses import dataclass, fields
from typing import Callable, Dict

# Cone membership tolerance; rounding in 4-component arithmetic sits far below it.
DEFAULT_CONE_TOL = 1e-9
DEFAULT_PACKING_TOL = 1e-9
DEFAULT_DIRECTIONS = 2048
DEFAULT_REFINE_STEPS = 20
DEFAULT_CERTIFICATE_ITERS = 200
DEFAULT_DIRECTION_SEED = 20160

ENV_PREFIX = "STEERING_GEOMETRY_"

_ENV_NAMES: Dict[str, str] = {
    "cone_tol": "CONE_TOL",
    "packing_tol": "PACKING_TOL",
    "n_directions": "DIRECTIONS",
    "refine_steps": "REFINE_STEPS",
    "certificate_iters": "CERT_ITERS",
    "direction_seed": "SEED",
}


@dataclass(frozen=True)
class Settings:
    """Numerical defaults shared by the classification layer and the CLI."""

    cone_tol: float = DEFAULT_CONE_TOL
    packing_tol: float = DEFAULT_PACKING_TOL
    n_directions: int = DEFAULT_DIRECTIONS
    refine_steps: int = DEFAULT_REFINE_STEPS
    certificate_iters: int = DEFAULT_CERTIFICATE_ITERS
    direction_seed: int = DEFAULT_DIRECTION_SEED

    @classmethod
    def from_env(cls, environ=None) -> "Settings":
        """Build settings from ``STEERING_GEOMETRY_*`` environment variables.

        Args:
            environ: Mapping to read from (defaults to ``os.environ``).

        Returns:
            Settings with every variable that is set applied over the defaults.

        Raises:
            ValueError: If a variable cannot be converted or is negative.
        """
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            name = ENV_PREFIX + _ENV_NAMES[f.name]
            raw = environ.get(name)
            if raw is None or raw.strip() == "":
                continue
            convert: Callable = int if f.type in (int, "int") else float
            try:
                value = convert(raw)
            except ValueError:
                raise ValueError(f"{name} must be a {convert.__name__}, got {raw!r}")
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {raw!r}")
            values[f.name] = value
        return cls(**values)


SETTINGS = Settings.from_env()
