"""Exception types raised by the steering_geometry package.

Every error derives from ``ValueError`` so callers that already guard
against the builtin keep working. The CLI maps them onto exit codes.
"""

from typing import Optional


class SteeringGeometryError(Exception):
    """Base mixin for all package errors."""


class InvalidInputError(SteeringGeometryError, ValueError):
    """Non-finite coordinates or arrays of the wrong shape."""


class StateValidationError(SteeringGeometryError, ValueError):
    """A density matrix or correlation matrix violates a state invariant.

    Attributes:
        invariant: Name of the violated invariant ("hermitian", "trace",
            "positivity" or "shape").
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class DomainError(SteeringGeometryError, ValueError):
    """An argument lies outside the domain of an operation."""


class RankError(SteeringGeometryError, ValueError):
    """Generators are linearly dependent where independence is required."""


class GeometricInfeasibilityError(SteeringGeometryError, ValueError):
    """A geometric construction has no solution (e.g. cones do not overlap)."""


class ProjectionUndefinedError(SteeringGeometryError, ValueError):
    """Projective normalisation would divide by a vanishing X0."""


class PreconditionError(SteeringGeometryError, ValueError):
    """The box principal vertex does not sit at the reduced state."""


class CertificateViolationError(SteeringGeometryError, ValueError):
    """A point expected inside a box could not be reproduced by box weights.

    Attributes:
        residual: Euclidean norm of the best reconstruction error.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NoBracketError(SteeringGeometryError, ValueError):
    """A bisection interval does not bracket a predicate change."""


class ParseError(SteeringGeometryError, ValueError):
    """A state spec, state file or ansatz file could not be parsed.

    Attributes:
        source: File name or the literal spec string.
        line: 1-based line number, when known.
        field: Offending key or field name, when known.
    """

    def __init__(
        self,
        source: str,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ):
        where = source
        if line is not None:
            where += f", line {line}"
        if field is not None:
            where += f", field '{field}'"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line
        self.field = field
