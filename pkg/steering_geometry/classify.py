"""Separability and steerability decisions built on the box geometry.

A state is unsteerable for binary measurements with a given hidden-state
ansatz exactly when Alice's steering outcomes fit inside the ansatz's box,
and separable exactly when they fit inside a box of four generators. The
PPT criterion is exact for two qubits and decides separability; box
certificates are searched for and verified independently.
"""

import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from steering_geometry.ansatz_box import (
    Ansatz,
    FiniteAnsatz,
    SphericalAnsatz,
    box_from_cone,
    box_support,
    facet_normals,
    principal_vertex,
    solve_box_weights,
)
from steering_geometry.config import SETTINGS
from steering_geometry.epr import (
    EllipsoidReport,
    EprMap,
    TwoQubitState,
    apply_map,
    epr_map,
    steering_ellipsoid,
    steering_support,
)
from steering_geometry.errors import (
    CertificateViolationError,
    DomainError,
    GeometricInfeasibilityError,
    InvalidInputError,
    NoBracketError,
    PreconditionError,
    ProjectionUndefinedError,
    RankError,
)
from steering_geometry.pauli_space import PauliVector, classify_cone, eigenvalues_of
from steering_geometry.sampling import quasi_random_sphere4

logger = logging.getLogger(__name__)

VERTEX_TOL = 1e-8
RESIDUAL_TOL = 1e-8
STOCHASTIC_TOL = 1e-9
FACE_SLACK_TOL = 1e-10
CERTIFICATE_CHECK_TOL = 1e-8
PPT_TOL = 1e-9

# great-circle refinement around the worst sampled direction
_INITIAL_ARC = 0.3
_MIN_ARC = 1e-7
# sampled directions refined by Nelder-Mead besides the map frame
_REFINE_STARTS = 16
# tetrahedron coordinate descent
_INITIAL_ANGLE_STEP = 0.2
_MIN_ANGLE_STEP = 1e-7
_TARGET_FACE_SLACK = 1e-6

_REGULAR_EVEN = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3.0)
_REGULAR_ODD = -_REGULAR_EVEN


class DecisionMethod(Enum):
    PPT = "PPT"
    BOX_CERTIFICATE = "BoxCertificate"


@dataclass(frozen=True, eq=False)
class PackingCertificate:
    """Outcome of a containment check of steering outcomes in a box.

    Attributes:
        contained: True iff slack >= -tol.
        slack: Minimum over checked directions of box minus steering support.
        witness: A direction where the steering support exceeds the box's,
            present only when not contained.
        method: "facets" for the exact finite check, "sampling" otherwise.
        degenerate: True when a finite box is not full-dimensional and the
            check fell back to sampling.
    """

    contained: bool
    slack: float
    witness: Optional[PauliVector] = None
    method: str = "facets"
    degenerate: bool = False

    def summary(self) -> dict:
        return {
            "contained": self.contained,
            "slack": self.slack,
            "witness": list(self.witness.x) if self.witness is not None else None,
            "method": self.method,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True, eq=False)
class SeparabilityDecision:
    """Separability verdict and, when found, a verified 4-generator box."""

    separable: bool
    method: DecisionMethod
    certificate: Optional[FiniteAnsatz]
    ppt_min_eigenvalue: float

    def summary(self) -> dict:
        cert = None
        if self.certificate is not None:
            cert = [list(g.x) for g in self.certificate.generators]
        return {
            "separable": self.separable,
            "method": self.method.value,
            "certificate": cert,
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
        }


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Column-stochastic matrix: entries in [0, 1], columns summing to one."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.array(self.entries, dtype=float)
        if g.ndim != 2:
            raise InvalidInputError(f"a stochastic matrix must be 2D, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidInputError("stochastic matrix entries must be finite")
        if g.size and (g.min() < -STOCHASTIC_TOL or g.max() > 1.0 + STOCHASTIC_TOL):
            raise InvalidInputError("stochastic matrix entries must lie in [0, 1]")
        sums = g.sum(axis=0)
        if g.size and np.max(np.abs(sums - 1.0)) > STOCHASTIC_TOL:
            raise InvalidInputError(f"columns must sum to 1, got {sums}")
        g = np.clip(g, 0.0, 1.0)
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class LhsResponse:
    """Hidden-state response reproducing one measurement outcome.

    A finite ansatz gives explicit weights beta_j; the uniform ansatz gives
    the cap response f(n) = scale * 1[n.n0 > lam] + offset.
    """

    weights: Optional[np.ndarray] = None
    lam: Optional[float] = None
    n0: Optional[np.ndarray] = None
    scale: float = 0.0
    offset: float = 0.0
    residual: float = 0.0

    @property
    def is_finite(self) -> bool:
        return self.weights is not None

    def stochastic(self) -> StochasticMatrix:
        """The binary-outcome rows (beta, 1 - beta)."""
        if not self.is_finite:
            raise DomainError("a cap response has no finite weight vector")
        return StochasticMatrix(np.vstack([self.weights, 1.0 - self.weights]))

    def evaluate(self, directions) -> np.ndarray:
        """f(n) at unit vectors of shape (N, 3)."""
        if self.is_finite:
            raise DomainError("finite responses are given by their weights")
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        return self.scale * (directions @ self.n0 > self.lam) + self.offset

    def complement(self) -> "LhsResponse":
        """Response of the complementary outcome, 1 - f."""
        if self.is_finite:
            return LhsResponse(weights=1.0 - self.weights, residual=self.residual)
        return LhsResponse(
            lam=self.lam,
            n0=self.n0,
            scale=-self.scale,
            offset=1.0 - self.offset,
            residual=self.residual,
        )

    def reconstruct(self, ansatz: Ansatz) -> PauliVector:
        """The box point integral f dU this response produces."""
        if self.is_finite:
            gens = ansatz.matrix if isinstance(ansatz, FiniteAnsatz) else ansatz.as_finite().matrix
            return PauliVector.from_array(gens @ self.weights)
        t = min(max(self.lam, -1.0), 1.0)
        x0 = self.scale * (1.0 - t) / 2.0 + self.offset
        b = self.scale * (1.0 - t * t) / 4.0 * self.n0
        return PauliVector.from_array(np.concatenate([[x0], b]))


@dataclass(frozen=True, eq=False)
class TetrahedronSearch:
    """Result of the tetrahedron search around the steering ellipsoid.

    Attributes:
        vertices: Tetrahedron vertices on the unit sphere, shape (4, 3).
        face_slack: Minimum over faces of plane offset minus ellipsoid support.
        iterations: Coordinate-descent sweeps performed.
        certificate: The verified 4-generator box, or None.
    """

    vertices: np.ndarray
    face_slack: float
    iterations: int
    certificate: Optional[FiniteAnsatz]


def _gap(map_: EprMap, ansatz: Ansatz, w: np.ndarray) -> Union[float, np.ndarray]:
    return box_support(ansatz, w) - steering_support(map_, w)


def _tangent_basis(w: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(w[None, :])
    return vh[1:]


def _rotate(w: np.ndarray, t: np.ndarray, theta: float) -> np.ndarray:
    return np.cos(theta) * w + np.sin(theta) * t


def _refine_worst(map_: EprMap, ansatz: Ansatz, w: np.ndarray, value: float, steps: int):
    """Bounded line searches along great circles through the worst direction."""
    arc = _INITIAL_ARC
    for step in range(steps):
        improved = False
        for t in _tangent_basis(w):
            res = minimize_scalar(
                lambda th: float(_gap(map_, ansatz, _rotate(w, t, th))),
                bounds=(-arc, arc),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if res.fun < value:
                w = _rotate(w, t, res.x)
                w = w / np.linalg.norm(w)
                value = float(res.fun)
                improved = True
        if not improved:
            arc *= 0.5
        if arc < _MIN_ARC:
            break
        logger.debug("refinement step %d: slack %.3e, arc %.2e", step, value, arc)
    return w, value


def _polish(map_: EprMap, ansatz: Ansatz, w: np.ndarray, value: float, steps: int):
    """Nelder-Mead on the tangent chart of S^3 at ``w``."""
    basis = _tangent_basis(w)

    def chart(x):
        v = w + x @ basis
        return v / np.linalg.norm(v)

    res = minimize(
        lambda x: float(_gap(map_, ansatz, chart(x))),
        np.zeros(3),
        method="Nelder-Mead",
        options={
            "initial_simplex": np.vstack([np.zeros(3), _INITIAL_ARC * np.eye(3)]),
            "xatol": 1e-10,
            "fatol": 1e-15,
            "maxiter": 20 * steps,
        },
    )
    if res.fun < value:
        return chart(res.x), float(res.fun)
    return w, value


def _frame_seeds(map_: EprMap) -> np.ndarray:
    """Axes of the map's output frame, with and without their X0 part."""
    u, _, _ = np.linalg.svd(map_.m)
    seeds = [np.eye(4)]
    for col in u.T:
        seeds.append(col[None, :])
        spatial = col[1:]
        norm = np.linalg.norm(spatial)
        if norm > 1e-9:
            seeds.append(np.concatenate([[0.0], spatial / norm])[None, :])
    seeds = np.vstack(seeds)
    return np.vstack([seeds, -seeds])


def _sampled_slack(map_, ansatz, n_directions, seed, refine_steps):
    # the axes of the map's own output frame are always refined
    dirs = np.vstack([_frame_seeds(map_), quasi_random_sphere4(n_directions, seed)])
    gaps = _gap(map_, ansatz, dirs)
    n_frame = len(dirs) - n_directions
    starts = list(range(n_frame)) + [n_frame + i for i in np.argsort(gaps[n_frame:])[:_REFINE_STARTS]]
    best_w, best = dirs[int(np.argmin(gaps))], float(np.min(gaps))
    for i in starts:
        w, value = _polish(map_, ansatz, dirs[i], float(gaps[i]), refine_steps)
        if value < best:
            best_w, best = w, value
    logger.debug("multistart over %d starts: slack %.3e", len(starts), best)
    return _refine_worst(map_, ansatz, best_w, best, refine_steps)


def check_packing(
    map_: EprMap,
    ansatz: Ansatz,
    tol: Optional[float] = None,
    n_directions: Optional[int] = None,
    seed: Optional[int] = None,
    refine_steps: Optional[int] = None,
) -> PackingCertificate:
    """Test whether the steering outcomes of ``map_`` fit inside box(ansatz).

    Finite ansaetze are checked exactly over the box's facet normals.
    Spherical ansaetze, and finite boxes that are not full-dimensional, are
    checked over quasi-random unit directions plus the axes of the map's
    output frame, refined by Nelder-Mead from every frame axis and from the
    lowest sampled directions.

    Args:
        map_: EPR map whose outcome set is tested.
        ansatz: Hidden-state ansatz.
        tol: Containment tolerance on the slack.
        n_directions: Sampled directions for spherical checks.
        seed: Seed of the direction sample.
        refine_steps: Scales the Nelder-Mead budget and bounds the great-circle
            rounds around the worst direction found.

    Returns:
        PackingCertificate.

    Raises:
        PreconditionError: If the box's principal vertex is not the image of
            the identity.
    """
    tol = SETTINGS.packing_tol if tol is None else tol
    n_directions = SETTINGS.n_directions if n_directions is None else n_directions
    seed = SETTINGS.direction_seed if seed is None else seed
    refine_steps = SETTINGS.refine_steps if refine_steps is None else refine_steps
    if tol < 0:
        raise InvalidInputError(f"tol must be non-negative, got {tol}")

    vertex = principal_vertex(ansatz).as_array()
    expected = map_.vertex.as_array()
    if np.max(np.abs(vertex - expected)) > VERTEX_TOL:
        raise PreconditionError(
            f"box principal vertex {vertex} does not match the reduced state {expected}"
        )

    degenerate = False
    if isinstance(ansatz, FiniteAnsatz):
        facets = facet_normals(ansatz) if len(ansatz) >= 3 else None
        if facets is not None and not facets.degenerate:
            normals = facets.as_array()
            gaps = _gap(map_, ansatz, normals)
            worst = int(np.argmin(gaps))
            slack = float(gaps[worst])
            contained = slack >= -tol
            return PackingCertificate(
                contained=contained,
                slack=slack,
                witness=None if contained else PauliVector.from_array(normals[worst]),
                method="facets",
            )
        degenerate = True
        message = "box is not full-dimensional; falling back to sampled directions"
        logger.warning(message)
        warnings.warn(message, RuntimeWarning)

    w, slack = _sampled_slack(map_, ansatz, n_directions, seed, refine_steps)
    contained = slack >= -tol
    logger.debug("sampled containment check: slack %.3e over %d directions", slack, n_directions)
    return PackingCertificate(
        contained=contained,
        slack=slack,
        witness=None if contained else PauliVector.from_array(w),
        method="sampling",
        degenerate=degenerate,
    )


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Partial transpose over the second qubit."""
    return np.asarray(rho).reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def is_ppt(state: TwoQubitState, tol: float = PPT_TOL) -> Tuple[bool, float]:
    """Peres-Horodecki test, exact for two qubits.

    Returns:
        (min eigenvalue >= -tol, min eigenvalue of the partial transpose).
    """
    pt = partial_transpose(state.density)
    min_eig = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return min_eig >= -tol, min_eig


def _unit(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


def _angles(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return np.arccos(np.clip(v[:, 2], -1.0, 1.0)), np.arctan2(v[:, 1], v[:, 0])


def face_slack(vertices: np.ndarray, ellipsoid: EllipsoidReport) -> float:
    """Minimum over faces of (plane offset - ellipsoid support) for a tetrahedron.

    Non-negative iff the ellipsoid lies inside the tetrahedron.
    """
    centroid = vertices.mean(axis=0)
    worst = np.inf
    for i in range(4):
        face = np.delete(vertices, i, axis=0)
        u = np.cross(face[1] - face[0], face[2] - face[0])
        norm = np.linalg.norm(u)
        if norm < 1e-12:
            return -np.inf
        u = u / norm
        d = float(u @ face[0])
        if u @ centroid > d:
            u, d = -u, -d
        worst = min(worst, d - float(ellipsoid.support(u)))
    return worst


def _sphere_hit(origin: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Point where the ray origin + s * direction (s > 0) leaves the unit ball."""
    direction = direction / np.linalg.norm(direction)
    along = float(origin @ direction)
    s = -along + np.sqrt(max(along * along + 1.0 - float(origin @ origin), 0.0))
    return origin + s * direction


def _initial_tetrahedra(ellipsoid: EllipsoidReport) -> List[np.ndarray]:
    rot = ellipsoid.orientation
    if np.linalg.det(rot) < 0:
        rot = rot * np.array([1.0, 1.0, -1.0])
    c = ellipsoid.center
    if np.linalg.norm(c) >= 1.0:
        c = np.zeros(3)
    e1, e2, e3 = rot.T
    candidates = []
    for base in (_REGULAR_EVEN, _REGULAR_ODD):
        for frame in (rot, np.eye(3)):
            dirs = base @ frame.T
            candidates.append(dirs)
            candidates.append(np.array([_sphere_hit(c, d) for d in dirs]))
    # disphenoids: two skew chords along the major axes at heights -h and +h
    for h in (0.25, 0.5):
        for sign in (1.0, -1.0):
            lo, hi = c - sign * h * e3, c + sign * h * e3
            candidates.append(
                np.array([_sphere_hit(lo, e1), _sphere_hit(lo, -e1), _sphere_hit(hi, e2), _sphere_hit(hi, -e2)])
            )
    return candidates


def tetrahedron_certificate(state: TwoQubitState, max_iters: Optional[int] = None) -> TetrahedronSearch:
    """Search for a tetrahedron inside the Bloch ball around the steering ellipsoid.

    Candidate tetrahedra are built from the ellipsoid's principal axes and
    improved by coordinate descent on the spherical angles of the vertices,
    maximising the smallest face slack. A tetrahedron with non-negative
    slack lifts to four cone generators (1, v_i); rescaling them about the
    centre of the steering outcomes gives the certificate box, which is then
    checked against the outcomes' facets.

    Raises:
        ProjectionUndefinedError: If Alice's reduced state is pure.
    """
    max_iters = SETTINGS.certificate_iters if max_iters is None else max_iters
    ellipsoid = steering_ellipsoid(state)
    best = max(_initial_tetrahedra(ellipsoid), key=lambda v: face_slack(v, ellipsoid))
    theta, phi = _angles(best)
    params = np.concatenate([theta, phi])
    value = face_slack(_unit(params[:4], params[4:]), ellipsoid)

    step = _INITIAL_ANGLE_STEP
    iterations = 0
    while iterations < max_iters and value < _TARGET_FACE_SLACK and step >= _MIN_ANGLE_STEP:
        iterations += 1
        improved = False
        for k in range(8):
            for delta in (step, -step):
                trial = params.copy()
                trial[k] += delta
                trial_value = face_slack(_unit(trial[:4], trial[4:]), ellipsoid)
                if trial_value > value:
                    params, value, improved = trial, trial_value, True
                    break
        if not improved:
            step *= 0.5
    vertices = _unit(params[:4], params[4:])
    logger.debug("tetrahedron search: face slack %.3e after %d sweeps", value, iterations)

    certificate = None
    if value >= -FACE_SLACK_TOL:
        map_ = epr_map(state)
        generators = [PauliVector.from_array(np.concatenate([[1.0], v])) for v in vertices]
        try:
            candidate = box_from_cone(generators, map_.center)
        except (GeometricInfeasibilityError, RankError) as exc:
            logger.warning("tetrahedron does not lift to a box: %s", exc)
        else:
            check = check_packing(map_, candidate, tol=CERTIFICATE_CHECK_TOL)
            if check.contained:
                certificate = candidate
            else:
                logger.warning("tetrahedron box failed verification (slack %.3e)", check.slack)
    return TetrahedronSearch(vertices=vertices, face_slack=value, iterations=iterations, certificate=certificate)


def _product_certificate(map_: EprMap) -> FiniteAnsatz:
    """Four equal quarter copies of the reduced state for a rank-one map."""
    quarter = map_.vertex * 0.25
    return FiniteAnsatz((quarter,) * 4)


def decide_separable(state: TwoQubitState, tol: float = PPT_TOL) -> SeparabilityDecision:
    """Separability by the PPT criterion, with a best-effort box certificate.

    Args:
        state: The two-qubit state.
        tol: Tolerance on the partial transpose's smallest eigenvalue.

    Returns:
        SeparabilityDecision; ``certificate`` is set only when one was found
        and passed verification.
    """
    ppt, min_eig = is_ppt(state, tol)
    if not ppt:
        return SeparabilityDecision(False, DecisionMethod.PPT, None, min_eig)

    map_ = epr_map(state)
    certificate = None
    if map_.rank <= 1:
        certificate = _product_certificate(map_)
    else:
        try:
            certificate = tetrahedron_certificate(state).certificate
        except ProjectionUndefinedError as exc:
            logger.warning("no certificate search: %s", exc)
    if certificate is None:
        logger.info("separable state without a box certificate (PPT min eigenvalue %.3e)", min_eig)
        return SeparabilityDecision(True, DecisionMethod.PPT, None, min_eig)
    return SeparabilityDecision(True, DecisionMethod.BOX_CERTIFICATE, certificate, min_eig)


def lhs_response(
    ansatz: Ansatz,
    map_: EprMap,
    e: PauliVector,
    tol: float = RESIDUAL_TOL,
) -> LhsResponse:
    """Hidden-state response reproducing the steered outcome e' = map(e).

    Finite ansaetze (and discrete mixtures) get weights beta in [0, 1]^m from
    a bounded least-squares solve. The uniform ansatz gets the cap response
    scale * 1[n.n0 > lam] + offset with lam = 1 - 2 x0, n0 along b and
    scale = |b| / (x0 (1 - x0)).

    Raises:
        DomainError: If e is not a measurement outcome.
        CertificateViolationError: If e' lies outside the box.
    """
    if not classify_cone(e).in_double_cone:
        raise DomainError(f"{e.x} is not a measurement outcome")
    target = apply_map(map_, e)

    if isinstance(ansatz, SphericalAnsatz) and ansatz.is_uniform:
        x0, b = target.x0, target.bloch
        r = float(np.linalg.norm(b))
        radius = x0 * (1.0 - x0) if 0.0 <= x0 <= 1.0 else 0.0
        excess = max(r - radius, -x0, x0 - 1.0)
        if excess > tol:
            raise CertificateViolationError("steered outcome lies outside the uniform box", excess)
        x0 = min(max(x0, 0.0), 1.0)
        n0 = b / r if r > 0 else np.array([0.0, 0.0, 1.0])
        scale = min(r / radius, 1.0) if radius > 0 else 0.0
        return LhsResponse(
            lam=1.0 - 2.0 * x0,
            n0=n0,
            scale=scale,
            offset=(1.0 - scale) * x0,
            residual=max(excess, 0.0),
        )

    finite = ansatz if isinstance(ansatz, FiniteAnsatz) else ansatz.as_finite()
    beta, residual = solve_box_weights(finite, target)
    if residual >= tol:
        raise CertificateViolationError("no box weights reproduce the steered outcome", residual)
    return LhsResponse(weights=beta, residual=residual)


def compose_stochastic(h: StochasticMatrix, k: StochasticMatrix) -> StochasticMatrix:
    """Product G = H K of two stochastic matrices."""
    if h.shape[1] != k.shape[0]:
        raise InvalidInputError(f"cannot compose {h.shape} with {k.shape}")
    return StochasticMatrix(h.entries @ k.entries)


def binary_povm_from_spectral(e1: PauliVector) -> Tuple[StochasticMatrix, PauliVector, PauliVector]:
    """Write a binary POVM {E1, I - E1} as a coarse-graining of a projective one.

    E1 = H11 P1 + H12 P2 with P1, P2 the eigenprojectors of E1 ordered by
    ascending eigenvalue; isotropic E1 uses the z-axis pair.

    Raises:
        DomainError: If e1 is not a measurement outcome.
    """
    if not classify_cone(e1).in_double_cone:
        raise DomainError(f"{e1.x} is not a measurement outcome")
    lo, hi = eigenvalues_of(e1)
    r = float(np.linalg.norm(e1.bloch))
    n = e1.bloch / r if r > 1e-12 else np.array([0.0, 0.0, 1.0])
    p1 = PauliVector.from_array(np.concatenate([[1.0], -n]))
    p2 = PauliVector.from_array(np.concatenate([[1.0], n]))
    h = StochasticMatrix(np.array([[lo, hi], [1.0 - lo, 1.0 - hi]]))
    return h, p1, p2


def threshold_scan(
    family: Callable[[float], TwoQubitState],
    predicate: Callable[[TwoQubitState], bool],
    lo: float,
    hi: float,
    tol: float,
) -> float:
    """Bisect for the parameter where ``predicate(family(t))`` changes value.

    Args:
        family: Maps a parameter to a state.
        predicate: Monotone test on the states.
        lo: Lower end of the bracket.
        hi: Upper end of the bracket.
        tol: Half-width of the final bracket.

    Returns:
        Midpoint of the final bracket.

    Raises:
        NoBracketError: If the predicate agrees at both ends.
    """
    if not lo < hi:
        raise InvalidInputError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    at_lo = bool(predicate(family(lo)))
    if at_lo == bool(predicate(family(hi))):
        raise NoBracketError(f"predicate is {at_lo} at both ends of [{lo}, {hi}]")
    while hi - lo > 2.0 * tol:
        mid = 0.5 * (lo + hi)
        if bool(predicate(family(mid))) == at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
