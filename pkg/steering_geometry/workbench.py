"""File ingestion, analysis reports, parameter sweeps and boundary export.

This module is the library half of the command-line tool: everything here
returns plain Python objects or pandas DataFrames so it can be reused from
scripts and notebooks as well as from ``cli.py``.
"""

import json
import logging
import os
import textwrap
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import chardet
import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from steering_geometry.ansatz_box import (
    Ansatz,
    FiniteAnsatz,
    SphericalAnsatz,
    box_support,
    boundary_point,
    principal_vertex,
)
from steering_geometry.classify import (
    PackingCertificate,
    SeparabilityDecision,
    check_packing,
    decide_separable,
    is_ppt,
    threshold_scan,
)
from steering_geometry.epr import (
    EllipsoidReport,
    EprMap,
    TwoQubitState,
    Party,
    epr_map,
    reduced_state,
    steering_ellipsoid,
    steering_support,
    theta_from_density,
)
from steering_geometry.errors import (
    InvalidInputError,
    NoBracketError,
    ParseError,
    PreconditionError,
    ProjectionUndefinedError,
)
from steering_geometry.pauli_space import PauliVector
from steering_geometry.sampling import antipodal_directions
from steering_geometry.states import (
    BellPhiPlus,
    ModifiedWerner,
    Product,
    RandomState,
    StateSpec,
    Werner,
    build,
)

logger = logging.getLogger(__name__)

# Minimum confidence threshold for chardet encoding detection
MIN_CHARDET_CONFIDENCE = 0.7
UTF8_COMPATIBLE_ENCODINGS = ("utf-8", "ascii", "utf-8-sig")

SWEEP_COLUMNS = ["kind", "param", "ppt_min_eig", "packing_slack", "separable", "contained"]
BOUNDARY_COLUMNS = ["curve", "branch", "x0", "b_parallel"]
SWEEP_FAMILIES = ("werner", "modified_werner")
DEFAULT_STEP = 0.01
DEFAULT_BISECT_TOL = 1e-5
DEFAULT_BOUNDARY_POINTS = 1001
# in-plane slope range searched by the concave-envelope extent
_ENVELOPE_BOUND = 50.0
CSV_FLOAT_FORMAT = "%.17g"
CSV_LINE_TERMINATOR = "\r\n"

_SPEC_KEYS = {
    "werner": ("p",),
    "modified_werner": ("p", "q"),
    "bell": (),
    "product": ("ax", "ay", "az", "bx", "by", "bz"),
    "random": ("seed",),
}


def detect_and_decode(data: bytes) -> str:
    """Decode file bytes to NFC-normalised text.

    UTF-8 is tried first; chardet is consulted only when that fails.
    """
    try:
        decoded = data.decode("utf-8")
        if decoded.startswith("\ufeff"):
            decoded = decoded[1:]
        return unicodedata.normalize("NFC", decoded)
    except UnicodeDecodeError:
        pass

    try:
        detection = chardet.detect(data) or {}
        encoding = detection.get("encoding") or "utf-8"
        confidence = detection.get("confidence", 0)
        if confidence < MIN_CHARDET_CONFIDENCE and encoding.lower() not in UTF8_COMPATIBLE_ENCODINGS:
            logger.debug("low chardet confidence %.2f for %s; using utf-8", confidence, encoding)
            encoding = "utf-8"
        return unicodedata.normalize("NFC", data.decode(encoding, errors="replace"))
    except (UnicodeDecodeError, LookupError, AttributeError):
        return unicodedata.normalize("NFC", data.decode("utf-8", errors="replace"))


def parse_json_bytes(data: bytes, source: str):
    """Decode and parse a JSON document, reporting the failing line."""
    text = detect_and_decode(data)
    try:
        return json.loads(text)
    except json.JSONDecodeError as jde:
        context = textwrap.shorten(text, width=120, placeholder="...")
        raise ParseError(source, f"{jde.msg}. Sample: {context}", line=jde.lineno)


def _read_json_file(path: str):
    with open(path, "rb") as f:
        data = f.read()
    return parse_json_bytes(data, os.path.basename(path))


def parse_state_spec(text: str) -> StateSpec:
    """Parse ``name:key=value,key=value`` into a StateSpec.

    Names are werner (p), modified_werner (p, q), bell, product (ax, ay, az,
    bx, by, bz; unset components are 0) and random (seed).

    Raises:
        ParseError: Naming the offending field.
    """
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _SPEC_KEYS:
        raise ParseError(text, f"unknown state family '{name}'", field="name")
    values: Dict[str, float] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError(text, f"expected key=value, got '{item}'", field=key)
        if key not in _SPEC_KEYS[name]:
            raise ParseError(text, f"'{name}' does not take '{key}'", field=key)
        try:
            values[key] = int(raw) if key == "seed" else float(raw)
        except ValueError:
            raise ParseError(text, f"'{raw.strip()}' is not a number", field=key)

    missing = [k for k in _SPEC_KEYS[name] if k not in values and name != "product"]
    if missing:
        raise ParseError(text, f"missing value for '{missing[0]}'", field=missing[0])

    if name == "werner":
        return Werner(p=values["p"])
    if name == "modified_werner":
        return ModifiedWerner(p=values["p"], q=values["q"])
    if name == "bell":
        return BellPhiPlus()
    if name == "random":
        return RandomState(seed=values["seed"])
    return Product(
        bloch_a=tuple(values.get(k, 0.0) for k in ("ax", "ay", "az")),
        bloch_b=tuple(values.get(k, 0.0) for k in ("bx", "by", "bz")),
    )


def _matrix_field(doc: dict, key: str, source: str) -> np.ndarray:
    try:
        arr = np.array(doc[key], dtype=float)
    except (TypeError, ValueError):
        raise ParseError(source, "expected a 4x4 array of numbers", field=key)
    if arr.shape != (4, 4):
        raise ParseError(source, f"expected a 4x4 array, got shape {arr.shape}", field=key)
    return arr


def state_from_document(doc, source: str) -> TwoQubitState:
    """Build a state from a parsed JSON document.

    Exactly one representation is accepted: {"theta": 4x4} or
    {"rho_re": 4x4, "rho_im": 4x4}.
    """
    if not isinstance(doc, dict):
        raise ParseError(source, "top-level JSON must be an object")
    has_theta = "theta" in doc
    has_rho = "rho_re" in doc or "rho_im" in doc
    if has_theta == has_rho:
        raise ParseError(source, "give either 'theta' or 'rho_re'/'rho_im', not both or neither")
    if has_theta:
        return TwoQubitState.from_theta(_matrix_field(doc, "theta", source))
    for key in ("rho_re", "rho_im"):
        if key not in doc:
            raise ParseError(source, "missing density matrix component", field=key)
    rho = _matrix_field(doc, "rho_re", source) + 1j * _matrix_field(doc, "rho_im", source)
    return theta_from_density(rho)


def load_state_file(path: str) -> TwoQubitState:
    """Read a JSON state file (see :func:`state_from_document`)."""
    return state_from_document(_read_json_file(path), os.path.basename(path))


def load_state(source: str) -> TwoQubitState:
    """A state from a file path or, when no such file exists, a spec string."""
    if os.path.exists(source) or source.lower().endswith(".json"):
        return load_state_file(source)
    return build(parse_state_spec(source))


def ansatz_from_document(doc, source: str) -> Ansatz:
    """Finite generators from a list, or a mixture from {"mixture": [...]}."""
    if isinstance(doc, list):
        try:
            arr = np.array(doc, dtype=float)
        except (TypeError, ValueError):
            raise ParseError(source, "generators must be lists of 4 numbers", field="generators")
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ParseError(source, f"expected an m x 4 array, got shape {arr.shape}", field="generators")
        try:
            return FiniteAnsatz.from_array(arr)
        except InvalidInputError as exc:
            raise ParseError(source, str(exc), field="generators")

    if isinstance(doc, dict) and isinstance(doc.get("mixture"), list):
        weights, directions = [], []
        for i, item in enumerate(doc["mixture"]):
            try:
                weights.append(float(item["w"]))
                n = np.array(item["n"], dtype=float)
            except (KeyError, TypeError, ValueError):
                raise ParseError(source, f"entry {i} needs numeric 'w' and 'n'", field="mixture")
            if n.shape != (3,) or not np.linalg.norm(n) > 0:
                raise ParseError(source, f"entry {i}: 'n' must be a non-zero 3-vector", field="mixture")
            directions.append(n / np.linalg.norm(n))
        try:
            return SphericalAnsatz.mixture(weights, np.array(directions).reshape(-1, 3))
        except InvalidInputError as exc:
            raise ParseError(source, str(exc), field="mixture")

    raise ParseError(source, "expected a list of generators or an object with 'mixture'")


def load_ansatz_file(path: str) -> Ansatz:
    return ansatz_from_document(_read_json_file(path), os.path.basename(path))


def load_ansatz(choice: str) -> Ansatz:
    """'uniform', 'mixture:N' (N quasi-uniform point masses in antipodal pairs) or a JSON file path."""
    if choice == "uniform":
        return SphericalAnsatz.uniform()
    if choice.startswith("mixture:"):
        try:
            n = int(choice.split(":", 1)[1])
        except ValueError:
            raise ParseError(choice, "mixture size must be an integer", field="mixture")
        if n <= 0:
            raise ParseError(choice, "mixture size must be positive", field="mixture")
        if n % 2:
            logger.info("mixture size %d rounded up to %d for antipodal pairs", n, n + 1)
        directions = antipodal_directions(n)
        return SphericalAnsatz.mixture(np.full(len(directions), 1.0 / len(directions)), directions)
    return load_ansatz_file(choice)


def _ellipsoid_summary(report: Optional[EllipsoidReport]) -> Optional[dict]:
    if report is None:
        return None
    return {
        "center": report.center.tolist(),
        "semiaxes": report.semiaxes.tolist(),
        "orientation": report.orientation.tolist(),
        "degenerate": report.degenerate,
    }


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    """Everything ``analyze`` computes for one state.

    ``packing`` maps each requested ansatz name to its PackingCertificate, or
    to None when the ansatz's principal vertex does not sit at the reduced
    state and the check does not apply.
    """

    source: str
    theta: np.ndarray
    reduced_a: PauliVector
    reduced_b: PauliVector
    ellipsoid: Optional[EllipsoidReport]
    ppt: Tuple[bool, float]
    separability: SeparabilityDecision
    packing: Dict[str, Optional[PackingCertificate]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "theta": self.theta.tolist(),
            "reduced_a": list(self.reduced_a.x),
            "reduced_b": list(self.reduced_b.x),
            "ellipsoid": _ellipsoid_summary(self.ellipsoid),
            "ppt": {"is_ppt": self.ppt[0], "min_eigenvalue": self.ppt[1]},
            "separability": self.separability.summary(),
            "packing": {
                name: (cert.summary() if cert is not None else {"applicable": False})
                for name, cert in self.packing.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def analyze(
    source: str,
    ansatz_choices: Sequence[str] = ("uniform",),
    tol: Optional[float] = None,
    n_directions: Optional[int] = None,
) -> AnalysisReport:
    """Full geometric analysis of one state.

    Args:
        source: State file path or spec string.
        ansatz_choices: Ansatz names understood by :func:`load_ansatz`.
        tol: Containment tolerance for packing checks.
        n_directions: Direction budget for spherical packing checks.

    Returns:
        AnalysisReport.
    """
    state = load_state(source)
    map_ = epr_map(state)
    try:
        ellipsoid = steering_ellipsoid(state)
    except ProjectionUndefinedError as exc:
        logger.info("no steering ellipsoid: %s", exc)
        ellipsoid = None

    packing: Dict[str, Optional[PackingCertificate]] = {}
    for choice in ansatz_choices:
        ansatz = load_ansatz(choice)
        try:
            packing[choice] = check_packing(map_, ansatz, tol=tol, n_directions=n_directions)
        except PreconditionError as exc:
            logger.info("packing check for %s not applicable: %s", choice, exc)
            packing[choice] = None

    return AnalysisReport(
        source=source,
        theta=np.array(state.theta),
        reduced_a=reduced_state(state, Party.A),
        reduced_b=reduced_state(state, Party.B),
        ellipsoid=ellipsoid,
        ppt=is_ppt(state),
        separability=decide_separable(state),
        packing=packing,
    )


def family_builder(family: str, p_fixed: Optional[float] = None) -> Callable[[float], TwoQubitState]:
    """Map a sweep family name to parameter -> state.

    ``werner`` sweeps p; ``modified_werner`` sweeps q at fixed p.
    """
    if family == "werner":
        return lambda t: build(Werner(p=t))
    if family == "modified_werner":
        if p_fixed is None:
            raise InvalidInputError("modified_werner sweeps need a fixed p")
        return lambda t: build(ModifiedWerner(p=p_fixed, q=t))
    raise InvalidInputError(f"unknown sweep family '{family}', expected one of {SWEEP_FAMILIES}")


def sweep_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """lo, lo + step, ... up to hi; empty when hi < lo."""
    if step <= 0:
        raise InvalidInputError(f"step must be positive, got {step}")
    if hi < lo:
        return np.zeros(0)
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.minimum(lo + step * np.arange(count), hi)


def write_csv(df: pd.DataFrame, path: str) -> None:
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator=CSV_LINE_TERMINATOR)


def sweep(
    family: str,
    lo: float,
    hi: float,
    step: Optional[float] = DEFAULT_STEP,
    bisect: bool = False,
    ansatz: Optional[Ansatz] = None,
    p_fixed: Optional[float] = None,
    tol: Optional[float] = None,
    n_directions: Optional[int] = None,
    bisect_tol: float = DEFAULT_BISECT_TOL,
    out: Optional[str] = None,
) -> pd.DataFrame:
    """Tabulate PPT and packing results over a one-parameter family.

    Args:
        family: "werner" or "modified_werner".
        lo: First parameter value.
        hi: Last parameter value.
        step: Grid spacing; None skips the grid rows.
        bisect: Append threshold rows for every predicate that changes value.
        ansatz: Ansatz for packing checks (uniform by default).
        p_fixed: Fixed p of modified Werner sweeps.
        tol: Containment tolerance.
        n_directions: Direction budget of spherical packing checks.
        bisect_tol: Bracket half-width for thresholds.
        out: Optional CSV path.

    Returns:
        DataFrame with SWEEP_COLUMNS; threshold rows carry only kind and param.

    Raises:
        NoBracketError: In bisect mode, when no predicate changes over [lo, hi].
    """
    make_state = family_builder(family, p_fixed)
    ansatz = SphericalAnsatz.uniform() if ansatz is None else ansatz

    def contained(state: TwoQubitState) -> bool:
        return check_packing(epr_map(state), ansatz, tol=tol, n_directions=n_directions).contained

    def separable(state: TwoQubitState) -> bool:
        return is_ppt(state)[0]

    rows: List[dict] = []
    grid = sweep_grid(lo, hi, step) if step is not None else np.zeros(0)
    for t in grid:
        state = make_state(float(t))
        ppt, min_eig = is_ppt(state)
        cert = check_packing(epr_map(state), ansatz, tol=tol, n_directions=n_directions)
        rows.append(
            {
                "kind": "grid",
                "param": float(t),
                "ppt_min_eig": min_eig,
                "packing_slack": cert.slack,
                "separable": ppt,
                "contained": cert.contained,
            }
        )
    logger.debug("swept %d grid points of %s", len(grid), family)

    if bisect and lo < hi:
        found = 0
        for name, predicate in (("separable", separable), ("contained", contained)):
            try:
                threshold = threshold_scan(make_state, predicate, lo, hi, bisect_tol)
            except NoBracketError as exc:
                logger.info("no %s threshold on [%s, %s]: %s", name, lo, hi, exc)
                continue
            found += 1
            rows.append({"kind": f"threshold_{name}", "param": threshold})
        if not found:
            raise NoBracketError(f"neither predicate changes value on [{lo}, {hi}]")

    df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    if out is not None:
        write_csv(df, out)
    return df


def envelope_extent(support: Callable[[np.ndarray], float], plane: np.ndarray, x0: float) -> float:
    """Extent along ``plane`` of a convex body's projection at trace x0.

    With H(t) = 2 h((t, plane)) the support of the projection onto the
    (X0, plane) coordinates, the extent is inf_t [H(t) - t x0].
    """
    direction = np.concatenate([[0.0], plane])

    def objective(t: float) -> float:
        direction[0] = t
        return 2.0 * float(support(direction)) - t * x0

    res = minimize_scalar(
        objective,
        bounds=(-_ENVELOPE_BOUND, _ENVELOPE_BOUND),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.fun)


def _curve_frame(curve: str, branch: str, x0: np.ndarray, b: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({"curve": curve, "branch": branch, "x0": x0, "b_parallel": b})


def export_boundary(
    ansatz: Ansatz,
    map_: Optional[EprMap] = None,
    plane: Sequence[float] = (0.0, 0.0, 1.0),
    n_points: int = DEFAULT_BOUNDARY_POINTS,
    out: Optional[str] = None,
) -> pd.DataFrame:
    """Boundary curves of the box, the steering outcomes and the light-cone.

    Curves are the extent along the unit in-plane direction at each trace
    value X0 on a uniform grid from 0 to the principal vertex's X0. The
    uniform box is traced with cap boundary points; other bodies use their
    support functions.

    Args:
        ansatz: Hidden-state ansatz whose box is exported.
        map_: Optional EPR map; adds the steering curve.
        plane: In-plane spatial direction.
        n_points: Grid size per branch.
        out: Optional CSV path.

    Returns:
        Long-format DataFrame with BOUNDARY_COLUMNS; branch "+" runs along
        ``plane`` and "-" against it.
    """
    plane = np.asarray(plane, dtype=float)
    if plane.shape != (3,) or not np.linalg.norm(plane) > 0:
        raise InvalidInputError(f"plane must be a non-zero 3-vector, got {plane}")
    plane = plane / np.linalg.norm(plane)
    if n_points < 2:
        raise InvalidInputError(f"need at least 2 boundary points, got {n_points}")
    top = principal_vertex(ansatz).x0
    grid = np.linspace(0.0, top, n_points)

    frames = []
    for branch, sign in (("+", 1.0), ("-", -1.0)):
        axis = sign * plane
        if isinstance(ansatz, SphericalAnsatz) and ansatz.is_uniform:
            extent = np.array(
                [float(boundary_point(ansatz, axis, 1.0 - 2.0 * x).b @ axis) for x in grid]
            )
        else:
            extent = np.array(
                [envelope_extent(lambda w: box_support(ansatz, w), axis, x) for x in grid]
            )
        frames.append(_curve_frame("box", branch, grid, sign * extent))

        if map_ is not None:
            steer_top = map_.vertex.x0
            steer_grid = np.linspace(0.0, steer_top, n_points)
            extent = np.array(
                [envelope_extent(lambda w: steering_support(map_, w), axis, x) for x in steer_grid]
            )
            frames.append(_curve_frame("steering", branch, steer_grid, sign * extent))

        frames.append(_curve_frame("light_cone", branch, grid, sign * grid))

    df = pd.concat(frames, ignore_index=True)[BOUNDARY_COLUMNS]
    if out is not None:
        write_csv(df, out)
    return df
