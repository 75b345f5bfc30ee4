"""Steering Geometry - support-function geometry of two-qubit steering and separability."""

from steering_geometry.pauli_space import (
    PauliVector,
    ConeMembership,
    IDENTITY,
    classify_cone,
    eigenvalues_of,
    inner,
    outcome_support,
)
from steering_geometry.epr import (
    TwoQubitState,
    EprMap,
    EllipsoidReport,
    Side,
    Party,
    theta_from_density,
    epr_map,
    apply_map,
    reduced_state,
    steering_support,
    steering_ellipsoid,
)
from steering_geometry.ansatz_box import (
    FiniteAnsatz,
    SphericalAnsatz,
    BoundaryPoint,
    FacetNormals,
    principal_vertex,
    box_support,
    boundary_point,
    uniform_cross_section_radius,
    facet_normals,
    box_from_cone,
    contains_point,
)
from steering_geometry.classify import (
    PackingCertificate,
    SeparabilityDecision,
    StochasticMatrix,
    LhsResponse,
    check_packing,
    is_ppt,
    decide_separable,
    tetrahedron_certificate,
    lhs_response,
    compose_stochastic,
    binary_povm_from_spectral,
    threshold_scan,
)
from steering_geometry.states import (
    Werner,
    ModifiedWerner,
    BellPhiPlus,
    Product,
    RandomState,
    build,
    random_state,
)
from steering_geometry.workbench import (
    AnalysisReport,
    analyze,
    sweep,
    export_boundary,
)

__version__ = "1.0.0"

__all__ = [
    "PauliVector",
    "ConeMembership",
    "IDENTITY",
    "classify_cone",
    "eigenvalues_of",
    "inner",
    "outcome_support",
    "TwoQubitState",
    "EprMap",
    "EllipsoidReport",
    "Side",
    "Party",
    "theta_from_density",
    "epr_map",
    "apply_map",
    "reduced_state",
    "steering_support",
    "steering_ellipsoid",
    "FiniteAnsatz",
    "SphericalAnsatz",
    "BoundaryPoint",
    "FacetNormals",
    "principal_vertex",
    "box_support",
    "boundary_point",
    "uniform_cross_section_radius",
    "facet_normals",
    "box_from_cone",
    "contains_point",
    "PackingCertificate",
    "SeparabilityDecision",
    "StochasticMatrix",
    "LhsResponse",
    "check_packing",
    "is_ppt",
    "decide_separable",
    "tetrahedron_certificate",
    "lhs_response",
    "compose_stochastic",
    "binary_povm_from_spectral",
    "threshold_scan",
    "Werner",
    "ModifiedWerner",
    "BellPhiPlus",
    "Product",
    "RandomState",
    "build",
    "random_state",
    "AnalysisReport",
    "analyze",
    "sweep",
    "export_boundary",
]
