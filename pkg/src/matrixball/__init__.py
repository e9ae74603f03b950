"""Numerical geometry of type-I matrix balls: geodesic triangle areas by
independent methods, polydisc projection diagnostics, and extremal search
toward the rank * pi area bound."""

from .domain import (
    ConditioningWarning,
    GeodesicSegment,
    MatrixPoint,
    MembershipError,
    ShapeError,
    SingularDecomposition,
    as_point,
    contains,
    distance,
    geodesic,
    mobius_translate,
    random_point,
    random_unitary,
    shilov_defect,
    svd_reduce,
)
from .polydisc import (
    PolydiscPoint,
    ProjectionError,
    area_additivity_check,
    embed,
    project_to_polydisc,
    verify_orthogonality,
    verify_projection_invariance,
    verify_totally_real_vanishing,
)
from .potentials import (
    BranchWarning,
    ConjugatePair,
    PotentialField,
    conjugate_pair,
    dC_rho,
    kahler_form,
    metric_inner,
    rho_at,
    rho_origin,
)
from .search import (
    BoundViolationError,
    SearchConfig,
    SearchTrace,
    bound_check,
    boundary_sweep,
    equality_diagnostics,
    maximize_area,
)
from .triangle import (
    AreaResult,
    TrianglePatch,
    area_gauss_bonnet,
    area_quadrature,
    area_stokes,
    area_vformula,
    disc_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "AreaResult",
    "BoundViolationError",
    "BranchWarning",
    "ConditioningWarning",
    "ConjugatePair",
    "GeodesicSegment",
    "MatrixPoint",
    "MembershipError",
    "PolydiscPoint",
    "PotentialField",
    "ProjectionError",
    "SearchConfig",
    "SearchTrace",
    "ShapeError",
    "SingularDecomposition",
    "TrianglePatch",
    "area_additivity_check",
    "area_gauss_bonnet",
    "area_quadrature",
    "area_stokes",
    "area_vformula",
    "as_point",
    "bound_check",
    "boundary_sweep",
    "conjugate_pair",
    "contains",
    "dC_rho",
    "disc_closed_form",
    "distance",
    "embed",
    "equality_diagnostics",
    "geodesic",
    "kahler_form",
    "maximize_area",
    "metric_inner",
    "mobius_translate",
    "project_to_polydisc",
    "random_point",
    "random_unitary",
    "rho_at",
    "rho_origin",
    "shilov_defect",
    "svd_reduce",
    "verify_orthogonality",
    "verify_projection_invariance",
    "verify_totally_real_vanishing",
]
