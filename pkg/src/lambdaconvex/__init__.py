"""Reverse isoperimetric inequalities for lambda-convex curves on the sphere."""

from ._backend import COMPILED
from .curve_model import (
    Arc,
    ArcPolygon,
    ArcSupport,
    MeasureReport,
    SupportCurve,
    TrigSupport,
    Vertex,
    area,
    curvature_radius,
    dumps,
    is_lambda_convex,
    jump_angle,
    length,
    loads,
    measure,
    polygon_from_vertices,
    support_from_arcs,
    support_from_function,
)
from .errors import (
    BranchError,
    ConvexityError,
    CurvatureRangeError,
    DomainError,
    GeometryError,
    InfeasibleError,
    RigidityError,
    SupportOverflowError,
)
from .extremal_shapes import (
    LuneSpec,
    euclid_lower_bound,
    euclid_upper_bound,
    lower_bound_deficit,
    lune_area,
    make_lune,
    make_racetrack,
    racetrack_length_bound,
    upper_bound_slack,
)
from .optimal_control import (
    AdjointState,
    ControlState,
    ControlTrajectory,
    PMPReport,
    Schedule,
    integrate_trajectory,
    schedule_from_polygon,
    verify_pmp,
)
from .polar_duality import dual_curvature, duality_identities, polar_dual
from .polygon_optimizer import OptimizerReport, deform_to_lune, diameter, four_bar_deform, minimize_area, symmetrize
from .sphere_core import UNIT, Metric, SpherePoint, geodesic_circle, triangle_area, triangle_area_argmax

__version__ = "0.1.0"

__all__ = [
    "AdjointState",
    "Arc",
    "ArcPolygon",
    "ArcSupport",
    "BranchError",
    "COMPILED",
    "ControlState",
    "ControlTrajectory",
    "ConvexityError",
    "CurvatureRangeError",
    "DomainError",
    "GeometryError",
    "InfeasibleError",
    "LuneSpec",
    "MeasureReport",
    "Metric",
    "OptimizerReport",
    "PMPReport",
    "RigidityError",
    "Schedule",
    "SpherePoint",
    "SupportCurve",
    "SupportOverflowError",
    "TrigSupport",
    "UNIT",
    "Vertex",
    "area",
    "curvature_radius",
    "deform_to_lune",
    "diameter",
    "dual_curvature",
    "duality_identities",
    "dumps",
    "euclid_lower_bound",
    "euclid_upper_bound",
    "four_bar_deform",
    "geodesic_circle",
    "integrate_trajectory",
    "is_lambda_convex",
    "jump_angle",
    "length",
    "loads",
    "lower_bound_deficit",
    "lune_area",
    "make_lune",
    "make_racetrack",
    "measure",
    "minimize_area",
    "polar_dual",
    "polygon_from_vertices",
    "racetrack_length_bound",
    "schedule_from_polygon",
    "support_from_arcs",
    "support_from_function",
    "symmetrize",
    "triangle_area",
    "triangle_area_argmax",
    "upper_bound_slack",
    "verify_pmp",
    "__version__",
]
