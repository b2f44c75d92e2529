"""Parallel transport on surfaces and the space-form fiber spaces."""

from .spaceform import (
    AngleNorm,
    FiberDistance,
    ManifoldRadius,
    SpaceForm,
    build_fiber_holonomic_space,
    fiber_distance,
    fiber_distance_report,
    fiber_norm_bound,
    isoperimetric_residual,
    manifold_convexity_radius,
    manifold_holonomy_radius,
    manifold_radius_search,
    spaceform_length_norm,
    spaceform_length_norm_numeric,
)
from .transport import (
    FrameState,
    GeodesicCircle,
    LoopSpec,
    TransportResult,
    angle_gap,
    gauss_bonnet_residual,
    geodesic_circle_loop,
    holonomy_angle,
    reduce_angle,
    reverse_loop,
    sphere_extrinsic_transport,
    total_curvature,
    transport_rotation,
    transport_sweep,
)

__all__ = [
    "AngleNorm",
    "FiberDistance",
    "ManifoldRadius",
    "SpaceForm",
    "build_fiber_holonomic_space",
    "fiber_distance",
    "fiber_distance_report",
    "fiber_norm_bound",
    "isoperimetric_residual",
    "manifold_convexity_radius",
    "manifold_holonomy_radius",
    "manifold_radius_search",
    "spaceform_length_norm",
    "spaceform_length_norm_numeric",
    "FrameState",
    "GeodesicCircle",
    "LoopSpec",
    "TransportResult",
    "angle_gap",
    "gauss_bonnet_residual",
    "geodesic_circle_loop",
    "holonomy_angle",
    "reduce_angle",
    "reverse_loop",
    "sphere_extrinsic_transport",
    "total_curvature",
    "transport_rotation",
    "transport_sweep",
]
