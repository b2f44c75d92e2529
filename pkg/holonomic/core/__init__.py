"""Group-norm samples, holonomic spaces and the shared search routines."""

from .groups import (
    GroupElement,
    GroupNormViolation,
    NormedGroupSample,
    SampleEntry,
    ValidationReport,
    compose_norm_with_subadditive,
    left_invariant_distance,
    operator_norm,
    validate_group_norm,
)
from .search import ExtendedReal, GridMinimum, golden_section, grid_minimize
from .spaces import (
    HolonomicSpace,
    OneParamFamily,
    PropertyPViolation,
    RadiusBracket,
    RadiusResult,
    check_convexity_condition,
    check_property_p,
    convexity_lipschitz_gap,
    convexity_radius,
    counterexample_space,
    holonomic_distance,
    holonomy_radius_at,
    holonomy_radius_origin,
    is_flat,
    lipschitz_gap,
    recover_norm,
    register_space_builder,
    sample_lipschitz_gaps,
)

__all__ = [
    "GroupElement",
    "GroupNormViolation",
    "NormedGroupSample",
    "SampleEntry",
    "ValidationReport",
    "compose_norm_with_subadditive",
    "left_invariant_distance",
    "operator_norm",
    "validate_group_norm",
    "ExtendedReal",
    "GridMinimum",
    "golden_section",
    "grid_minimize",
    "HolonomicSpace",
    "OneParamFamily",
    "PropertyPViolation",
    "RadiusBracket",
    "RadiusResult",
    "check_convexity_condition",
    "check_property_p",
    "convexity_lipschitz_gap",
    "convexity_radius",
    "counterexample_space",
    "holonomic_distance",
    "holonomy_radius_at",
    "holonomy_radius_origin",
    "is_flat",
    "lipschitz_gap",
    "recover_norm",
    "register_space_builder",
    "sample_lipschitz_gaps",
]
