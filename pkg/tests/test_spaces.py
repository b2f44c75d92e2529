"""
Tests for holonomic spaces: the metric d_L, radii, property (P) and the
counterexample family.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from holonomic.core import (
    HolonomicSpace,
    NormedGroupSample,
    OneParamFamily,
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
    sample_lipschitz_gaps,
)
from holonomic.errors import DegenerateRadiusError, InvalidInputError
from holonomic.surfaces import manifold_convexity_radius, manifold_holonomy_radius


class TestTrivialSpace:
    """The trivial group gives a flat space with unbounded radii."""

    def test_is_flat(self):
        space = HolonomicSpace.trivial(3)
        assert is_flat(space)
        assert not holonomy_radius_origin(space).is_finite
        assert not convexity_radius(space).is_finite

    def test_distance_is_euclidean(self):
        space = HolonomicSpace.trivial(3)
        assert holonomic_distance(space, [1.0, 2.0, 3.0], [0.0, 2.0, -1.0]) == pytest.approx(math.sqrt(17.0))

    def test_unbounded_bracket(self):
        bracket = holonomy_radius_at(HolonomicSpace.trivial(2), [0.5, 0.5])
        assert bracket.unbounded
        assert bracket.to_dict()["hi"] is None

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            HolonomicSpace(3, NormedGroupSample.trivial(2))

    def test_vector_checks(self):
        space = HolonomicSpace.trivial(2)
        with pytest.raises(InvalidInputError):
            holonomic_distance(space, [1.0, 2.0, 3.0], [0.0, 0.0])
        with pytest.raises(InvalidInputError):
            holonomic_distance(space, [float("inf"), 0.0], [0.0, 0.0])


class TestFiberSpaceMetric:
    """d_L on the sampled fiber space of the unit sphere."""

    def test_distance_never_exceeds_euclidean(self, fiber_space):
        rng = np.random.default_rng(7)
        for u, v in zip(rng.normal(size=(20, 2)) * 3, rng.normal(size=(20, 2)) * 3):
            assert holonomic_distance(fiber_space, u, v) <= np.linalg.norm(u - v) + 1e-12

    def test_recovers_norm(self, fiber_space):
        assert recover_norm(fiber_space, [3.0, 4.0]) == pytest.approx(5.0, abs=1e-12)

    def test_antipodal_short_vectors(self, fiber_space):
        assert holonomic_distance(fiber_space, [1.0, 0.0], [-1.0, 0.0]) == pytest.approx(2.0, abs=1e-12)

    def test_not_flat(self, fiber_space):
        assert not is_flat(fiber_space)


class TestRadii:
    """Holonomy and convexity radii of samples and families."""

    def test_fiber_radius_matches_manifold(self, fiber_space):
        sampled = fiber_space.origin_radius.value.require_finite()
        continuous = manifold_holonomy_radius(1.0)
        assert sampled >= continuous - 1e-9
        assert sampled == pytest.approx(continuous, abs=1e-4)

    def test_fiber_convexity_radius(self, fiber_space):
        sampled = convexity_radius(fiber_space).require_finite()
        assert sampled >= manifold_convexity_radius(1.0) - 1e-9
        assert sampled == pytest.approx(manifold_convexity_radius(1.0), abs=1e-3)

    def test_counterexample_convexity_radius(self, counterexample):
        result = counterexample.convexity_radius
        assert 0.7071 <= result.value.require_finite() <= 0.7072
        assert result.limit_at_puncture

    def test_counterexample_holonomy_radius_collapses(self, counterexample):
        result = counterexample.origin_radius
        assert result.value.require_finite() < 1e-3
        assert result.limit_at_puncture
        assert abs(result.parameter) == pytest.approx(1e-6, rel=1e-6)

    def test_lipschitz_gap_refuses_collapsed_radius(self, counterexample):
        family = counterexample.group
        with pytest.raises(DegenerateRadiusError):
            lipschitz_gap(counterexample, family.element(0.3), family.element(0.8))

    def test_convexity_lipschitz_gap(self, counterexample):
        family = counterexample.group
        assert convexity_lipschitz_gap(counterexample, family.element(0.3), family.element(0.8)) >= -1e-9

    def test_element_length_along_family(self, counterexample):
        element = counterexample.group.element(0.5)
        assert counterexample.element_length(element) == pytest.approx(0.5, abs=1e-8)

    def test_sample_lipschitz_gaps(self, small_fiber_space):
        gaps = sample_lipschitz_gaps(small_fiber_space)
        assert gaps["holonomy"] >= -1e-9
        assert gaps["convexity"] >= -1e-9
        assert gaps["pairs"] == 33 * 33

    def test_sample_lipschitz_gaps_need_a_sample(self, counterexample):
        with pytest.raises(InvalidInputError):
            sample_lipschitz_gaps(counterexample)


class TestPropertyP:
    """Property (P) sampling and the radius bracket at a point."""

    def test_holds_inside_radius(self, fiber_space):
        rho = holonomy_radius_origin(fiber_space).require_finite()
        assert check_property_p(fiber_space, [0.0, 0.0], 0.99 * rho, pair_budget=500, seed=3) is None

    def test_fails_outside_radius(self, fiber_space):
        rho = holonomy_radius_origin(fiber_space).require_finite()
        violation = check_property_p(fiber_space, [0.0, 0.0], 1.2 * rho, pair_budget=500, seed=3)
        assert violation is not None
        assert violation.slack > 0
        assert np.linalg.norm(violation.v) < 1.2 * rho
        assert np.linalg.norm(violation.w) < 1.2 * rho
        assert set(violation.to_dict()) == {"v", "w", "element", "L", "slack"}

    def test_rejects_bad_radius(self, fiber_space):
        with pytest.raises(InvalidInputError):
            check_property_p(fiber_space, [0.0, 0.0], 0.0)

    def test_bracket_at_origin(self, small_fiber_space):
        rho = holonomy_radius_origin(small_fiber_space).require_finite()
        bracket = holonomy_radius_at(small_fiber_space, [0.0, 0.0], bracket_tol=1e-3, pair_budget=200)
        assert bracket.hi_witnessed
        assert bracket.hi - bracket.lo <= 1e-3
        assert bracket.lo - 1e-6 <= rho <= bracket.hi + 1e-6

    def test_radius_is_one_lipschitz_along_a_line(self, fiber_space):
        """Moving the base point by delta moves the radius by at most delta."""
        offsets = [0.0, 0.3, 0.6, 1.0, 1.5]
        brackets = [holonomy_radius_at(fiber_space, [x, 0.0], bracket_tol=1e-4) for x in offsets]
        assert all(b.hi_witnessed for b in brackets)
        for (x0, b0), (x1, b1) in zip(zip(offsets, brackets), zip(offsets[1:], brackets[1:])):
            widths = (b0.hi - b0.lo) + (b1.hi - b1.lo)
            assert abs(b1.mid - b0.mid) <= (x1 - x0) + widths + 1e-3


class TestConvexityCondition:
    """|u - a u| <= L(a) inside the convexity radius."""

    def test_holds_inside_convexity_radius(self, fiber_space):
        assert check_convexity_condition(fiber_space, [1.5, 0.5]) <= 1e-9

    def test_fails_far_out(self, fiber_space):
        assert check_convexity_condition(fiber_space, [10.0, 0.0]) > 0


class TestFamilies:
    """One-parameter families and the two-frequency counterexample."""

    def test_counterexample_invariants(self, counterexample):
        assert counterexample.group.check_invariants() == []

    def test_counterexample_rejects_bad_range(self):
        with pytest.raises(InvalidInputError):
            counterexample_space(0.0, 1.0)
        with pytest.raises(InvalidInputError):
            counterexample_space(2.0, 1.0)

    def test_family_range_must_contain_identity(self):
        with pytest.raises(InvalidInputError):
            OneParamFamily(2, 1.0, 2.0, lambda ts: np.tile(np.eye(2), (len(ts), 1, 1)), np.abs)

    def test_family_distance_matches_one_dimensional_minimum(self, counterexample):
        u = [1.0, 0.0, 0.0, 0.0]
        v = [0.0, 1.0, 0.0, 0.0]
        # a(t) v = (-sin t, cos t, 0, 0), so d^2 = min t^2 + 2 + 2 sin t
        expected = minimize_scalar(
            lambda t: t * t + 2.0 + 2.0 * math.sin(t), bounds=(-2.0, 0.0), method="bounded",
            options={"xatol": 1e-12},
        )
        d_uv = holonomic_distance(counterexample, u, v)
        assert d_uv == pytest.approx(math.sqrt(expected.fun), abs=1e-7)
        assert d_uv < math.sqrt(2.0)
        assert holonomic_distance(counterexample, v, u) == pytest.approx(d_uv, abs=1e-7)

    def test_unnamed_family_cannot_be_serialized(self):
        family = OneParamFamily(2, -1.0, 1.0, lambda ts: np.tile(np.eye(2), (len(ts), 1, 1)), np.abs)
        with pytest.raises(InvalidInputError):
            HolonomicSpace(2, family).to_json()


class TestSerialization:
    """JSON forms of sampled and named spaces."""

    def test_sample_space_round_trip(self, small_fiber_space):
        plain = HolonomicSpace(2, small_fiber_space.group)
        restored = HolonomicSpace.from_json(plain.to_json())
        assert len(restored.group) == 33
        assert restored.origin_radius.value.require_finite() == pytest.approx(
            plain.origin_radius.value.require_finite(), abs=1e-12
        )

    def test_named_fiber_space(self, small_fiber_space):
        data = small_fiber_space.to_dict()
        assert data == {"family": "spaceform-fiber", "K": 1.0, "n_angles": 33}
        restored = HolonomicSpace.from_json(small_fiber_space.to_json())
        assert len(restored.group) == 33

    def test_named_counterexample(self, counterexample):
        restored = HolonomicSpace.from_dict(counterexample.to_dict())
        assert restored.is_family
        assert restored.group.params == {"t_min": 1e-6, "t_max": 100.0}

    def test_unknown_family(self):
        with pytest.raises(InvalidInputError):
            HolonomicSpace.from_dict({"family": "torus"})
