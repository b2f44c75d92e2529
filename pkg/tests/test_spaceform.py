"""
Tests for the space-form length norms, radii and fiber distances.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holonomic.core import holonomic_distance, holonomy_radius_origin, validate_group_norm
from holonomic.errors import FlatExcludedError, InvalidInputError, OutOfDomainError
from holonomic.surfaces import (
    SpaceForm,
    build_fiber_holonomic_space,
    fiber_distance,
    fiber_distance_report,
    fiber_norm_bound,
    isoperimetric_residual,
    manifold_convexity_radius,
    manifold_holonomy_radius,
    manifold_radius_search,
    reduce_angle,
    spaceform_length_norm,
    spaceform_length_norm_numeric,
)
from holonomic.surfaces.spaceform import fiber_angles

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)
curvatures = st.sampled_from([1.0, -1.0, 4.0, -0.25, 0.5])


@pytest.fixture(scope="module")
def dense_fiber_space():
    """4097 rotations: the same angles fiber_distance scans with grid=4097."""
    return build_fiber_holonomic_space(1.0, 4097)


class TestLengthNorm:
    """Closed-form length norm L_K(theta)."""

    @pytest.mark.parametrize(
        "K, theta, expected",
        [
            (1.0, math.pi, math.pi * math.sqrt(3.0)),
            (-1.0, math.pi, math.pi * math.sqrt(5.0)),
            (1.0, math.pi / 2, math.pi * math.sqrt(1.75)),
            (4.0, math.pi, math.pi * math.sqrt(3.0) / 2),
            (1.0, 0.0, 0.0),
        ],
    )
    def test_closed_form_values(self, K, theta, expected):
        assert spaceform_length_norm(K, theta) == pytest.approx(expected, abs=1e-12)

    def test_flat_is_excluded(self):
        with pytest.raises(FlatExcludedError):
            spaceform_length_norm(0.0, 1.0)
        with pytest.raises(FlatExcludedError):
            SpaceForm(0.0)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomainError):
            spaceform_length_norm(1.0, 4.0)
        with pytest.raises(OutOfDomainError):
            spaceform_length_norm_numeric(1.0, -3.5)

    def test_non_finite_curvature(self):
        with pytest.raises(InvalidInputError):
            spaceform_length_norm(float("nan"), 1.0)

    @given(curvatures, angles)
    def test_symmetric_and_nonnegative(self, K, theta):
        value = spaceform_length_norm(K, theta)
        assert value >= 0.0
        assert value == spaceform_length_norm(K, -theta)

    @given(curvatures, angles, angles)
    def test_subadditive_on_the_circle(self, K, a, b):
        total = spaceform_length_norm(K, reduce_angle(a + b))
        assert total <= spaceform_length_norm(K, a) + spaceform_length_norm(K, b) + 1e-12

    def test_space_form_object(self):
        form = SpaceForm(1.0)
        assert form.is_sphere
        assert form.length_norm()(math.pi) == pytest.approx(fiber_norm_bound(1.0))
        assert np.allclose(form.length_norm().values(np.array([-1.0, 1.0])), spaceform_length_norm(1.0, 1.0))


class TestNumericOracle:
    """Shortest-circle oracle against the closed form."""

    @pytest.mark.parametrize("K", [1.0, -1.0, 4.0, -0.25])
    def test_matches_closed_form(self, K):
        for theta in np.linspace(-math.pi, math.pi, 99):
            closed = spaceform_length_norm(K, float(theta))
            assert spaceform_length_norm_numeric(K, float(theta)) == pytest.approx(closed, abs=1e-8)

    def test_identity_is_free(self):
        assert spaceform_length_norm_numeric(-1.0, 0.0) == 0.0

    def test_grid_too_small(self):
        with pytest.raises(InvalidInputError):
            spaceform_length_norm_numeric(1.0, 1.0, grid=64)

    @pytest.mark.parametrize("K, r", [(1.0, 1.0), (1.0, 3.0), (-1.0, 2.0), (-4.0, 0.1)])
    def test_isoperimetric_equality_on_circles(self, K, r):
        assert abs(isoperimetric_residual(K, r)) < 1e-10


class TestManifoldRadius:
    """Holonomy and convexity radii of the space forms."""

    def test_unit_sphere(self):
        found = manifold_radius_search(1.0)
        assert found.value == pytest.approx(2.4558, abs=1e-3)
        assert 0.8 <= found.theta_star <= 1.2
        assert set(found.to_dict()) == {"K", "holrad", "theta_star"}

    @pytest.mark.parametrize("K, factor", [(4.0, 0.5), (0.25, 2.0), (-4.0, 0.5)])
    def test_scales_with_curvature(self, K, factor):
        base = manifold_holonomy_radius(math.copysign(1.0, K))
        assert manifold_holonomy_radius(K) == pytest.approx(base * factor, rel=1e-6)

    def test_hyperbolic_plane_minimum_at_identity(self):
        found = manifold_radius_search(-1.0)
        assert found.value == pytest.approx(math.sqrt(2 * math.pi), rel=1e-6)
        assert found.theta_star < 1e-6

    def test_convexity_radius_between_bounds(self):
        cvx = manifold_convexity_radius(1.0)
        assert manifold_holonomy_radius(1.0) < cvx <= math.pi * math.sqrt(3.0) / 2 + 1e-12
        assert cvx == pytest.approx(2.64, abs=0.01)

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            manifold_radius_search(1.0, "sectional")


class TestFiberSpace:
    """Sampled fiber holonomic space of S^2(K)."""

    def test_angles_contain_identity_and_half_turn(self):
        thetas = fiber_angles(4)
        assert len(thetas) == 5
        assert thetas[2] == 0.0
        assert thetas[0] == -math.pi and thetas[-1] == math.pi

    def test_too_few_angles(self):
        with pytest.raises(InvalidInputError):
            fiber_angles(2)

    def test_three_angle_sample(self):
        space = build_fiber_holonomic_space(1.0, 3)
        sample = space.group
        assert len(sample) == 3
        assert np.array_equal(sample.matrices[0], sample.matrices[2])
        assert validate_group_norm(sample).valid
        assert holonomy_radius_origin(space).require_finite() == pytest.approx(math.pi * math.sqrt(3.0) / 2)

    def test_dense_sample_agrees_with_closed_form(self):
        space = build_fiber_holonomic_space(1.0, 10_000)
        sampled = holonomy_radius_origin(space).require_finite()
        assert abs(sampled - manifold_holonomy_radius(1.0)) < 1e-4

    def test_hyperbolic_fiber_is_refused(self):
        with pytest.raises(InvalidInputError):
            build_fiber_holonomic_space(-1.0)


class TestFiberDistance:
    """Distances within one fiber, continuous in theta."""

    def test_short_antipodal_vectors(self):
        report = fiber_distance_report(1.0, [1.0, 0.0], [-1.0, 0.0])
        assert report.d == pytest.approx(2.0, abs=1e-12)
        assert report.theta_star == 0.0

    def test_long_antipodal_vectors_use_holonomy(self):
        report = fiber_distance_report(1.0, [10.0, 0.0], [-10.0, 0.0])
        assert report.d < math.pi * math.sqrt(3.0) - 1e-3
        assert report.d == pytest.approx(5.4322, abs=1e-3)
        assert abs(report.theta_star) > 3.0

    @given(
        st.floats(min_value=0.0, max_value=2.4),
        angles,
        st.floats(min_value=0.0, max_value=2.4),
        angles,
    )
    def test_local_isometry(self, r1, a1, r2, a2):
        u = [r1 * math.cos(a1), r1 * math.sin(a1)]
        v = [r2 * math.cos(a2), r2 * math.sin(a2)]
        assert fiber_distance(1.0, u, v, grid=512) == pytest.approx(np.linalg.norm(np.subtract(u, v)), abs=1e-8)

    def test_never_exceeds_euclidean(self):
        rng = np.random.default_rng(11)
        for u, v in zip(rng.normal(size=(10, 2)) * 8, rng.normal(size=(10, 2)) * 8):
            assert fiber_distance(1.0, u, v, grid=512) <= np.linalg.norm(u - v) + 1e-12

    @given(
        st.floats(min_value=0.0, max_value=6.0),
        angles,
        st.floats(min_value=0.0, max_value=6.0),
        angles,
    )
    def test_agrees_with_sampled_fiber_space(self, dense_fiber_space, r1, a1, r2, a2):
        """The refined continuous minimum sits at or just below the minimum over the same sampled angles."""
        u = [r1 * math.cos(a1), r1 * math.sin(a1)]
        v = [r2 * math.cos(a2), r2 * math.sin(a2)]
        continuous = fiber_distance(1.0, u, v, grid=4097)
        sampled = holonomic_distance(dense_fiber_space, u, v)
        assert continuous <= sampled + 1e-12
        assert sampled == pytest.approx(continuous, abs=1e-4)

    def test_input_checks(self):
        with pytest.raises(InvalidInputError):
            fiber_distance(-1.0, [1.0, 0.0], [0.0, 1.0])
        with pytest.raises(InvalidInputError):
            fiber_distance(1.0, [1.0, 0.0, 0.0], [0.0, 1.0])
        with pytest.raises(InvalidInputError):
            fiber_distance(1.0, [float("nan"), 0.0], [0.0, 1.0])
        with pytest.raises(FlatExcludedError):
            fiber_distance(0.0, [1.0, 0.0], [0.0, 1.0])
