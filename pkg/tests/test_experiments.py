"""
Tests for the experiment layer: parameter validation, the registry and each
registered experiment run end to end.
"""

import math
from unittest.mock import patch

import pytest

from holonomic.experiments import (
    CHECK_NAMES,
    EXIT_INTERNAL,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_VIOLATION,
    ExperimentResult,
    experiment_registry,
    gather_limited,
)
from holonomic.experiments import suite
from holonomic.experiments.base import ExperimentRegistry
from holonomic.experiments.spaceform import HolRadExperiment


class TestRegistry:
    """Test experiment registration."""

    def test_all_commands_registered(self):
        """Every CLI command has an experiment."""
        assert set(experiment_registry.list_experiments()) == {
            "spaceform-table",
            "holrad",
            "counterexample-sweep",
            "fiber-distance",
            "property-suite",
            "transport-check",
        }

    def test_info(self):
        info = experiment_registry.get_experiment("fiber-distance").get_info()
        assert info["name"] == "fiber-distance"
        assert [p["name"] for p in info["parameters"]] == ["K", "u", "v", "grid"]

    @pytest.mark.asyncio
    async def test_unknown_experiment(self):
        """Test execution of an unknown experiment."""
        result = await ExperimentRegistry().execute_experiment("torus-check")
        assert result.success is False
        assert result.exit_code == EXIT_INVALID
        assert "not found" in result.error_message

    @pytest.mark.asyncio
    async def test_execution_via_registry(self):
        registry = ExperimentRegistry()
        experiment = HolRadExperiment()
        registry.register(experiment)

        mock_result = ExperimentResult(success=True, summary="ok")
        with patch.object(experiment, "run", return_value=mock_result) as mock_run:
            result = await registry.execute_experiment("holrad", K=2.0)

        assert result.success is True
        mock_run.assert_called_once_with(K=2.0)


class TestParameterValidation:
    """Parameter coercion and the mapping of bad input to exit code 2."""

    @pytest.fixture
    def fiber(self):
        return experiment_registry.get_experiment("fiber-distance")

    def test_defaults_are_filled(self, fiber):
        params = fiber.validate_parameters(u=[1, 0], v="0 1")
        assert params == {"K": 1.0, "u": [1.0, 0.0], "v": [0.0, 1.0], "grid": 4096}

    def test_required_parameter(self, fiber):
        with pytest.raises(ValueError, match="Required parameter"):
            fiber.validate_parameters(u=[1.0, 0.0])

    def test_vector_length(self, fiber):
        with pytest.raises(ValueError, match="needs 2 values"):
            fiber.validate_parameters(u=[1.0, 0.0, 0.0], v=[0.0, 1.0])

    def test_unknown_parameter(self, fiber):
        with pytest.raises(ValueError, match="Unknown parameter"):
            fiber.validate_parameters(u=[1.0, 0.0], v=[0.0, 1.0], w=[1.0, 1.0])

    def test_minimum(self, fiber):
        with pytest.raises(ValueError, match="at least"):
            fiber.validate_parameters(u=[1.0, 0.0], v=[0.0, 1.0], grid=4)

    def test_integer_rejects_fractions(self, fiber):
        with pytest.raises(ValueError):
            fiber.validate_parameters(u=[1.0, 0.0], v=[0.0, 1.0], grid=100.5)

    @pytest.mark.asyncio
    async def test_invalid_input_maps_to_exit_two(self, fiber):
        result = await fiber.run(u=[1.0, 0.0])
        assert result.exit_code == EXIT_INVALID
        assert result.summary.startswith("invalid input")

    @pytest.mark.asyncio
    async def test_unexpected_errors_are_internal(self):
        """A crash in execute is reported as an internal error, not as a violated invariant."""
        registry = ExperimentRegistry()
        registry.register(HolRadExperiment())
        with patch.object(HolRadExperiment, "execute", side_effect=RuntimeError("boom")):
            result = await registry.execute_experiment("holrad")
        assert result.exit_code == EXIT_INTERNAL
        assert result.exit_code != EXIT_VIOLATION
        assert result.summary == "internal error: RuntimeError: boom"

    @pytest.mark.asyncio
    async def test_library_errors_map_to_exit_two(self):
        result = await experiment_registry.execute_experiment("holrad", K=0.0)
        assert result.exit_code == EXIT_INVALID
        assert "K = 0" in result.error_message


class TestGatherLimited:
    """Thread-pooled jobs keep their submission order."""

    @pytest.mark.asyncio
    async def test_keeps_job_order(self):
        results = await gather_limited([lambda i=i: i * i for i in range(10)], limit=2)
        assert results == [i * i for i in range(10)]


class TestSpaceFormExperiments:
    """spaceform-table, holrad and fiber-distance."""

    @pytest.mark.asyncio
    async def test_spaceform_table(self):
        result = await experiment_registry.execute_experiment("spaceform-table", K=-1.0, grid=9)
        assert result.exit_code == EXIT_OK
        assert len(result.rows) == 9
        assert result.data["max_abs_err"] <= 1e-8
        assert result.metadata["parameters"] == {"K": -1.0, "grid": 9, "r_grid": 256}

    @pytest.mark.asyncio
    async def test_holrad_with_fiber_route(self):
        result = await experiment_registry.execute_experiment("holrad", K=1.0, n_angles=513)
        assert result.exit_code == EXIT_OK
        assert result.data["holrad"] == pytest.approx(2.4558, abs=1e-3)
        assert result.data["dual_route_gap"] < 1e-4
        assert result.data["cvxrad"] > result.data["holrad"]
        assert result.summary.startswith("holrad = ")

    @pytest.mark.asyncio
    async def test_fiber_distance_shortcut(self):
        result = await experiment_registry.execute_experiment("fiber-distance", u=[10.0, 0.0], v=[-10.0, 0.0])
        assert result.exit_code == EXIT_OK
        assert result.data["d"] == pytest.approx(5.4322, abs=1e-3)
        assert result.data["euclidean"] == 20.0

    @pytest.mark.asyncio
    async def test_fiber_distance_inside_radius(self):
        result = await experiment_registry.execute_experiment("fiber-distance", u=[1.0, 0.0], v=[-1.0, 0.0])
        assert result.exit_code == EXIT_OK
        assert result.data["d"] == pytest.approx(2.0, abs=1e-12)
        assert result.data["theta_star"] == 0.0

    @pytest.mark.asyncio
    async def test_fiber_distance_hyperbolic_is_invalid(self):
        result = await experiment_registry.execute_experiment(
            "fiber-distance", K=-1.0, u=[1.0, 0.0], v=[-1.0, 0.0]
        )
        assert result.exit_code == EXIT_INVALID


class TestCounterexampleSweep:
    """Radius ratios along the counterexample family."""

    @pytest.mark.asyncio
    async def test_sweep(self):
        result = await experiment_registry.execute_experiment("counterexample-sweep", grid=2000)
        assert result.exit_code == EXIT_OK
        assert result.data["min_convexity_ratio"] >= 1.0 / math.sqrt(2.0) - 1e-9
        assert result.data["holonomy_ratio_at_probe"] == pytest.approx(5.946e-3, abs=1e-5)
        assert result.data["argmin_holonomy_t"] == pytest.approx(1e-6)
        assert len(result.rows) == 2001
        assert result.sort_by == ["t"]

    @pytest.mark.asyncio
    async def test_coarse_range_is_flagged(self):
        """Starting at t = 0.1 the convexity ratio stays near 0.7077, above the 0.70720 ceiling."""
        result = await experiment_registry.execute_experiment("counterexample-sweep", t_min=0.1, t_max=10.0, grid=200)
        assert result.exit_code == EXIT_VIOLATION
        assert result.data["min_convexity_ratio"] == pytest.approx(0.70769, abs=1e-4)
        assert any("grid too coarse" in p for p in result.data["problems"])

    @pytest.mark.asyncio
    async def test_bad_range(self):
        result = await experiment_registry.execute_experiment("counterexample-sweep", t_min=0.0)
        assert result.exit_code == EXIT_INVALID


class TestTransportCheck:
    """Transport around geodesic circles, checked three ways."""

    @pytest.mark.asyncio
    @pytest.mark.parametrize("K", [1.0, -1.0, 4.0])
    async def test_default_radii(self, K):
        result = await experiment_registry.execute_experiment("transport-check", K=K)
        assert result.exit_code == EXIT_OK, result.data
        assert len(result.rows) == 4
        assert all(12.0 <= q <= 20.0 for q in result.data["convergence"]["ratios"])

    @pytest.mark.asyncio
    async def test_coarse_steps_are_flagged(self):
        result = await experiment_registry.execute_experiment("transport-check", steps=16)
        assert result.exit_code == EXIT_VIOLATION
        assert result.data["problems"]
        assert len(result.rows) == 4

    @pytest.mark.asyncio
    async def test_flat_is_invalid(self):
        result = await experiment_registry.execute_experiment("transport-check", K=0.0)
        assert result.exit_code == EXIT_INVALID


class TestPropertySuite:
    """The fail-fast invariant suite."""

    @pytest.mark.asyncio
    async def test_full_suite_passes(self):
        result = await experiment_registry.execute_experiment(
            "property-suite", n_angles=256, pairs=500, triples=200, seed=7
        )
        assert result.exit_code == EXIT_OK, result.data
        assert [row["check"] for row in result.rows] == CHECK_NAMES
        assert all(row["passed"] for row in result.rows)
        assert result.data["checks_run"] == len(CHECK_NAMES)

    @pytest.mark.asyncio
    async def test_subset(self):
        result = await experiment_registry.execute_experiment(
            "property-suite", n_angles=64, checks="boundedness, metric-axioms", triples=50
        )
        assert result.exit_code == EXIT_OK
        assert [row["check"] for row in result.rows] == ["metric-axioms", "boundedness"]

    def test_suite_covers_every_module(self):
        for name in [
            "counterexample-radii",
            "operator-norm",
            "left-invariance",
            "radius-lipschitz",
            "transport-frame",
            "radius-scaling",
        ]:
            assert name in CHECK_NAMES
        assert len(CHECK_NAMES) == len(set(CHECK_NAMES))

    @pytest.mark.asyncio
    async def test_checks_outside_the_fiber_space(self):
        result = await experiment_registry.execute_experiment(
            "property-suite",
            n_angles=128,
            pairs=400,
            triples=200,
            checks="counterexample-radii,operator-norm,left-invariance,transport-frame,radius-scaling",
        )
        assert result.exit_code == EXIT_OK, result.data
        assert [row["check"] for row in result.rows] == [
            "counterexample-radii",
            "operator-norm",
            "left-invariance",
            "transport-frame",
            "radius-scaling",
        ]

    @pytest.mark.asyncio
    async def test_radius_lipschitz_check(self):
        result = await experiment_registry.execute_experiment(
            "property-suite", n_angles=512, pairs=1000, checks="radius-lipschitz"
        )
        assert result.exit_code == EXIT_OK, result.data

    @pytest.mark.asyncio
    async def test_unknown_check(self):
        result = await experiment_registry.execute_experiment("property-suite", n_angles=64, checks="curl")
        assert result.exit_code == EXIT_INVALID
        assert "Unknown check" in result.error_message

    @pytest.mark.asyncio
    async def test_stops_at_first_failure(self, monkeypatch):
        """A failing check ends the suite and reports its counterexample."""

        def passing(ctx):
            return None

        def failing(ctx):
            return {"x": [1.0, 2.0]}

        def crashing(ctx):
            raise RuntimeError("boom")

        monkeypatch.setattr(
            suite, "CHECKS", [("first", passing), ("second", failing), ("third", crashing), ("fourth", passing)]
        )
        result = await experiment_registry.execute_experiment("property-suite", n_angles=16)
        assert result.exit_code == EXIT_VIOLATION
        assert result.summary == "FAILED second"
        assert result.data["failed_check"] == "second"
        assert result.data["counterexample"] == {"x": [1.0, 2.0]}
        assert [row["check"] for row in result.rows] == ["first", "second"]

    @pytest.mark.asyncio
    async def test_crash_counts_as_failure(self, monkeypatch):
        def crashing(ctx):
            raise RuntimeError("boom")

        monkeypatch.setattr(suite, "CHECKS", [("only", crashing)])
        result = await experiment_registry.execute_experiment("property-suite", n_angles=16)
        assert result.exit_code == EXIT_VIOLATION
        assert result.data["counterexample"] == {"error": "RuntimeError: boom"}
