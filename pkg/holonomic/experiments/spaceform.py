"""
Space-form experiments: the length-norm table, the holonomy radius and
fiber distances.
"""

import math
from typing import List, Optional

import numpy as np

from ..core import holonomy_radius_origin
from ..surfaces import (
    build_fiber_holonomic_space,
    fiber_distance_report,
    manifold_holonomy_radius,
    manifold_radius_search,
    spaceform_length_norm,
    spaceform_length_norm_numeric,
)
from .base import (
    Experiment,
    ExperimentParameter,
    ExperimentResult,
    gather_limited,
    register_experiment,
)

LENGTH_NORM_TOL = 1e-8
DUAL_ROUTE_TOL = 1e-4
LOCAL_ISOMETRY_TOL = 1e-8


@register_experiment
class SpaceFormTableExperiment(Experiment):
    name = "spaceform-table"

    @property
    def description(self) -> str:
        return "Closed-form length norm against the shortest-circle oracle on a theta grid"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("K", "float", "Curvature (nonzero)", default=1.0),
            ExperimentParameter("grid", "integer", "Number of theta values in [-pi, pi]", default=99, minimum=8),
            ExperimentParameter("r_grid", "integer", "Radius grid of the circle oracle", default=256, minimum=256),
        ]

    async def execute(self, K: float, grid: int, r_grid: int) -> ExperimentResult:
        thetas = np.linspace(-math.pi, math.pi, grid)
        closed = [spaceform_length_norm(K, float(t)) for t in thetas]
        numeric = await gather_limited(
            [lambda t=float(t): spaceform_length_norm_numeric(K, t, r_grid) for t in thetas]
        )
        rows = [
            {"K": K, "theta": float(t), "L_closed": c, "L_numeric": n, "abs_err": abs(c - n)}
            for t, c, n in zip(thetas, closed, numeric)
        ]
        max_err = max(row["abs_err"] for row in rows)
        data = {"K": K, "grid": grid, "max_abs_err": max_err}
        summary = f"max |L_closed - L_numeric| = {max_err:.3e}"
        if not max_err <= LENGTH_NORM_TOL:
            return ExperimentResult.violation(summary, data, rows=rows, sort_by=["theta"])
        return ExperimentResult(success=True, summary=summary, data=data, rows=rows, sort_by=["theta"])


@register_experiment
class HolRadExperiment(Experiment):
    name = "holrad"
    default_format = "json"

    @property
    def description(self) -> str:
        return "Holonomy radius of the space form, optionally cross-checked on the fiber sample"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("K", "float", "Curvature (nonzero)", default=1.0),
            ExperimentParameter("grid", "integer", "Theta grid size before refinement", default=100_000, minimum=8),
            ExperimentParameter(
                "n_angles", "integer", "Fiber sample size for the second route (0 skips it)", default=0, minimum=0
            ),
        ]

    async def execute(self, K: float, grid: int, n_angles: int) -> ExperimentResult:
        holonomy, convexity = await gather_limited(
            [
                lambda: manifold_radius_search(K, "holonomy", grid),
                lambda: manifold_radius_search(K, "convexity", grid),
            ]
        )
        row = holonomy.to_dict()
        data = dict(row, cvxrad=convexity.value, cvx_theta_star=convexity.theta_star)
        summary = f"holrad = {holonomy.value:.10g} at theta* = {holonomy.theta_star:.6g}"

        problems = []
        if not (math.isfinite(holonomy.value) and holonomy.value > 0):
            problems.append("holonomy radius is not a positive real")
        if n_angles and K > 0:
            sampled = await gather_limited(
                [lambda: holonomy_radius_origin(build_fiber_holonomic_space(K, n_angles)).require_finite()]
            )
            gap = abs(sampled[0] - holonomy.value)
            data.update(fiber_holrad=sampled[0], dual_route_gap=gap)
            summary += f", fiber route gap {gap:.3e}"
            if gap > DUAL_ROUTE_TOL:
                problems.append(f"fiber route differs by {gap:.3e}")
        if problems:
            data["problems"] = problems
            return ExperimentResult.violation(summary, data, rows=[row])
        return ExperimentResult(success=True, summary=summary, data=data, rows=[row])


@register_experiment
class FiberDistanceExperiment(Experiment):
    name = "fiber-distance"
    default_format = "json"

    @property
    def description(self) -> str:
        return "Distance between two vectors of one fiber of the tangent bundle of S^2(K)"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("K", "float", "Curvature (positive)", default=1.0),
            ExperimentParameter("u", "floats", "First vector", required=True, count=2),
            ExperimentParameter("v", "floats", "Second vector", required=True, count=2),
            ExperimentParameter("grid", "integer", "Theta grid size before refinement", default=4096, minimum=8),
        ]

    async def execute(self, K: float, u: List[float], v: List[float], grid: int) -> ExperimentResult:
        report = fiber_distance_report(K, u, v, grid)
        euclidean = float(np.linalg.norm(np.subtract(u, v)))
        data = dict(report.to_dict(), euclidean=euclidean)
        row = {"K": K, "u0": u[0], "u1": u[1], "v0": v[0], "v1": v[1], "d": report.d, "theta_star": report.theta_star}
        summary = f"d = {report.d:.12g} at theta* = {report.theta_star:.6g} (euclidean {euclidean:.12g})"

        problem: Optional[str] = None
        if report.d > euclidean + 1e-12:
            problem = "fiber distance exceeds the euclidean distance"
        elif max(np.linalg.norm(u), np.linalg.norm(v)) < manifold_holonomy_radius(K):
            if abs(report.d - euclidean) > LOCAL_ISOMETRY_TOL:
                problem = "fiber distance is not euclidean inside the holonomy radius"
        if problem:
            data["problem"] = problem
            return ExperimentResult.violation(summary, data, rows=[row])
        return ExperimentResult(success=True, summary=summary, data=data, rows=[row])
