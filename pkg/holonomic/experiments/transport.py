"""Parallel transport around geodesic circles, checked three ways."""

import math
from typing import Dict, List, Optional

from ..surfaces import GeodesicCircle, angle_gap, geodesic_circle_loop, reduce_angle, transport_rotation, transport_sweep
from .base import Experiment, ExperimentParameter, ExperimentResult, gather_limited, register_experiment

ANGLE_TOL = 1e-6
RESIDUAL_TOL = 1e-9
ORDER_RANGE = (12.0, 20.0)
CONVERGENCE_STEPS = (16, 32, 64)


def default_radii(K: float) -> List[float]:
    scale = math.sqrt(abs(K))
    if K > 0:
        return [math.pi / 6 / scale, math.pi / 4 / scale, math.pi / 3 / scale, math.pi / 2 / scale]
    return [0.25 / scale, 0.5 / scale, 1.0 / scale, 2.0 / scale]


def convergence_ratios(K: float, r: float, steps=CONVERGENCE_STEPS) -> Dict[str, List[float]]:
    """RK4 angle errors against K*A at successive step halvings, and their ratios."""
    circle = GeodesicCircle(K, r)
    loop = geodesic_circle_loop(circle)
    exact = reduce_angle(circle.enclosed_curvature)
    errors = [angle_gap(transport_rotation(loop, n).angle, exact) for n in steps]
    ratios = [a / b for a, b in zip(errors, errors[1:]) if b > 0]
    return {"steps": list(steps), "errors": errors, "ratios": ratios}


@register_experiment
class TransportCheckExperiment(Experiment):
    name = "transport-check"

    @property
    def description(self) -> str:
        return "RK4 frame transport, Gauss-Bonnet and (K = 1) extrinsic transport on geodesic circles"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("K", "float", "Curvature (nonzero)", default=1.0),
            ExperimentParameter("radii", "floats", "Circle radii (defaults depend on K)"),
            ExperimentParameter("steps", "integer", "RK4 steps per circle", default=1024, minimum=16),
        ]

    async def execute(self, K: float, radii: Optional[List[float]], steps: int) -> ExperimentResult:
        radii = sorted(radii or default_radii(K))
        chunks = await gather_limited([lambda r=r: transport_sweep(K, [r], steps) for r in radii])
        rows = [row for chunk in chunks for row in chunk]
        convergence = convergence_ratios(K, radii[len(radii) // 2])

        worst_ode = max(angle_gap(row["theta_ode"], row["theta_gb"]) for row in rows)
        worst_residual = max(abs(row["residual"]) for row in rows)
        data = {
            "K": K,
            "max_ode_gap": worst_ode,
            "max_gauss_bonnet_residual": worst_residual,
            "convergence": convergence,
        }
        problems = []
        if worst_ode > ANGLE_TOL:
            problems.append(f"ODE and Gauss-Bonnet angles differ by {worst_ode:.3e}")
        extrinsic = [row for row in rows if row["theta_extrinsic"] is not None]
        if extrinsic:
            worst_ext = max(angle_gap(row["theta_extrinsic"], row["theta_gb"]) for row in extrinsic)
            data["max_extrinsic_gap"] = worst_ext
            if worst_ext > ANGLE_TOL:
                problems.append(f"extrinsic and Gauss-Bonnet angles differ by {worst_ext:.3e}")
        if worst_residual > RESIDUAL_TOL * 2 * math.pi:
            problems.append(f"Gauss-Bonnet residual {worst_residual:.3e}")
        lo, hi = ORDER_RANGE
        if convergence["ratios"] and not all(lo <= q <= hi for q in convergence["ratios"]):
            problems.append(f"RK4 error ratios {convergence['ratios']} outside [{lo}, {hi}]")

        summary = f"max angle gap {max(worst_ode, data.get('max_extrinsic_gap', 0.0)):.3e} over {len(rows)} circles"
        if problems:
            data["problems"] = problems
            return ExperimentResult.violation(summary, data, rows=rows, sort_by=["r"])
        return ExperimentResult(success=True, summary=summary, data=data, rows=rows, sort_by=["r"])
