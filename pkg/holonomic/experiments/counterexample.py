"""Sweep of the radius ratios along the two-frequency counterexample family."""

import math
from typing import List

import numpy as np

from ..core import counterexample_space
from ..core.spaces import displacement_norms
from .base import Experiment, ExperimentParameter, ExperimentResult, gather_limited, register_experiment

PROBE_T = 1e-4
PROBE_LIMIT = 0.006
CONVEXITY_LIMIT = 1.0 / math.sqrt(2.0)
CONVEXITY_CEILING = 0.70720


@register_experiment
class CounterexampleSweepExperiment(Experiment):
    name = "counterexample-sweep"

    @property
    def description(self) -> str:
        return "Convexity and holonomy ratios of t -> diag(R_t, R_sqrt2 t) on a log grid"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("t_min", "float", "Smallest parameter (positive)", default=1e-6),
            ExperimentParameter("t_max", "float", "Largest parameter", default=100.0),
            ExperimentParameter("grid", "integer", "Number of log-spaced parameters", default=100_000, minimum=8),
        ]

    async def execute(self, t_min: float, t_max: float, grid: int) -> ExperimentResult:
        family = counterexample_space(t_min, t_max).group
        ts = np.geomspace(t_min, t_max, grid)
        if t_min <= PROBE_T <= t_max:
            ts = np.unique(np.concatenate([ts, [PROBE_T]]))

        def ratios(chunk: np.ndarray):
            lengths = np.asarray(family.lengths(chunk), dtype=float)
            displacement = displacement_norms(family.elements(chunk))
            return lengths / displacement, lengths / np.sqrt(2.0 * displacement), displacement

        threads = max(1, min(len(ts) // 1024, 8))
        parts = await gather_limited([lambda c=c: ratios(c) for c in np.array_split(ts, threads)])
        convexity = np.concatenate([p[0] for p in parts])
        holonomy = np.concatenate([p[1] for p in parts])
        displacement = np.concatenate([p[2] for p in parts])

        rows = [
            {"t": float(t), "displacement": float(d), "convexity_ratio": float(c), "holonomy_ratio": float(h)}
            for t, d, c, h in zip(ts, displacement, convexity, holonomy)
        ]
        i_cvx, i_hol = int(np.argmin(convexity)), int(np.argmin(holonomy))
        data = {
            "min_convexity_ratio": float(convexity[i_cvx]),
            "argmin_convexity_t": float(ts[i_cvx]),
            "min_holonomy_ratio": float(holonomy[i_hol]),
            "argmin_holonomy_t": float(ts[i_hol]),
        }
        problems = []
        if data["min_convexity_ratio"] < CONVEXITY_LIMIT - 1e-9:
            problems.append("convexity ratio drops below 1/sqrt(2)")
        elif data["min_convexity_ratio"] > CONVEXITY_CEILING:
            problems.append(f"convexity ratio never comes within {CONVEXITY_CEILING} of 1/sqrt(2); grid too coarse")
        if t_min <= PROBE_T <= t_max:
            probe = float(holonomy[int(np.searchsorted(ts, PROBE_T))])
            data["holonomy_ratio_at_probe"] = probe
            if probe >= PROBE_LIMIT:
                problems.append(f"holonomy ratio at t = {PROBE_T:g} is not below {PROBE_LIMIT}")
            if t_min < PROBE_T and float(holonomy[0]) >= probe:
                problems.append("holonomy ratio does not decrease toward t_min")

        summary = (
            f"min L/|id-a| = {data['min_convexity_ratio']:.8f}, "
            f"min L/sqrt(2|id-a|) = {data['min_holonomy_ratio']:.3e} at t = {data['argmin_holonomy_t']:.3g}"
        )
        if problems:
            data["problems"] = problems
            return ExperimentResult.violation(summary, data, rows=rows, sort_by=["t"])
        return ExperimentResult(success=True, summary=summary, data=data, rows=rows, sort_by=["t"])
