"""
Property suite: the invariants of every module in one fail-fast run.

Most checks use the fiber space of S^2(K); the others cover the
counterexample family, random orthogonal matrices in dimension 3 and up,
and frame transport.

Each check returns None when it passes, or a JSON-ready counterexample.
Checks run in worker threads; results are consumed in suite order and the
first failure stops the suite.
"""

import asyncio
import math
import zlib
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import ortho_group

from ..config import get_config
from ..core import (
    HolonomicSpace,
    check_convexity_condition,
    check_property_p,
    counterexample_space,
    holonomic_distance,
    holonomy_radius_at,
    holonomy_radius_origin,
    left_invariant_distance,
    operator_norm,
    sample_lipschitz_gaps,
)
from ..surfaces import (
    GeodesicCircle,
    LoopSpec,
    angle_gap,
    build_fiber_holonomic_space,
    fiber_distance,
    fiber_norm_bound,
    gauss_bonnet_residual,
    geodesic_circle_loop,
    holonomy_angle,
    isoperimetric_residual,
    manifold_holonomy_radius,
    reverse_loop,
    spaceform_length_norm,
    spaceform_length_norm_numeric,
    transport_rotation,
    transport_sweep,
)
from .base import Experiment, ExperimentParameter, ExperimentResult, register_experiment
from .transport import ANGLE_TOL, ORDER_RANGE, convergence_ratios, default_radii

Counterexample = Optional[Dict[str, Any]]

ORACLE_CURVATURES = (1.0, -1.0, 4.0, -0.25)
SCALING_CURVATURES = (4.0, 0.25, -0.25, -4.0)
OPERATOR_NORM_DIMENSIONS = (3, 4, 6)
# base points at these fractions of the origin radius, along one direction
LIPSCHITZ_OFFSETS = (0.0, 0.12, 0.25, 0.4, 0.6)
LIPSCHITZ_SLACK = 1e-3


class SuiteContext:
    """Shared inputs of the checks: the fiber space, its radius and a seeded generator per check."""

    def __init__(self, K: float, n_angles: int, seed: int, pairs: int, triples: int):
        self.K = K
        self.seed = seed
        self.pairs = pairs
        self.triples = triples
        self.space: HolonomicSpace = build_fiber_holonomic_space(K, n_angles)
        self.rho = holonomy_radius_origin(self.space).require_finite()

    def rng(self, name: str) -> np.random.Generator:
        # a fixed stream per check keeps results independent of execution order
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])


def check_group_norm(ctx: SuiteContext) -> Counterexample:
    report = ctx.space.validate()
    return None if report.valid else {"violations": [v.to_dict() for v in report.violations[:10]]}


def check_length_norm_oracle(ctx: SuiteContext) -> Counterexample:
    for K in ORACLE_CURVATURES:
        for theta in np.linspace(-math.pi, math.pi, 99):
            closed = spaceform_length_norm(K, float(theta))
            numeric = spaceform_length_norm_numeric(K, float(theta))
            if abs(closed - numeric) > 1e-8:
                return {"K": K, "theta": float(theta), "L_closed": closed, "L_numeric": numeric}
    return None


def check_length_norm_shape(ctx: SuiteContext) -> Counterexample:
    thetas = np.linspace(0.0, math.pi, 257)
    for K in ORACLE_CURVATURES:
        values = np.array([spaceform_length_norm(K, float(t)) for t in thetas])
        mirrored = np.array([spaceform_length_norm(K, float(-t)) for t in thetas])
        if values[0] != 0.0 or np.any(values[1:] <= 0.0):
            return {"K": K, "problem": "L(0) != 0 or L not positive away from 0"}
        if np.any(np.diff(values) <= 0.0):
            return {"K": K, "problem": "L not increasing on [0, pi]"}
        if np.max(np.abs(values - mirrored)) > 0.0:
            return {"K": K, "problem": "L(-theta) != L(theta)"}
    return None


def check_holonomy_oracles(ctx: SuiteContext) -> Counterexample:
    K = ctx.K if ctx.K > 0 else 1.0
    for row in transport_sweep(K, default_radii(K), steps=1024):
        gaps = [angle_gap(row["theta_ode"], row["theta_gb"])]
        if row["theta_extrinsic"] is not None:
            gaps.append(angle_gap(row["theta_extrinsic"], row["theta_gb"]))
        if max(gaps) > ANGLE_TOL:
            return dict(row, gaps=gaps)
    return None


def check_residuals(ctx: SuiteContext) -> Counterexample:
    for K in ORACLE_CURVATURES:
        scale = math.sqrt(abs(K))
        for x in (0.05, 0.5, 1.0, 2.0, 3.0):
            if K > 0 and x >= math.pi:
                continue
            circle = GeodesicCircle(K, x / scale)
            iso = isoperimetric_residual(K, circle.r) / circle.circumference ** 2
            gb = gauss_bonnet_residual(circle) / max(abs(circle.enclosed_curvature), 1.0)
            if abs(iso) > 1e-9 or abs(gb) > 1e-9:
                return {"K": K, "r": circle.r, "isoperimetric": iso, "gauss_bonnet": gb}
    return None


def check_radius_dual_route(ctx: SuiteContext) -> Counterexample:
    closed = manifold_holonomy_radius(ctx.K)
    gap = abs(closed - ctx.rho)
    if gap > 1e-4 or ctx.rho < closed - 1e-9:
        return {"closed_form": closed, "fiber_sample": ctx.rho, "gap": gap}
    return None


def check_property_p_sharpness(ctx: SuiteContext) -> Counterexample:
    origin = np.zeros(2)
    inside = check_property_p(ctx.space, origin, 0.99 * ctx.rho, pair_budget=ctx.pairs, seed=ctx.seed)
    if inside is not None:
        return {"radius": 0.99 * ctx.rho, "violation": inside.to_dict()}
    outside = check_property_p(ctx.space, origin, 1.2 * ctx.rho, pair_budget=ctx.pairs, seed=ctx.seed)
    if outside is None:
        return {"radius": 1.2 * ctx.rho, "problem": "no violation found beyond the holonomy radius"}
    return None


def check_metric_axioms(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("metric")
    points = rng.normal(scale=2.0 * ctx.rho, size=(ctx.triples, 3, 2))
    for x, y, z in points:
        dxy = holonomic_distance(ctx.space, x, y)
        dyx = holonomic_distance(ctx.space, y, x)
        dyz = holonomic_distance(ctx.space, y, z)
        dxz = holonomic_distance(ctx.space, x, z)
        if abs(dxy - dyx) > 1e-9 or dxz > dxy + dyz + 1e-9 or holonomic_distance(ctx.space, x, x) != 0.0:
            return {"x": x.tolist(), "y": y.tolist(), "z": z.tolist(), "d_xy": dxy, "d_yx": dyx, "d_yz": dyz, "d_xz": dxz}
    return None


def check_norm_recovery(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("norm")
    for v in rng.normal(scale=3.0 * ctx.rho, size=(ctx.pairs // 10 + 1, 2)):
        recovered = holonomic_distance(ctx.space, v, np.zeros(2))
        if abs(recovered - np.linalg.norm(v)) > 1e-12 * max(1.0, np.linalg.norm(v)):
            return {"v": v.tolist(), "d_L(v, 0)": recovered}
    e = np.array([1.0, 0.0])
    for s, t in rng.uniform(0.0, 4.0 * ctx.rho, size=(ctx.pairs // 10 + 1, 2)):
        d = holonomic_distance(ctx.space, s * e, t * e)
        if abs(d - abs(s - t)) > 1e-12 * max(1.0, abs(s - t)):
            return {"s": float(s), "t": float(t), "d_L(se, te)": d}
    return None


def check_local_isometry(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("isometry")
    radius = 0.99 * manifold_holonomy_radius(ctx.K)
    count = max(1, ctx.pairs // 10)
    directions = rng.normal(size=(count, 2, 2))
    directions /= np.linalg.norm(directions, axis=2, keepdims=True)
    points = directions * (radius * np.sqrt(rng.random((count, 2, 1))))
    for u, v in points:
        d = fiber_distance(ctx.K, u, v)
        if abs(d - np.linalg.norm(u - v)) > 1e-8:
            return {"u": u.tolist(), "v": v.tolist(), "fiber_distance": d, "euclidean": float(np.linalg.norm(u - v))}
    far = 10.0 * max(1.0, 1.2 * ctx.rho / 10.0)
    u, v = np.array([far, 0.0]), np.array([-far, 0.0])
    d = fiber_distance(ctx.K, u, v)
    if not d < 2.0 * far or d > fiber_norm_bound(ctx.K) + 1e-9:
        return {"u": u.tolist(), "v": v.tolist(), "fiber_distance": d, "problem": "no rotation shortcut"}
    return None


def check_lipschitz(ctx: SuiteContext) -> Counterexample:
    gaps = sample_lipschitz_gaps(ctx.space)
    if gaps["holonomy"] < -1e-9 or gaps["convexity"] < -1e-9:
        return gaps
    lengths, matrices = ctx.space.group.lengths, ctx.space.group.matrices
    displacement = np.linalg.norm(np.eye(2) - matrices, ord=2, axis=(1, 2))
    moving = displacement > get_config().numerics.tol_id
    per_cvx = lengths[moving] / displacement[moving]
    per_hol = lengths[moving] / np.sqrt(2.0 * displacement[moving])
    bad = np.flatnonzero(per_cvx < per_hol - 1e-12)
    if bad.size:
        return {"entry": int(np.flatnonzero(moving)[bad[0]]), "convexity": float(per_cvx[bad[0]]), "holonomy": float(per_hol[bad[0]])}
    return None


def check_convexity_condition_inside(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("convexity")
    radius = ctx.space.convexity_radius.value.require_finite()
    for u in rng.normal(size=(ctx.pairs // 10 + 1, 2)):
        u = u / np.linalg.norm(u) * radius * 0.999 * rng.random()
        excess = check_convexity_condition(ctx.space, u)
        if excess > 1e-12:
            return {"u": u.tolist(), "excess": excess}
    return None


def check_boundedness(ctx: SuiteContext) -> Counterexample:
    largest = float(np.max(ctx.space.group.lengths))
    bound = math.pi * math.sqrt(3.0) / math.sqrt(ctx.K)
    if abs(largest - bound) > 1e-10 or abs(fiber_norm_bound(ctx.K) - bound) > 1e-10:
        return {"max_L": largest, "expected": bound}
    return None


def check_counterexample_radii(ctx: SuiteContext) -> Counterexample:
    space = counterexample_space(1e-6, 100.0)
    holonomy, convexity = space.origin_radius, space.convexity_radius
    if not float(holonomy.value) < 1e-3 or not holonomy.limit_at_puncture:
        return {"holonomy_radius": holonomy.to_dict(), "problem": "holonomy radius does not collapse toward t = 0"}
    if abs(float(convexity.value) - 1.0 / math.sqrt(2.0)) > 1e-4:
        return {"convexity_radius": convexity.to_dict(), "expected": 1.0 / math.sqrt(2.0)}
    return None


def check_operator_norm(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("operator-norm")
    count = 2 * max(1, ctx.pairs // 200)
    for n in OPERATOR_NORM_DIMENSIONS:
        eye = np.eye(n)
        rotations = ortho_group.rvs(n, size=count, random_state=rng)
        for a, b in zip(rotations[0::2], rotations[1::2]):
            da, db, dab = operator_norm(eye - a), operator_norm(eye - b), operator_norm(eye - a @ b)
            if abs(operator_norm(a) - 1.0) > 1e-12 or max(da, db) > 2.0 + 1e-12:
                return {"n": n, "a": a.tolist(), "norm": operator_norm(a), "displacement": da}
            # id - ab = (id - a) + a (id - b)
            if dab > da + db + 1e-12:
                return {"n": n, "a": a.tolist(), "b": b.tolist(), "|id-ab|": dab, "|id-a|+|id-b|": da + db}
            x, y = rng.normal(size=(2, n, n))
            total = operator_norm(x) + operator_norm(y)
            if operator_norm(x + y) > total * (1.0 + 1e-12):
                return {"n": n, "x": x.tolist(), "y": y.tolist(), "|x+y|": operator_norm(x + y), "|x|+|y|": total}
    return None


def check_left_invariance(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("left-invariance")
    sample = ctx.space.group
    elements = [entry.element for entry in sample.entries]
    for i, j, k in rng.integers(len(elements), size=(ctx.triples // 10 + 1, 3)):
        a, b, c = elements[i], elements[j], elements[k]
        d = left_invariant_distance(sample, a, b)
        shifted = left_invariant_distance(sample, c.compose(a), c.compose(b))
        swapped = left_invariant_distance(sample, b, a)
        if abs(shifted - d) > 1e-12 or abs(swapped - d) > 1e-12:
            return {"indices": [int(i), int(j), int(k)], "d(a,b)": d, "d(ca,cb)": shifted, "d(b,a)": swapped}
    return None


def check_radius_lipschitz(ctx: SuiteContext) -> Counterexample:
    rng = ctx.rng("radius-lipschitz")
    direction = rng.normal(size=2)
    direction /= np.linalg.norm(direction)
    seed = int(rng.integers(2**32))
    offsets = [f * ctx.rho for f in LIPSCHITZ_OFFSETS]
    brackets = [
        holonomy_radius_at(ctx.space, x * direction, bracket_tol=1e-4, pair_budget=min(ctx.pairs, 1000), seed=seed)
        for x in offsets
    ]
    for x, bracket in zip(offsets, brackets):
        if bracket.unbounded or not bracket.hi_witnessed:
            return {"offset": x, "bracket": bracket.to_dict(), "problem": "no violation witnessed"}
    for (x0, b0), (x1, b1) in zip(zip(offsets, brackets), zip(offsets[1:], brackets[1:])):
        allowed = (x1 - x0) + 0.5 * ((b0.hi - b0.lo) + (b1.hi - b1.lo)) + LIPSCHITZ_SLACK
        if abs(b1.mid - b0.mid) > allowed:
            return {"offsets": [x0, x1], "radii": [b0.mid, b1.mid], "allowed": allowed}
    return None


def check_transport_frame(ctx: SuiteContext) -> Counterexample:
    loops = [geodesic_circle_loop(GeodesicCircle(ctx.K, r)) for r in default_radii(ctx.K)]
    loops.append(LoopSpec(2.0 * math.pi, lambda ts: 0.3 + np.cos(ts), label="0.3 + cos t"))
    for loop in loops:
        forward = transport_rotation(loop, steps=1024)
        backward = transport_rotation(reverse_loop(loop), steps=1024)
        if max(forward.frame.length_drift, backward.frame.length_drift) > 1e-10:
            return {"loop": loop.label, "drift": [forward.frame.length_drift, backward.frame.length_drift]}
        if angle_gap(backward.angle, -forward.angle) > ANGLE_TOL:
            return {"loop": loop.label, "forward": forward.angle, "reversed": backward.angle}
        if angle_gap(holonomy_angle(reverse_loop(loop)), -holonomy_angle(loop)) > ANGLE_TOL:
            return {"loop": loop.label, "problem": "reversed holonomy angle is not negated"}
    convergence = convergence_ratios(ctx.K, default_radii(ctx.K)[2])
    low, high = ORDER_RANGE
    if not convergence["ratios"] or not all(low <= q <= high for q in convergence["ratios"]):
        return convergence
    return None


def check_radius_scaling(ctx: SuiteContext) -> Counterexample:
    unit = {1.0: manifold_holonomy_radius(1.0), -1.0: manifold_holonomy_radius(-1.0)}
    hyperbolic = math.sqrt(2.0 * math.pi)
    if abs(unit[1.0] - 2.4558) > 1e-3 or abs(unit[-1.0] - hyperbolic) > 1e-6 * hyperbolic:
        return {"K=1": unit[1.0], "K=-1": unit[-1.0]}
    for K in SCALING_CURVATURES:
        expected = unit[math.copysign(1.0, K)] / math.sqrt(abs(K))
        found = manifold_holonomy_radius(K)
        if abs(found - expected) > 1e-6 * expected:
            return {"K": K, "holrad": found, "expected": expected}
        if K > 0 and found > fiber_norm_bound(K) / 2.0 + 1e-12:
            return {"K": K, "holrad": found, "bound": fiber_norm_bound(K) / 2.0}
    return None


CHECKS: List[Tuple[str, Callable[[SuiteContext], Counterexample]]] = [
    ("group-norm-axioms", check_group_norm),
    ("length-norm-oracle", check_length_norm_oracle),
    ("length-norm-shape", check_length_norm_shape),
    ("holonomy-oracles", check_holonomy_oracles),
    ("isoperimetric-gauss-bonnet", check_residuals),
    ("radius-dual-route", check_radius_dual_route),
    ("property-p-sharpness", check_property_p_sharpness),
    ("metric-axioms", check_metric_axioms),
    ("norm-recovery", check_norm_recovery),
    ("local-isometry", check_local_isometry),
    ("lipschitz-corollary", check_lipschitz),
    ("convexity-condition", check_convexity_condition_inside),
    ("boundedness", check_boundedness),
    ("counterexample-radii", check_counterexample_radii),
    ("operator-norm", check_operator_norm),
    ("left-invariance", check_left_invariance),
    ("radius-lipschitz", check_radius_lipschitz),
    ("transport-frame", check_transport_frame),
    ("radius-scaling", check_radius_scaling),
]
CHECK_NAMES = [name for name, _ in CHECKS]


@register_experiment
class PropertySuiteExperiment(Experiment):
    name = "property-suite"

    @property
    def description(self) -> str:
        return "Run every invariant check (fiber space of S^2(K), counterexample family, transport), failing fast"

    @property
    def parameters(self) -> List[ExperimentParameter]:
        return [
            ExperimentParameter("K", "float", "Curvature (positive)", default=1.0),
            ExperimentParameter("n_angles", "integer", "Fiber sample size", default=512, minimum=8),
            ExperimentParameter("seed", "integer", "Seed of every random draw", default=get_config().runtime.seed, minimum=0),
            ExperimentParameter("pairs", "integer", "Pair budget of the sampled checks", default=10_000, minimum=1),
            ExperimentParameter("triples", "integer", "Random triples for the metric axioms", default=10_000, minimum=1),
            ExperimentParameter("checks", "string", "Comma-separated subset of checks (default: all)"),
        ]

    async def execute(
        self, K: float, n_angles: int, seed: int, pairs: int, triples: int, checks: Optional[str]
    ) -> ExperimentResult:
        selected = CHECKS
        if checks:
            wanted = [c.strip() for c in checks.split(",") if c.strip()]
            unknown = sorted(set(wanted) - set(CHECK_NAMES))
            if unknown:
                raise ValueError(f"Unknown check(s): {unknown}. Known: {CHECK_NAMES}")
            selected = [(name, fn) for name, fn in CHECKS if name in wanted]

        ctx = await asyncio.to_thread(SuiteContext, K, n_angles, seed, pairs, triples)
        semaphore = asyncio.Semaphore(get_config().runtime.threads)

        async def run_check(fn: Callable[[SuiteContext], Counterexample]) -> Counterexample:
            async with semaphore:
                try:
                    return await asyncio.to_thread(fn, ctx)
                except Exception as e:
                    return {"error": f"{type(e).__name__}: {e}"}

        tasks = [asyncio.create_task(run_check(fn)) for _, fn in selected]
        rows: List[Dict[str, Any]] = []
        failure: Optional[Tuple[str, Dict[str, Any]]] = None
        try:
            for order, ((name, _), task) in enumerate(zip(selected, tasks)):
                counterexample = await task
                rows.append({"order": order, "check": name, "passed": counterexample is None})
                self.logger.info("suite check finished", check=name, passed=counterexample is None)
                if counterexample is not None:
                    failure = (name, counterexample)
                    break
        finally:
            for task in tasks:
                task.cancel()
            # checks already inside a worker thread run to completion
            await asyncio.gather(*tasks, return_exceptions=True)

        data: Dict[str, Any] = {"K": K, "n_angles": n_angles, "holrad": ctx.rho, "checks_run": len(rows)}
        if failure is not None:
            name, counterexample = failure
            data.update(failed_check=name, counterexample=counterexample)
            return ExperimentResult.violation(f"FAILED {name}", data, rows=rows, sort_by=["order"])
        return ExperimentResult(
            success=True, summary=f"{len(rows)} checks passed, holrad = {ctx.rho:.10g}", data=data, rows=rows,
            sort_by=["order"],
        )
