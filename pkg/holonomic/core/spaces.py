"""
Holonomic spaces (V, H, L) at desk scale.

H is either a finite NormedGroupSample or a one-parameter family
t -> element(t) with length L(t). This module computes the holonomic
metric d_L, the holonomy radius at the origin, the convexity radius, the
property (P) sampler and the bisection for the holonomy radius at a point.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..config import get_config
from ..errors import DegenerateRadiusError, ElementNotInSampleError, InvalidInputError
from ..utils.logging import get_logger, log_function_call
from .groups import (
    GroupElement,
    NormedGroupSample,
    ValidationReport,
    operator_norm,
    validate_group_norm,
)
from .search import ExtendedReal, grid_minimize

logger = get_logger(__name__)

MatrixStack = Callable[[np.ndarray], np.ndarray]


def displacement_norms(matrices: np.ndarray) -> np.ndarray:
    """Operator norms |id - a| for a (m, n, n) stack."""
    if len(matrices) == 0:
        return np.zeros(0)
    n = matrices.shape[-1]
    return np.linalg.norm(np.eye(n) - matrices, ord=2, axis=(1, 2))


@dataclass(frozen=True, eq=False)
class OneParamFamily:
    """
    A one-parameter group t -> element(t) with group-norm L(t).

    `elements` and `lengths` are vectorized: they map an array of parameters
    to a (m, n, n) matrix stack and to an array of lengths. Scans never go
    below `min_magnitude` in |t| (0/0 limits live there).
    """

    dimension: int
    t_low: float
    t_high: float
    elements: MatrixStack
    lengths: Callable[[np.ndarray], np.ndarray]
    min_magnitude: float = 0.0
    name: str = "family"
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.t_low) and math.isfinite(self.t_high)) or self.t_low >= self.t_high:
            raise InvalidInputError(f"invalid parameter range [{self.t_low}, {self.t_high}]")
        if not self.t_low <= 0.0 <= self.t_high:
            raise InvalidInputError("parameter range must contain 0 (the identity)")

    def element(self, t: float) -> GroupElement:
        return GroupElement(self.elements(np.array([float(t)]))[0], label=f"t={t:.17g}")

    def length(self, t: float) -> float:
        return float(np.asarray(self.lengths(np.array([float(t)])))[0])

    @property
    def inner_edge(self) -> float:
        return max(self.min_magnitude, get_config().numerics.puncture)

    def _side(self, end: float, points: int) -> np.ndarray:
        edge = self.inner_edge
        span = abs(end)
        if span <= edge:
            return np.zeros(0)
        uniform = np.linspace(0.0, span, points)
        uniform = uniform[uniform >= edge]
        logarithmic = np.geomspace(edge, span, points)
        magnitudes = np.unique(np.concatenate([uniform, logarithmic]))
        return magnitudes if end > 0 else -magnitudes[::-1]

    def scan_sides(self, points: Optional[int] = None) -> List[np.ndarray]:
        """
        Sorted parameter grids on each side of the puncture.

        Each side merges a uniform grid with a log-spaced one starting at the
        inner edge, so both interior minima and t -> 0 limits are seen.
        """
        points = points or get_config().numerics.family_grid
        sides = [self._side(self.t_low, points), self._side(self.t_high, points)]
        return [s for s in sides if s.size]

    def full_grid(self, points: Optional[int] = None) -> np.ndarray:
        """Uniform grid over the whole range, with 0 included."""
        points = points or get_config().numerics.family_grid
        grid = np.linspace(self.t_low, self.t_high, points)
        return np.unique(np.concatenate([grid, [0.0]]))

    def discretize(self, points: int = 65) -> NormedGroupSample:
        """Symmetric uniform sample of the family, for axiom checks."""
        half = min(abs(self.t_low), abs(self.t_high))
        ts = np.linspace(-half, half, points if points % 2 else points + 1)
        matrices = self.elements(ts)
        lengths = np.asarray(self.lengths(ts), dtype=float)
        return NormedGroupSample.from_pairs(
            self.dimension,
            [(GroupElement(m, label=f"t={t:.6g}"), length) for t, m, length in zip(ts, matrices, lengths)],
        )

    def check_invariants(self, probes: int = 16) -> List[str]:
        """Return descriptions of failed family invariants (empty when fine)."""
        problems = []
        if not self.element(0.0).is_identity():
            problems.append("element(0) is not the identity")
        if abs(self.length(0.0)) > 1e-12:
            problems.append(f"L(0) = {self.length(0.0)} != 0")
        half = min(abs(self.t_low), abs(self.t_high))
        ts = np.linspace(half / probes, half, probes)
        asymmetry = np.abs(np.asarray(self.lengths(ts)) - np.asarray(self.lengths(-ts)))
        if half > 0 and np.max(asymmetry) > 1e-9:
            problems.append(f"L(-t) != L(t), max deviation {np.max(asymmetry):.3e}")
        return problems


Group = Union[NormedGroupSample, OneParamFamily]


@dataclass(frozen=True)
class RadiusResult:
    """Infimum of a radius ratio together with where it was found."""

    value: ExtendedReal
    parameter: Optional[float] = None  # family parameter or sample index
    element: Optional[GroupElement] = None
    length: Optional[float] = None
    displacement: Optional[float] = None
    limit_at_puncture: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value.to_json(),
            "parameter": self.parameter,
            "length": self.length,
            "displacement": self.displacement,
            "limit_at_puncture": self.limit_at_puncture,
        }


@dataclass
class PropertyPViolation:
    """A pair (v, w) and element a with |v-w|^2 - |v-aw|^2 - L(a)^2 = slack > 0."""

    v: np.ndarray
    w: np.ndarray
    element: GroupElement
    length: float
    slack: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "element": self.element.matrix.tolist(),
            "L": self.length,
            "slack": self.slack,
        }


@dataclass(frozen=True)
class RadiusBracket:
    """Bisection bracket for the holonomy radius at a point."""

    lo: float = 0.0
    hi: float = math.inf
    unbounded: bool = False
    hi_witnessed: bool = False
    witness: Optional[PropertyPViolation] = None

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": self.lo,
            "hi": None if self.unbounded else self.hi,
            "unbounded": self.unbounded,
            "hi_witnessed": self.hi_witnessed,
            "witness": self.witness.to_dict() if self.witness else None,
        }


# Named builders for the family form of the JSON interface
SPACE_BUILDERS: Dict[str, Callable[..., "HolonomicSpace"]] = {}


def register_space_builder(name: str):
    """Register a builder so spaces can be named by {"family": name, ...}."""

    def decorator(func):
        if name in SPACE_BUILDERS:
            logger.warning(f"Space builder '{name}' is already registered, overriding")
        SPACE_BUILDERS[name] = func
        return func

    return decorator


@dataclass(frozen=True, eq=False)
class HolonomicSpace:
    """The triplet (V, H, L) with V = R^n carrying the Euclidean inner product."""

    dimension: int
    group: Group
    norm_kind: str = "inner_product"
    builder: Optional[Dict[str, Any]] = None  # {"family": name, **params} when built by name

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError("dimension must be positive")
        if self.group.dimension != self.dimension:
            raise InvalidInputError(
                f"group acts on R^{self.group.dimension}, space is R^{self.dimension}"
            )
        if self.norm_kind != "inner_product":
            raise InvalidInputError(f"unsupported norm kind: {self.norm_kind}")

    @classmethod
    def trivial(cls, dimension: int) -> "HolonomicSpace":
        return cls(dimension, NormedGroupSample.trivial(dimension))

    @property
    def is_family(self) -> bool:
        return isinstance(self.group, OneParamFamily)

    @cached_property
    def is_trivial(self) -> bool:
        if isinstance(self.group, NormedGroupSample):
            return self.group.is_trivial
        return False

    def validate(self, points: int = 65) -> ValidationReport:
        """Group-norm axioms on the sample, or on a discretization of the family."""
        if isinstance(self.group, NormedGroupSample):
            return validate_group_norm(self.group)
        return validate_group_norm(self.group.discretize(points))

    def candidates(self, points: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Non-identity elements as (parameters, matrices, lengths).

        For a sample the parameters are entry indices; for a family they are
        the scan grid on both sides of the puncture.
        """
        tol_id = get_config().numerics.tol_id
        if isinstance(self.group, NormedGroupSample):
            params = np.arange(len(self.group), dtype=float)
            matrices, lengths = self.group.matrices, self.group.lengths
        else:
            sides = self.group.scan_sides(points)
            params = np.concatenate(sides) if sides else np.zeros(0)
            matrices = self.group.elements(params) if params.size else np.zeros((0, self.dimension, self.dimension))
            lengths = np.asarray(self.group.lengths(params), dtype=float)
        n = self.dimension
        keep = np.max(np.abs(matrices - np.eye(n)), axis=(1, 2)) > tol_id if len(matrices) else np.zeros(0, bool)
        return params[keep], matrices[keep], lengths[keep]

    @cached_property
    def origin_radius(self) -> RadiusResult:
        return _radius_search(self, _holonomy_ratio)

    @cached_property
    def convexity_radius(self) -> RadiusResult:
        return _radius_search(self, _convexity_ratio)

    def element_length(self, element: GroupElement) -> float:
        """L of an element, resolved in the sample or along the family."""
        if isinstance(self.group, NormedGroupSample):
            return self.group.length_of(element)
        return _family_length_of(self.group, element)

    def to_dict(self) -> Dict[str, Any]:
        if self.builder is not None:
            return dict(self.builder)
        if isinstance(self.group, OneParamFamily):
            raise InvalidInputError("unnamed one-parameter families cannot be serialized")
        return {"dimension": self.dimension, "norm_kind": self.norm_kind, "group": self.group.to_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HolonomicSpace":
        if "family" in data:
            params = {k: v for k, v in data.items() if k != "family"}
            builder = SPACE_BUILDERS.get(data["family"])
            if builder is None:
                raise InvalidInputError(
                    f"unknown space family '{data['family']}', known: {sorted(SPACE_BUILDERS)}"
                )
            return builder(**params)
        group = NormedGroupSample.from_dict(data["group"])
        return cls(int(data["dimension"]), group, data.get("norm_kind", "inner_product"))

    @classmethod
    def from_json(cls, text: str) -> "HolonomicSpace":
        return cls.from_dict(json.loads(text))


def _check_vector(space: HolonomicSpace, x: Any, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (space.dimension,):
        raise InvalidInputError(f"{name} has shape {v.shape}, expected ({space.dimension},)")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return v


def _holonomy_ratio(lengths: np.ndarray, displacements: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return lengths / np.sqrt(2.0 * displacements)


def _convexity_ratio(lengths: np.ndarray, displacements: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return lengths / displacements


def _radius_search(
    space: HolonomicSpace, ratio: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> RadiusResult:
    numerics = get_config().numerics

    if isinstance(space.group, NormedGroupSample):
        params, matrices, lengths = space.candidates()
        if params.size == 0:
            return RadiusResult(ExtendedReal.infinity())
        displacements = displacement_norms(matrices)
        ratios = ratio(lengths, displacements)
        i = int(np.argmin(ratios))
        index = int(params[i])
        return RadiusResult(
            value=ExtendedReal.finite(float(ratios[i])),
            parameter=float(index),
            element=space.group.entries[index].element,
            length=float(lengths[i]),
            displacement=float(displacements[i]),
        )

    family = space.group

    def objective(ts: np.ndarray) -> np.ndarray:
        matrices = family.elements(ts)
        identity = np.max(np.abs(matrices - np.eye(family.dimension)), axis=(1, 2)) <= numerics.tol_id
        values = ratio(np.asarray(family.lengths(ts), dtype=float), displacement_norms(matrices))
        return np.where(identity, np.inf, values)

    best = None
    for side in family.scan_sides():
        inner = 0 if side[0] > 0 else side.size - 1
        found = grid_minimize(objective, side, numerics.golden_tol, tie_key=np.abs)
        if not math.isfinite(found.value):
            continue
        candidate = (found.value, found.argmin, found.index == inner)
        # ties go to the smaller parameter value
        if best is None or (candidate[0], candidate[1]) < (best[0], best[1]):
            best = candidate
    if best is None:
        return RadiusResult(ExtendedReal.infinity())

    value, t, at_puncture = best
    element = family.element(t)
    result = RadiusResult(
        value=ExtendedReal.finite(value),
        parameter=t,
        element=element,
        length=family.length(t),
        displacement=element.displacement_norm(),
        limit_at_puncture=at_puncture,
    )
    logger.debug("family radius search", family=family.name, value=value, parameter=t, limit=at_puncture)
    return result


def _family_length_of(family: OneParamFamily, element: GroupElement) -> float:
    numerics = get_config().numerics
    target = element.matrix

    def mismatch(ts: np.ndarray) -> np.ndarray:
        return np.max(np.abs(family.elements(ts) - target), axis=(1, 2))

    found = grid_minimize(mismatch, family.full_grid(), numerics.golden_tol * 1e-2)
    if found.value > numerics.tol_id:
        raise ElementNotInSampleError(
            f"element not on family '{family.name}' (closest mismatch {found.value:.3e} at t={found.argmin:.6g})"
        )
    return family.length(found.argmin)


# ---------------------------------------------------------------------------
# Metric


@log_function_call(logger)
def holonomic_distance(space: HolonomicSpace, u: Any, v: Any) -> float:
    """d_L(u, v) = inf over a of sqrt(L(a)^2 + |u - a v|^2)."""
    u = _check_vector(space, u, "u")
    v = _check_vector(space, v, "v")
    direct = float(np.linalg.norm(u - v))

    if isinstance(space.group, NormedGroupSample):
        moved = space.group.matrices @ v
        values = np.sqrt(space.group.lengths ** 2 + np.sum((u - moved) ** 2, axis=1))
        return min(direct, float(values.min())) if values.size else direct

    family = space.group

    def objective(ts: np.ndarray) -> np.ndarray:
        moved = family.elements(ts) @ v
        lengths = np.asarray(family.lengths(ts), dtype=float)
        return np.sqrt(lengths ** 2 + np.sum((u - moved) ** 2, axis=1))

    found = grid_minimize(objective, family.full_grid(), get_config().numerics.golden_tol)
    return min(direct, found.value)


def recover_norm(space: HolonomicSpace, v: Any) -> float:
    """|v| recovered as d_L(v, 0)."""
    return holonomic_distance(space, v, np.zeros(space.dimension))


def holonomy_radius_origin(space: HolonomicSpace) -> ExtendedReal:
    """HolRad(0) = inf over a != id of L(a) / sqrt(2 |id - a|)."""
    return space.origin_radius.value


def convexity_radius(space: HolonomicSpace) -> ExtendedReal:
    """CvxRad = inf over a != id of L(a) / |id - a|."""
    return space.convexity_radius.value


def is_flat(space: HolonomicSpace) -> bool:
    """True exactly when the holonomy radius at the origin is unbounded."""
    return not holonomy_radius_origin(space).is_finite


# ---------------------------------------------------------------------------
# Property (P)


def _sample_ball(rng: np.random.Generator, center: np.ndarray, r: float, count: int) -> np.ndarray:
    n = center.size
    directions = rng.standard_normal((count, n))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = r * rng.random((count, 1)) ** (1.0 / n)
    return center + radii * directions / norms


def _normalize_rows(x: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = norms > 1e-300
    return np.where(safe, x / np.where(safe, norms, 1.0), fallback)


def _adversarial_pairs(
    u: np.ndarray, r: float, matrices: np.ndarray, iterations: int = 40
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Near-extremal (v, w) per element, both inside the open ball B_r(u).

    The slack equals 2 <v, (a - id) w> - L(a)^2, so with M = a - id we ascend
    <u + p, M (u + q)> over |p|, |q| <= r by alternating exact maximization,
    started from +-x (x the top right singular vector of M) and, off the
    origin, from directions built out of u. At u = 0 the start from x is
    already the extremal pair w = r x, v = r M x / |M x|.
    """
    n = u.size
    radius = r * (1.0 - 1e-9)
    ms = matrices - np.eye(n)
    _, _, vh = np.linalg.svd(ms)
    top = vh[:, 0, :]
    starts = [top, -top]
    if np.linalg.norm(u) > 0:
        towards = np.broadcast_to(u / np.linalg.norm(u), top.shape)
        starts += [
            towards,
            -towards,
            _normalize_rows(np.einsum("kji,j->ki", ms, u), top),
            _normalize_rows(np.einsum("kij,j->ki", ms, u), top),
        ]
    best_v = best_w = None
    best_value = None
    for x in starts:
        q = radius * x
        p = radius * _normalize_rows(np.einsum("kij,kj->ki", ms, u + q), x)
        for _ in range(iterations):
            q = radius * _normalize_rows(np.einsum("kji,kj->ki", ms, u + p), x)
            p = radius * _normalize_rows(np.einsum("kij,kj->ki", ms, u + q), x)
        value = np.einsum("ki,ki->k", u + p, np.einsum("kij,kj->ki", ms, u + q))
        if best_value is None:
            best_v, best_w, best_value = u + p, u + q, value
        else:
            better = value > best_value
            best_v = np.where(better[:, None], u + p, best_v)
            best_w = np.where(better[:, None], u + q, best_w)
            best_value = np.maximum(value, best_value)
    return best_v, best_w


def _slack(v: np.ndarray, w: np.ndarray, matrix: np.ndarray, length: float) -> float:
    return float(np.sum((v - w) ** 2) - np.sum((v - matrix @ w) ** 2) - length ** 2)


@log_function_call(logger)
def check_property_p(
    space: HolonomicSpace,
    u: Any,
    r: float,
    pair_budget: int = 1000,
    seed: int = 0,
    element_budget: int = 1024,
) -> Optional[PropertyPViolation]:
    """
    Search B_r(u) for a violation of |v-w|^2 - |v-aw|^2 <= L(a)^2.

    Random pairs (uniform in the ball, deterministic from seed) are tested
    against every candidate element, then one adversarial pair per element.
    Returns the violation with the largest slack, or None.
    """
    if r <= 0:
        raise InvalidInputError("r must be positive")
    if pair_budget < 1:
        raise InvalidInputError("pair_budget must be at least 1")
    u = _check_vector(space, u, "u")
    numerics = get_config().numerics

    params, matrices, lengths = space.candidates(element_budget if space.is_family else None)
    if isinstance(space.group, OneParamFamily) and space.origin_radius.element is not None:
        extra = space.origin_radius.element.matrix
        matrices = np.concatenate([matrices, extra[np.newaxis]])
        lengths = np.concatenate([lengths, [space.origin_radius.length]])
    if len(matrices) == 0:
        return None

    rng = np.random.default_rng(seed)
    vs = _sample_ball(rng, u, r, pair_budget)
    ws = _sample_ball(rng, u, r, pair_budget)

    # slack = 2 <v, a w> - 2 <v, w> - L^2 for isometries a
    base = np.einsum("pi,pi->p", vs, ws)
    best_slack, best = -math.inf, None
    chunk = max(1, 2_000_000 // (pair_budget * space.dimension))
    for start in range(0, len(matrices), chunk):
        block = matrices[start:start + chunk]
        moved = np.einsum("kij,pj->kpi", block, ws)
        slacks = 2.0 * (np.einsum("pi,kpi->kp", vs, moved) - base) - lengths[start:start + chunk, None] ** 2
        k, p = np.unravel_index(int(np.argmax(slacks)), slacks.shape)
        if slacks[k, p] > best_slack:
            best_slack, best = float(slacks[k, p]), (vs[p], ws[p], start + k)

    adv_v, adv_w = _adversarial_pairs(u, r, matrices)
    adv_slacks = 2.0 * (
        np.einsum("ki,ki->k", adv_v, np.einsum("kij,kj->ki", matrices, adv_w))
        - np.einsum("ki,ki->k", adv_v, adv_w)
    ) - lengths ** 2
    k = int(np.argmax(adv_slacks))
    if adv_slacks[k] > best_slack:
        best_slack, best = float(adv_slacks[k]), (adv_v[k], adv_w[k], k)

    if best is None or best_slack <= numerics.slack_tol:
        return None
    v, w, k = best
    slack = _slack(v, w, matrices[k], float(lengths[k]))
    if slack <= numerics.slack_tol:
        return None
    return PropertyPViolation(
        v=np.array(v), w=np.array(w), element=GroupElement(matrices[k]), length=float(lengths[k]), slack=slack
    )


def holonomy_radius_at(
    space: HolonomicSpace,
    u: Any,
    bracket_tol: float = 1e-6,
    pair_budget: int = 1000,
    seed: int = 0,
    max_expansions: int = 20,
) -> RadiusBracket:
    """
    Bracket the supremum of radii on which property (P) holds around u.

    Bisects between 0 and HolRad(0) + 2|u| with check_property_p as the
    predicate; lo never showed a violation, hi has a witnessed one.
    """
    u = _check_vector(space, u, "u")
    radius0 = holonomy_radius_origin(space)
    if not radius0.is_finite:
        return RadiusBracket(unbounded=True)

    def predicate(r: float) -> Optional[PropertyPViolation]:
        return check_property_p(space, u, r, pair_budget, seed)

    lo = 0.0
    hi = max(radius0.require_finite() + 2.0 * float(np.linalg.norm(u)), bracket_tol)
    witness = predicate(hi)
    expansions = 0
    while witness is None and expansions < max_expansions:
        lo, hi = hi, 2.0 * hi
        witness = predicate(hi)
        expansions += 1
    if witness is None:
        logger.warning("no violation found at the upper bracket", hi=hi)
        return RadiusBracket(lo=lo, hi=hi, hi_witnessed=False)

    while hi - lo > bracket_tol:
        mid = 0.5 * (lo + hi)
        found = predicate(mid)
        if found is None:
            lo = mid
        else:
            hi, witness = mid, found

    logger.debug("holonomy radius bracket", lo=lo, hi=hi, u=u.tolist())
    return RadiusBracket(lo=lo, hi=hi, hi_witnessed=True, witness=witness)


# ---------------------------------------------------------------------------
# Lipschitz corollaries and the convexity condition


def _usable_radius(result: RadiusResult, what: str) -> float:
    if not result.value.is_finite:
        raise DegenerateRadiusError(f"{what} is unbounded (trivial group)")
    value = result.value.require_finite()
    if value <= 0.0 or result.limit_at_puncture:
        raise DegenerateRadiusError(
            f"{what} is approached only as t -> 0 (grid value {value:.3e}); its limit is not certified"
        )
    return value


def lipschitz_gap(space: HolonomicSpace, a: GroupElement, b: GroupElement) -> float:
    """L(a^-1 b) / HolRad(0) - sqrt(2 |a - b|); nonnegative up to 1e-9."""
    length = space.element_length(a.inverse().compose(b))
    radius = _usable_radius(space.origin_radius, "holonomy radius at the origin")
    return length / radius - math.sqrt(2.0 * operator_norm(a.matrix - b.matrix))


def convexity_lipschitz_gap(space: HolonomicSpace, a: GroupElement, b: GroupElement) -> float:
    """L(a^-1 b) / CvxRad - |a - b|; nonnegative up to 1e-9."""
    length = space.element_length(a.inverse().compose(b))
    result = space.convexity_radius
    if not result.value.is_finite:
        raise DegenerateRadiusError("convexity radius is unbounded (trivial group)")
    radius = result.value.require_finite()
    if radius <= 0.0:
        raise DegenerateRadiusError("convexity radius is zero")
    return length / radius - operator_norm(a.matrix - b.matrix)


def sample_lipschitz_gaps(space: HolonomicSpace) -> Dict[str, float]:
    """
    Smallest Lipschitz gaps over all pairs of a finite sample.

    Returns {"holonomy": min gap, "convexity": min gap, "pairs": count}.
    """
    if not isinstance(space.group, NormedGroupSample):
        raise InvalidInputError("pairwise gaps need a finite sample")
    sample = space.group
    rho = _usable_radius(space.origin_radius, "holonomy radius at the origin")
    cvx = space.convexity_radius.value.require_finite()
    matrices, lengths = sample.matrices, sample.lengths
    inverses = np.transpose(matrices, (0, 2, 1))
    worst_hol, worst_cvx, pairs = math.inf, math.inf, 0
    for i in range(len(sample)):
        quotients = np.einsum("ij,mjk->mik", inverses[i], matrices)
        matches = sample.lookup_many(quotients)
        if np.any(matches < 0):
            raise ElementNotInSampleError(f"a^-1 b not in sample for a = entry {i}")
        differences = np.linalg.norm(matrices[i] - matrices, ord=2, axis=(1, 2))
        quotient_lengths = lengths[matches]
        worst_hol = min(worst_hol, float(np.min(quotient_lengths / rho - np.sqrt(2.0 * differences))))
        worst_cvx = min(worst_cvx, float(np.min(quotient_lengths / cvx - differences)))
        pairs += len(sample)
    return {"holonomy": worst_hol, "convexity": worst_cvx, "pairs": pairs}


def check_convexity_condition(space: HolonomicSpace, u: Any) -> float:
    """
    max over sampled a of |u - a u| - L(a).

    Nonpositive (up to rounding) whenever |u| < CvxRad.
    """
    u = _check_vector(space, u, "u")
    _, matrices, lengths = space.candidates()
    if len(matrices) == 0:
        return 0.0
    moved = matrices @ u
    return float(np.max(np.linalg.norm(u - moved, axis=1) - lengths))


# ---------------------------------------------------------------------------
# Builders


def _counterexample_elements(ts: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    out = np.zeros((ts.size, 4, 4))
    for offset, rate in ((0, 1.0), (2, math.sqrt(2.0))):
        c, s = np.cos(rate * ts), np.sin(rate * ts)
        out[:, offset, offset] = c
        out[:, offset, offset + 1] = -s
        out[:, offset + 1, offset] = s
        out[:, offset + 1, offset + 1] = c
    return out


@register_space_builder("counterexample")
def counterexample_space(t_min: float, t_max: float) -> HolonomicSpace:
    """
    R acting on C^2 = R^4 by t.(z, w) = (e^{it} z, e^{i sqrt2 t} w), L(t) = |t|.

    Its convexity radius is 1/sqrt(2) while the holonomy radius at the
    origin is 0, approached as t -> 0.
    """
    t_min, t_max = float(t_min), float(t_max)
    if not (math.isfinite(t_min) and math.isfinite(t_max)) or not 0.0 < t_min < t_max:
        raise InvalidInputError(f"need 0 < t_min < t_max, got t_min={t_min}, t_max={t_max}")
    family = OneParamFamily(
        dimension=4,
        t_low=-t_max,
        t_high=t_max,
        elements=_counterexample_elements,
        lengths=np.abs,
        min_magnitude=t_min,
        name="counterexample",
        params={"t_min": t_min, "t_max": t_max},
    )
    return HolonomicSpace(4, family, builder={"family": "counterexample", "t_min": t_min, "t_max": t_max})
