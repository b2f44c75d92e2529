"""
Length norms and holonomy radii of the non-flat space forms S^2(K), H^2(K).

The holonomy group at a point is SO(2). A rotation by theta in [-pi, pi] is
realized with least length by a metric circle enclosing area |theta / K|, so
L(theta) = sqrt(4 pi |theta| -+ theta^2) / sqrt|K|, the sign opposite to
the sign of K.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np
from scipy.optimize import brentq

from ..config import get_config
from ..core.groups import GroupElement, NormedGroupSample
from ..core.search import grid_minimize
from ..core.spaces import HolonomicSpace, register_space_builder
from ..errors import FlatExcludedError, InvalidInputError, OutOfDomainError
from ..utils.logging import get_logger
from .transport import TWO_PI, GeodesicCircle

logger = get_logger(__name__)

ANGLE_SLACK = 1e-12  # |theta| may exceed pi by rounding when produced from a grid


@dataclass(frozen=True)
class SpaceForm:
    """The complete simply connected surface of constant curvature K != 0."""

    K: float

    def __post_init__(self):
        _check_curvature(self.K)

    @property
    def is_sphere(self) -> bool:
        return self.K > 0

    def length_norm(self) -> "AngleNorm":
        return AngleNorm(self.K)


@dataclass(frozen=True)
class AngleNorm:
    """L as a function on [-pi, pi] for the space form of curvature K."""

    K: float

    def __call__(self, theta: float) -> float:
        return spaceform_length_norm(self.K, theta)

    def values(self, thetas: np.ndarray) -> np.ndarray:
        return _length_norm_array(self.K, thetas)


def _check_curvature(K: float) -> float:
    K = float(K)
    if not math.isfinite(K):
        raise InvalidInputError(f"curvature must be finite, got {K}")
    if K == 0:
        raise FlatExcludedError("the flat case K = 0 has trivial holonomy and is excluded")
    return K


def _length_norm_array(K: float, thetas: np.ndarray) -> np.ndarray:
    magnitude = np.minimum(np.abs(np.asarray(thetas, dtype=float)), math.pi)
    sign = -1.0 if K > 0 else 1.0
    return np.sqrt(np.maximum(4.0 * math.pi * magnitude + sign * magnitude ** 2, 0.0)) / math.sqrt(abs(K))


def spaceform_length_norm(K: float, theta: float) -> float:
    """sqrt(4 pi |theta| -+ theta^2) / sqrt|K| for theta in [-pi, pi]."""
    K = _check_curvature(K)
    theta = float(theta)
    if not math.isfinite(theta) or abs(theta) > math.pi + ANGLE_SLACK:
        raise OutOfDomainError(f"theta = {theta} is outside [-pi, pi]")
    return float(_length_norm_array(K, np.array([theta]))[0])


def _scaled_area(K: float, r: np.ndarray) -> np.ndarray:
    """|K| * A(r) for circles of geodesic radius r."""
    x = math.sqrt(abs(K)) * np.asarray(r, dtype=float)
    if K > 0:
        return 4.0 * math.pi * np.sin(0.5 * x) ** 2
    return 4.0 * math.pi * np.sinh(0.5 * x) ** 2


def spaceform_length_norm_numeric(K: float, theta: float, grid: int = 256) -> float:
    """
    L(theta) as the shortest metric circle whose holonomy is the rotation by theta.

    A circle enclosing area A has holonomy +-K*A (one value per orientation),
    read modulo 2 pi. For every representative phi = |K| A in
    {|theta|, 2pi - |theta|, 2pi + |theta|, 4pi - |theta|} a radius is
    bracketed on an r-grid and solved with brentq; the shortest circumference
    wins. Independent of the closed form except for the circle formulas.
    """
    K = _check_curvature(K)
    theta = float(theta)
    if not math.isfinite(theta) or abs(theta) > math.pi + ANGLE_SLACK:
        raise OutOfDomainError(f"theta = {theta} is outside [-pi, pi]")
    if grid < 256:
        raise InvalidInputError(f"grid must be at least 256, got {grid}")
    if theta == 0.0:
        return 0.0  # the constant loop

    magnitude = min(abs(theta), math.pi)
    scale = math.sqrt(abs(K))
    r_max = math.pi / scale if K > 0 else 3.0 / scale
    radii = np.linspace(0.0, r_max, grid + 1)[1:]
    if K > 0:
        radii = radii[:-1]  # stay inside the chart
    areas = _scaled_area(K, radii)

    best = math.inf
    for phi in (magnitude, TWO_PI - magnitude, TWO_PI + magnitude, 2 * TWO_PI - magnitude):
        above = np.flatnonzero(areas >= phi)
        if above.size == 0:
            continue
        j = int(above[0])
        lo = 0.0 if j == 0 else float(radii[j - 1])
        hi = float(radii[j])
        r = brentq(lambda x: float(_scaled_area(K, np.array([x]))[0]) - phi, lo, hi, xtol=1e-15)
        if r <= 0.0:
            continue
        best = min(best, GeodesicCircle(K, r).circumference)

    if not math.isfinite(best):
        logger.warning("no circle in the chart attains the rotation", K=K, theta=theta)
    return best


def isoperimetric_residual(K: float, r: float) -> float:
    """ell^2 - (4 pi A - K A^2) for the metric circle of radius r; zero analytically."""
    circle = GeodesicCircle(K, r)
    ell, area = circle.circumference, circle.area
    return ell ** 2 - (4.0 * math.pi * area - K * area ** 2)


@dataclass(frozen=True)
class ManifoldRadius:
    K: float
    value: float
    theta_star: float

    def to_dict(self) -> Dict[str, float]:
        return {"K": self.K, "holrad": self.value, "theta_star": self.theta_star}


def _radius_integrand(K: float, kind: str):
    def integrand(thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        lengths = _length_norm_array(K, thetas)
        displacement = 2.0 * np.abs(np.sin(0.5 * thetas))  # |id - R_theta|
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind == "holonomy":
                return lengths / np.sqrt(2.0 * displacement)
            return lengths / displacement

    return integrand


def manifold_radius_search(K: float, kind: str = "holonomy", grid: int = 100_000) -> ManifoldRadius:
    """
    Minimize the radius ratio over theta in (0, pi] for the space form.

    kind "holonomy" uses L / sqrt(2 |id - R|), kind "convexity" uses
    L / |id - R|, with |id - R_theta| = 2 |sin(theta / 2)|.
    """
    K = _check_curvature(K)
    if kind not in ("holonomy", "convexity"):
        raise InvalidInputError(f"unknown radius kind: {kind}")
    numerics = get_config().numerics
    thetas = np.linspace(numerics.puncture, math.pi, grid)
    found = grid_minimize(_radius_integrand(K, kind), thetas, numerics.golden_tol)
    logger.debug("manifold radius", K=K, kind=kind, value=found.value, theta_star=found.argmin)
    return ManifoldRadius(K=K, value=found.value, theta_star=found.argmin)


def manifold_holonomy_radius(K: float, grid: int = 100_000) -> float:
    """Holonomy radius at any point of the space form of curvature K."""
    return manifold_radius_search(K, "holonomy", grid).value


def manifold_convexity_radius(K: float, grid: int = 100_000) -> float:
    """Convexity radius of the fiber holonomic space of the space form."""
    return manifold_radius_search(K, "convexity", grid).value


def fiber_norm_bound(K: float) -> float:
    """max of L over [-pi, pi], attained at |theta| = pi."""
    return spaceform_length_norm(K, math.pi)


def fiber_angles(n_angles: int) -> np.ndarray:
    """Uniform angles on [-pi, pi] containing 0 and +-pi (odd count)."""
    if n_angles < 3:
        raise InvalidInputError(f"n_angles must be at least 3, got {n_angles}")
    count = n_angles if n_angles % 2 else n_angles + 1
    angles = np.linspace(-math.pi, math.pi, count)
    angles[count // 2] = 0.0
    return angles


@register_space_builder("spaceform-fiber")
def build_fiber_holonomic_space(K: float, n_angles: int = 513) -> HolonomicSpace:
    """
    The holonomic space (T_pM, Hol_p, L_p) of S^2(K), sampled at n_angles rotations.

    Even counts are raised by one so 0 and +-pi are sample points.
    """
    K = _check_curvature(K)
    if K < 0:
        raise InvalidInputError(
            "the fiber sample is only built for K > 0; use the closed forms for K < 0"
        )
    n_angles = int(n_angles)
    angles = fiber_angles(n_angles)
    lengths = _length_norm_array(K, angles)
    cos, sin = np.cos(angles), np.sin(angles)
    # R(-pi) and R(pi) must be the same matrix, not 2e-16 apart
    cos[np.abs(cos) < 1e-15] = 0.0
    sin[np.abs(sin) < 1e-15] = 0.0
    pairs = [
        (GroupElement(np.array([[c, -s], [s, c]]), label=f"R({theta:.6g})"), length)
        for theta, c, s, length in zip(angles, cos, sin, lengths)
    ]
    sample = NormedGroupSample.from_pairs(2, pairs)
    logger.debug("built fiber space", K=K, n_angles=len(angles))
    return HolonomicSpace(2, sample, builder={"family": "spaceform-fiber", "K": K, "n_angles": n_angles})


@dataclass(frozen=True)
class FiberDistance:
    K: float
    u: List[float]
    v: List[float]
    d: float
    theta_star: float

    def to_dict(self) -> Dict[str, Any]:
        return {"K": self.K, "u": self.u, "v": self.v, "d": self.d, "theta_star": self.theta_star}


def fiber_distance_report(K: float, u: Any, v: Any, grid: int = 4096) -> FiberDistance:
    """
    Sasaki fiber distance inf over theta of sqrt(L(theta)^2 + |R_theta u - v|^2).

    Grid plus golden-section over [-pi, pi]; ties go to the smaller |theta|.
    """
    K = _check_curvature(K)
    if K < 0:
        raise InvalidInputError("fiber distances are only computed for K > 0")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (2,) or v.shape != (2,):
        raise InvalidInputError("fiber vectors must have two components")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise InvalidInputError("fiber vectors must be finite")

    def objective(thetas: np.ndarray) -> np.ndarray:
        c, s = np.cos(thetas), np.sin(thetas)
        dx = c * u[0] - s * u[1] - v[0]
        dy = s * u[0] + c * u[1] - v[1]
        return np.sqrt(_length_norm_array(K, thetas) ** 2 + dx * dx + dy * dy)

    thetas = np.unique(np.concatenate([np.linspace(-math.pi, math.pi, grid), [0.0]]))
    found = grid_minimize(objective, thetas, get_config().numerics.golden_tol, tie_key=np.abs)
    return FiberDistance(K=K, u=u.tolist(), v=v.tolist(), d=found.value, theta_star=found.argmin)


def fiber_distance(K: float, u: Any, v: Any, grid: int = 4096) -> float:
    """Distance between u and v in the fiber over p, inside the Sasaki-type total space."""
    return fiber_distance_report(K, u, v, grid).d
