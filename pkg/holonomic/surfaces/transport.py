"""
Parallel transport along closed loops on surfaces.

A parallel field P = a*T + b*J(T) along a unit-speed loop with signed
geodesic curvature k satisfies a' = k b, b' = -k a, so the frame map after
one turn is a rotation by -int k. The holonomy angle is 2*pi - int k,
reduced to (-pi, pi]. Three independent routes are provided: the frame ODE
(RK4), the quadrature of k, and an extrinsic integration on the unit sphere.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from ..errors import DegenerateLoopError, FlatExcludedError, InvalidInputError, OutOfChartError
from ..utils.logging import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi
MIN_STEPS = 16

Curvature = Callable[[np.ndarray], np.ndarray]


def reduce_angle(x: float) -> float:
    """Reduce an angle to (-pi, pi]; -pi maps to +pi."""
    y = math.remainder(x, TWO_PI)
    return math.pi if y <= -math.pi else y


def angle_gap(x: float, y: float) -> float:
    """Distance between two angles on the circle."""
    return abs(math.remainder(x - y, TWO_PI))


@dataclass(frozen=True, eq=False)
class LoopSpec:
    """A closed unit-speed loop described by its length and geodesic curvature k(t)."""

    length: float
    curvature: Curvature  # vectorized: array of arc lengths -> array of curvatures
    closed: bool = True
    label: str = ""

    def __post_init__(self):
        if not math.isfinite(self.length) or self.length <= 0:
            raise InvalidInputError(f"loop length must be positive, got {self.length}")
        if not self.closed:
            raise InvalidInputError("only closed loops are supported")

    @classmethod
    def constant(cls, length: float, k: float, label: str = "") -> "LoopSpec":
        return cls(length, lambda ts: np.full(np.shape(ts), float(k)), label=label)

    def sample(self, ts: np.ndarray) -> np.ndarray:
        ks = np.asarray(self.curvature(np.asarray(ts, dtype=float)), dtype=float)
        ks = np.broadcast_to(ks, np.shape(ts))
        if not np.all(np.isfinite(ks)):
            raise InvalidInputError(f"curvature of loop '{self.label}' has non-finite samples")
        return ks


def reverse_loop(loop: LoopSpec) -> LoopSpec:
    """The same loop traversed backwards: k(t) -> -k(length - t)."""
    length, curvature = loop.length, loop.curvature
    return LoopSpec(
        length,
        lambda ts: -np.asarray(curvature(length - np.asarray(ts, dtype=float)), dtype=float),
        label=f"{loop.label} reversed" if loop.label else "reversed",
    )


@dataclass(frozen=True)
class FrameState:
    """Coefficients of a parallel field in the frame {T, J(T)}."""

    a: float
    b: float

    @property
    def angle(self) -> float:
        return reduce_angle(math.atan2(self.b, self.a))

    @property
    def length_drift(self) -> float:
        return abs(self.a * self.a + self.b * self.b - 1.0)


@dataclass(frozen=True)
class TransportResult:
    angle: float  # rotation of the frame map from the ODE, in (-pi, pi]
    quadrature: float  # -int_0^length k, unreduced
    frame: FrameState
    steps: int

    @property
    def discrepancy(self) -> float:
        return angle_gap(self.angle, self.quadrature)


def _check_steps(steps: int) -> None:
    if steps < MIN_STEPS:
        raise InvalidInputError(f"steps must be at least {MIN_STEPS}, got {steps}")


def transport_rotation(loop: LoopSpec, steps: int = 1024) -> TransportResult:
    """
    Integrate a' = k b, b' = -k a from (1, 0) with classical RK4.

    Returns the rotation angle of the frame map and the Simpson value of
    -int k on the same nodes for cross-checking.
    """
    _check_steps(steps)
    h = loop.length / steps
    nodes = np.linspace(0.0, loop.length, 2 * steps + 1)
    ks = loop.sample(nodes)

    a, b = 1.0, 0.0
    for i in range(steps):
        k0, k_half, k1 = ks[2 * i], ks[2 * i + 1], ks[2 * i + 2]
        a1, b1 = k0 * b, -k0 * a
        a2, b2 = k_half * (b + 0.5 * h * b1), -k_half * (a + 0.5 * h * a1)
        a3, b3 = k_half * (b + 0.5 * h * b2), -k_half * (a + 0.5 * h * a2)
        a4, b4 = k1 * (b + h * b3), -k1 * (a + h * a3)
        a += h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        b += h * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0

    frame = FrameState(a, b)
    quadrature = -float(simpson(ks, x=nodes))
    result = TransportResult(angle=frame.angle, quadrature=quadrature, frame=frame, steps=steps)
    logger.debug(
        "transported frame",
        loop=loop.label,
        steps=steps,
        angle=result.angle,
        discrepancy=result.discrepancy,
        drift=frame.length_drift,
    )
    return result


def total_curvature(loop: LoopSpec, steps: int = 1024) -> float:
    """int_0^length k by composite Simpson on 2*steps intervals."""
    _check_steps(steps)
    nodes = np.linspace(0.0, loop.length, 2 * steps + 1)
    return float(simpson(loop.sample(nodes), x=nodes))


def holonomy_angle(loop: LoopSpec, steps: int = 1024) -> float:
    """2*pi - int k, reduced to (-pi, pi]."""
    return reduce_angle(TWO_PI - total_curvature(loop, steps))


@dataclass(frozen=True)
class GeodesicCircle:
    """A metric circle of geodesic radius r in the space form of curvature K."""

    K: float
    r: float

    def __post_init__(self):
        if not math.isfinite(self.K) or self.K == 0:
            raise FlatExcludedError("geodesic circles are only built for K != 0")
        if not math.isfinite(self.r) or self.r <= 0:
            raise InvalidInputError(f"radius must be positive, got {self.r}")
        if self.K > 0 and math.sqrt(self.K) * self.r >= math.pi:
            raise OutOfChartError(
                f"sqrt(K) r = {math.sqrt(self.K) * self.r:.6g} reaches the antipode (>= pi)"
            )

    @property
    def _scaled(self) -> float:
        return math.sqrt(abs(self.K)) * self.r

    @property
    def circumference(self) -> float:
        s = math.sqrt(abs(self.K))
        if self.K > 0:
            return TWO_PI * math.sin(self._scaled) / s
        return TWO_PI * math.sinh(self._scaled) / s

    @property
    def curvature(self) -> float:
        """Geodesic curvature of the circle, constant along it."""
        s = math.sqrt(abs(self.K))
        if self.K > 0:
            return s / math.tan(self._scaled)
        return s / math.tanh(self._scaled)

    @property
    def area(self) -> float:
        if self.K > 0:
            # 1 - cos x = 2 sin^2(x/2) keeps small radii accurate
            return TWO_PI * 2.0 * math.sin(0.5 * self._scaled) ** 2 / self.K
        return TWO_PI * 2.0 * math.sinh(0.5 * self._scaled) ** 2 / abs(self.K)

    @property
    def enclosed_curvature(self) -> float:
        """K * A, the Gauss-Bonnet holonomy angle before reduction."""
        return self.K * self.area


def geodesic_circle_loop(circle: GeodesicCircle) -> LoopSpec:
    """The circle as a loop: constant geodesic curvature over its circumference."""
    return LoopSpec.constant(
        circle.circumference, circle.curvature, label=f"circle K={circle.K:g} r={circle.r:.6g}"
    )


def gauss_bonnet_residual(circle: GeodesicCircle) -> float:
    """(2*pi - int k) - K*A from the closed forms; zero analytically."""
    return (TWO_PI - circle.circumference * circle.curvature) - circle.enclosed_curvature


def sphere_extrinsic_transport(alpha: float, steps: int = 4096) -> float:
    """
    Holonomy angle of the latitude circle at polar angle alpha on the unit sphere.

    Integrates P' = -<P, g'> g in R^3 along g(s) = (sin a cos phi, sin a sin phi,
    cos a), phi = s / sin a, with RK4, projecting P back to the tangent plane
    after each step. The final P is read in the frame {g', g x g'} at g(0).
    """
    _check_steps(steps)
    if not 0.0 < alpha < math.pi or math.sin(alpha) < 1e-12:
        raise DegenerateLoopError(f"latitude at polar angle {alpha} collapses to a pole")

    sa, ca = math.sin(alpha), math.cos(alpha)
    length = TWO_PI * sa

    def position(s: float) -> np.ndarray:
        phi = s / sa
        return np.array([sa * math.cos(phi), sa * math.sin(phi), ca])

    def velocity(s: float) -> np.ndarray:
        phi = s / sa
        return np.array([-math.sin(phi), math.cos(phi), 0.0])

    def rhs(s: float, p: np.ndarray) -> np.ndarray:
        return -float(np.dot(p, velocity(s))) * position(s)

    h = length / steps
    p = velocity(0.0)
    for i in range(steps):
        s = i * h
        k1 = rhs(s, p)
        k2 = rhs(s + 0.5 * h, p + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h, p + 0.5 * h * k2)
        k4 = rhs(s + h, p + h * k3)
        p = p + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        g = position(s + h)
        p = p - float(np.dot(p, g)) * g

    g0, t0 = position(0.0), velocity(0.0)
    normal = np.cross(g0, t0)
    return reduce_angle(math.atan2(float(np.dot(p, normal)), float(np.dot(p, t0))))


def transport_sweep(K: float, radii: Sequence[float], steps: int = 1024) -> List[Dict[str, Optional[float]]]:
    """
    One row per geodesic circle: (K, r, ell, int_k, theta_ode, theta_gb,
    theta_extrinsic, residual). The extrinsic column is only filled for K = 1.
    """
    rows = []
    for r in sorted(radii):
        circle = GeodesicCircle(K, r)
        loop = geodesic_circle_loop(circle)
        transported = transport_rotation(loop, steps)
        rows.append(
            {
                "K": K,
                "r": r,
                "ell": circle.circumference,
                "int_k": -transported.quadrature,
                "theta_ode": transported.angle,
                "theta_gb": reduce_angle(circle.enclosed_curvature),
                "theta_extrinsic": sphere_extrinsic_transport(r, max(steps, 4096)) if K == 1 else None,
                "residual": gauss_bonnet_residual(circle),
            }
        )
    return rows
