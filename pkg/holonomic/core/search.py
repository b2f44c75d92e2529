"""
One-dimensional minimization used by every radius and distance search.

A coarse grid locates the best cell, then golden-section search refines
inside the two neighbouring cells. Objectives are numpy-vectorized: they
take an array of parameters and return an array of values.
"""

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Callable, Optional, Union

import numpy as np

from ..utils.logging import get_logger

logger = get_logger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

Objective = Callable[[np.ndarray], np.ndarray]


@total_ordering
@dataclass(frozen=True)
class ExtendedReal:
    """A nonnegative real or +inf, kept as a tagged value rather than a float sentinel."""

    value: Optional[float] = None

    @classmethod
    def finite(cls, x: float) -> "ExtendedReal":
        if not math.isfinite(x):
            raise ValueError(f"finite value expected, got {x}")
        return cls(float(x))

    @classmethod
    def infinity(cls) -> "ExtendedReal":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def require_finite(self) -> float:
        if self.value is None:
            raise ValueError("value is unbounded")
        return self.value

    def __float__(self) -> float:
        return math.inf if self.value is None else self.value

    def __lt__(self, other: Union["ExtendedReal", float]) -> bool:
        return float(self) < float(other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (ExtendedReal, int, float)):
            return float(self) == float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def to_json(self) -> Union[float, str]:
        return "inf" if self.value is None else self.value

    def __str__(self) -> str:
        return "+inf" if self.value is None else f"{self.value:.12g}"


@dataclass(frozen=True)
class GridMinimum:
    """Result of a grid scan plus golden-section refinement."""

    argmin: float
    value: float
    index: int  # index of the best grid point
    at_edge: bool  # best grid point was the first or last one
    evaluations: int


def golden_section(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> tuple:
    """
    Golden-section search.

    Given a function f with a single local minimum in the interval [a, b],
    returns (x, f(x)) with x located to relative tolerance tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    abs_tol = tol * max(abs(a), abs(b), np.finfo(float).tiny)
    if h <= abs_tol:
        x = 0.5 * (a + b)
        return x, f(x)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(abs_tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    return (c, yc) if yc < yd else (d, yd)


def _scalar(objective: Objective) -> Callable[[float], float]:
    def f(x: float) -> float:
        value = float(np.asarray(objective(np.array([x])))[0])
        return value if math.isfinite(value) else math.inf

    return f


def grid_minimize(
    objective: Objective,
    grid: np.ndarray,
    tol: float = 1e-10,
    tie_key: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    refine: bool = True,
) -> GridMinimum:
    """
    Minimize a vectorized objective over a sorted grid, then refine.

    Ties on the grid resolve towards the smallest tie_key(t) (default: the
    smallest parameter). The refinement never returns a worse point than the
    best grid point.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")

    values = np.asarray(objective(grid), dtype=float)
    values = np.where(np.isfinite(values), values, np.inf)
    best = values.min()
    candidates = np.flatnonzero(values == best)
    if tie_key is not None and candidates.size > 1:
        keys = np.asarray(tie_key(grid[candidates]))
        i = int(candidates[np.lexsort((grid[candidates], keys))[0]])
    else:
        i = int(candidates[0])

    argmin, value = float(grid[i]), float(values[i])
    evaluations = grid.size
    if refine and grid.size > 1 and math.isfinite(value):
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, grid.size - 1)]
        x, fx = golden_section(_scalar(objective), float(lo), float(hi), tol)
        evaluations += int(math.ceil(math.log(tol) / math.log(INV_PHI))) + 2
        if fx < value:
            argmin, value = x, fx

    logger.debug("grid minimum", grid_size=grid.size, argmin=argmin, value=value)
    return GridMinimum(
        argmin=argmin,
        value=value,
        index=i,
        at_edge=i in (0, grid.size - 1),
        evaluations=evaluations,
    )
