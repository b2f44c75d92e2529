"""
Group elements, group-norm samples and their validation.

Group elements are orthogonal matrices; a NormedGroupSample is a finite list
of elements each paired with its group-norm value L, a discrete stand-in for
(H, L). Elements are matched by max-entry distance within tol_id.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag
from scipy.spatial import cKDTree

from ..config import get_config
from ..errors import ElementNotInSampleError, InvalidFunctionError, InvalidInputError
from ..utils.logging import get_logger

logger = get_logger(__name__)


def _as_finite_matrix(matrix: Any) -> np.ndarray:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2:
        raise InvalidInputError(f"matrix expected, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    return m


def operator_norm(matrix: Any) -> float:
    """
    Spectral norm (largest singular value) of a real matrix.

    2x2 matrices split into a similarity part and a reflection part,
    sigma_max = (|(a+d, c-b)| + |(a-d, b+c)|) / 2, which has no cancellation
    when the singular values coincide (rotations and their differences).
    Larger matrices go through LAPACK.
    """
    m = _as_finite_matrix(matrix)
    if m.shape == (1, 1):
        return abs(float(m[0, 0]))
    if m.shape == (2, 2):
        (a, b), (c, d) = m
        return 0.5 * (math.hypot(a + d, c - b) + math.hypot(a - d, b + c))
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A norm-preserving linear isometry, stored as an orthogonal matrix."""

    matrix: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        m = _as_finite_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"square matrix expected, got shape {m.shape}")
        tol = get_config().numerics.tol_ortho
        deviation = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
        if deviation > tol:
            raise InvalidInputError(
                f"matrix is not orthogonal: |M^T M - I|_max = {deviation:.3e} > {tol:.1e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dimension: int) -> "GroupElement":
        return cls(np.eye(dimension), label="id")

    @classmethod
    def rotation(cls, theta: float, label: Optional[str] = None) -> "GroupElement":
        c, s = math.cos(theta), math.sin(theta)
        return cls(np.array([[c, -s], [s, c]]), label=label)

    @classmethod
    def block_diagonal(cls, *blocks: "GroupElement", label: Optional[str] = None) -> "GroupElement":
        return cls(block_diag(*(b.matrix for b in blocks)), label=label)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def inverse(self) -> "GroupElement":
        label = f"{self.label}^-1" if self.label else None
        return GroupElement(self.matrix.T.copy(), label=label)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Return self * other (apply other first)."""
        return GroupElement(self.matrix @ other.matrix)

    def apply(self, v: Any) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)

    def distance(self, other: "GroupElement") -> float:
        """Max-entry distance between the matrices."""
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def is_identity(self, tol: Optional[float] = None) -> bool:
        tol = get_config().numerics.tol_id if tol is None else tol
        return float(np.max(np.abs(self.matrix - np.eye(self.dimension)))) <= tol

    def displacement_norm(self) -> float:
        """Operator norm of id - a."""
        return operator_norm(np.eye(self.dimension) - self.matrix)


@dataclass(frozen=True)
class SampleEntry:
    element: GroupElement
    length: float  # the group-norm value L(element)


@dataclass(frozen=True)
class NormedGroupSample:
    """A finite set of group elements with their group-norm values."""

    dimension: int
    entries: Tuple[SampleEntry, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError("dimension must be positive")
        object.__setattr__(self, "entries", tuple(self.entries))
        for entry in self.entries:
            if entry.element.dimension != self.dimension:
                raise InvalidInputError(
                    f"element of dimension {entry.element.dimension} in a sample of dimension {self.dimension}"
                )

    @classmethod
    def from_pairs(
        cls, dimension: int, pairs: Sequence[Tuple[GroupElement, float]]
    ) -> "NormedGroupSample":
        return cls(dimension, tuple(SampleEntry(a, float(length)) for a, length in pairs))

    @classmethod
    def trivial(cls, dimension: int) -> "NormedGroupSample":
        return cls.from_pairs(dimension, [(GroupElement.identity(dimension), 0.0)])

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def matrices(self) -> np.ndarray:
        """Stacked element matrices, shape (m, n, n)."""
        if not self.entries:
            return np.zeros((0, self.dimension, self.dimension))
        return np.stack([e.element.matrix for e in self.entries])

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.entries], dtype=float)

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.matrices.reshape(len(self.entries), -1))

    @property
    def contains_identity(self) -> bool:
        return self.lookup(GroupElement.identity(self.dimension)) is not None

    @property
    def is_trivial(self) -> bool:
        """True when every element is the identity."""
        return all(e.element.is_identity() for e in self.entries)

    def lookup_many(self, matrices: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
        """
        Index of a matching entry for each matrix in a (k, n, n) stack, or -1.

        The match is the nearest entry in max-entry distance, accepted when
        within tol (default tol_id).
        """
        tol = get_config().numerics.tol_id if tol is None else tol
        if not self.entries:
            return np.full(len(matrices), -1, dtype=int)
        flat = np.asarray(matrices, dtype=float).reshape(len(matrices), -1)
        distances, indices = self._tree.query(flat, k=1, p=np.inf)
        return np.where(distances <= tol, indices, -1).astype(int)

    def lookup(self, element: Union[GroupElement, np.ndarray], tol: Optional[float] = None) -> Optional[int]:
        matrix = element.matrix if isinstance(element, GroupElement) else np.asarray(element)
        index = int(self.lookup_many(matrix[np.newaxis], tol)[0])
        return None if index < 0 else index

    def length_of(self, element: GroupElement) -> float:
        index = self.lookup(element)
        if index is None:
            raise ElementNotInSampleError(
                f"element {element.label or ''} not found in sample within tol_id"
            )
        return self.entries[index].length

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "entries": [
                {
                    "matrix": e.element.matrix.tolist(),
                    "L": e.length,
                    "label": e.element.label or "",
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NormedGroupSample":
        try:
            dimension = int(data["dimension"])
            pairs = [
                (GroupElement(np.array(e["matrix"], dtype=float), label=e.get("label") or None), e["L"])
                for e in data["entries"]
            ]
        except (KeyError, TypeError) as e:
            raise InvalidInputError(f"malformed group sample: {e}") from e
        return cls.from_pairs(dimension, pairs)

    @classmethod
    def from_json(cls, text: str) -> "NormedGroupSample":
        return cls.from_dict(json.loads(text))


@dataclass
class GroupNormViolation:
    kind: str  # positivity | non_degeneracy | symmetry | well_defined | subadditivity
    detail: str
    indices: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "detail": self.detail, "indices": list(self.indices)}


@dataclass
class ValidationReport:
    """Findings of validate_group_norm; an empty violation list means valid."""

    entries: int
    checked_pairs: int = 0
    unchecked_pairs: int = 0
    skipped_pairs: int = 0
    violations: List[GroupNormViolation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return sorted({v.kind for v in self.violations})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "entries": self.entries,
            "checked_pairs": self.checked_pairs,
            "unchecked_pairs": self.unchecked_pairs,
            "skipped_pairs": self.skipped_pairs,
            "violations": [v.to_dict() for v in self.violations],
        }


def validate_group_norm(
    sample: NormedGroupSample, tol: float = 1e-9, max_entries: Optional[int] = None
) -> ValidationReport:
    """
    Check the group-norm axioms on a finite sample.

    Subadditivity is only checked on pairs (a, b) whose product ab is itself
    in the sample; other pairs are counted as unchecked, never as violations.
    Samples larger than max_entries (default: validation_max_entries) check
    subadditivity for an evenly spaced subset of max_entries left factors
    against every right factor; the remaining pairs count as skipped.
    """
    if max_entries is None:
        max_entries = get_config().numerics.validation_max_entries
    if max_entries < 1:
        raise InvalidInputError(f"max_entries must be positive, got {max_entries}")
    report = ValidationReport(entries=len(sample))
    if not sample.entries:
        report.violations.append(GroupNormViolation("non_degeneracy", "empty sample"))
        return report

    lengths = sample.lengths
    identity_flags = [e.element.is_identity() for e in sample.entries]

    # Positivity
    for i, length in enumerate(lengths):
        if not math.isfinite(length) or length < 0:
            report.violations.append(
                GroupNormViolation("positivity", f"L = {length} is not a nonnegative real", (i,))
            )

    # Non-degeneracy: exactly one zero, at the identity
    zeros = [i for i, length in enumerate(lengths) if abs(length) <= tol]
    for i in zeros:
        if not identity_flags[i]:
            report.violations.append(
                GroupNormViolation("non_degeneracy", "L = 0 on a non-identity element", (i,))
            )
    identity_indices = [i for i, flag in enumerate(identity_flags) if flag]
    if not identity_indices:
        report.violations.append(GroupNormViolation("non_degeneracy", "sample has no identity element"))
    for i in identity_indices:
        if abs(lengths[i]) > tol:
            report.violations.append(
                GroupNormViolation("non_degeneracy", f"L(id) = {lengths[i]} != 0", (i,))
            )
    if len(zeros) > 1:
        report.violations.append(
            GroupNormViolation("non_degeneracy", f"{len(zeros)} entries have L = 0", tuple(zeros))
        )

    # L must be a function of the element, not of the entry
    for i, j in sorted(sample._tree.query_pairs(get_config().numerics.tol_id, p=np.inf)):
        if abs(lengths[i] - lengths[j]) > tol:
            report.violations.append(
                GroupNormViolation(
                    "well_defined", f"equal elements carry L = {lengths[i]} and {lengths[j]}", (i, j)
                )
            )

    # Symmetry: a^-1 present with the same L
    inverses = sample.lookup_many(np.transpose(sample.matrices, (0, 2, 1)))
    for i, j in enumerate(inverses):
        if j < 0:
            report.violations.append(GroupNormViolation("symmetry", "inverse missing from sample", (i,)))
        elif abs(lengths[i] - lengths[j]) > tol:
            report.violations.append(
                GroupNormViolation(
                    "symmetry", f"L(a) = {lengths[i]} but L(a^-1) = {lengths[j]}", (i, int(j))
                )
            )

    # Subadditivity on closed pairs, one row of products at a time
    matrices = sample.matrices
    rows = np.arange(len(sample))
    if len(sample) > max_entries:
        rows = np.unique(np.linspace(0, len(sample) - 1, max_entries).round().astype(int))
        report.skipped_pairs = (len(sample) - len(rows)) * len(sample)
        logger.warning(
            "subadditivity checked on a subset of left factors",
            entries=len(sample),
            left_factors=len(rows),
            skipped_pairs=report.skipped_pairs,
        )
    for i in map(int, rows):
        products = np.einsum("ij,mjk->mik", matrices[i], matrices)
        matches = sample.lookup_many(products)
        closed = matches >= 0
        report.checked_pairs += int(closed.sum())
        report.unchecked_pairs += int((~closed).sum())
        excess = lengths[matches[closed]] - (lengths[i] + lengths[closed])
        for j_local in np.flatnonzero(excess > tol):
            j = int(np.flatnonzero(closed)[j_local])
            report.violations.append(
                GroupNormViolation(
                    "subadditivity",
                    f"L(ab) = {lengths[matches[j]]} > L(a) + L(b) = {lengths[i] + lengths[j]}",
                    (i, j),
                )
            )

    logger.debug(
        "validated group sample",
        entries=len(sample),
        checked_pairs=report.checked_pairs,
        unchecked_pairs=report.unchecked_pairs,
        violations=len(report.violations),
    )
    return report


def left_invariant_distance(sample: NormedGroupSample, a: GroupElement, b: GroupElement) -> float:
    """d(a, b) = L(a^-1 b)."""
    return sample.length_of(a.inverse().compose(b))


def compose_norm_with_subadditive(
    sample: NormedGroupSample, f: Callable[[float], float]
) -> NormedGroupSample:
    """
    Return the sample with every L replaced by f(L).

    f must vanish at 0 and be nondecreasing; both are spot-checked on the
    sample's own L-values.
    """
    f0 = f(0.0)
    if abs(f0) > 1e-15:
        raise InvalidFunctionError(f"f(0) = {f0}, expected 0")

    values = np.sort(np.unique(sample.lengths))
    mapped = np.array([f(float(x)) for x in values])
    if np.any(np.diff(mapped) < -1e-12):
        raise InvalidFunctionError("f is not nondecreasing on the sample's L-values")
    if np.any(mapped < 0) or not np.all(np.isfinite(mapped)):
        raise InvalidFunctionError("f must map L-values to nonnegative reals")

    return NormedGroupSample.from_pairs(
        sample.dimension, [(e.element, f(e.length)) for e in sample.entries]
    )
