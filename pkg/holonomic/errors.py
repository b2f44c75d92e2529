"""Exception hierarchy for holonomic."""


class HolonomicError(ValueError):
    """Base class for all library errors."""


class InvalidInputError(HolonomicError):
    """Non-finite entries, dimension mismatches or invalid ranges."""


class ElementNotInSampleError(HolonomicError):
    """A group element could not be matched within tol_id."""


class InvalidFunctionError(HolonomicError):
    """A function composed with a group-norm does not vanish at 0 or decreases."""


class OutOfDomainError(HolonomicError):
    """An angle outside [-pi, pi] was passed to a space-form length norm."""


class FlatExcludedError(HolonomicError):
    """Zero curvature where only non-flat space forms are covered."""


class OutOfChartError(HolonomicError):
    """A geodesic circle reaches the cut locus (sqrt(K) r >= pi)."""


class DegenerateLoopError(HolonomicError):
    """A loop collapses to a point (latitude at a pole)."""


class DegenerateRadiusError(HolonomicError):
    """A holonomy radius is zero or only approached as a limit, so 1/radius is not usable."""
