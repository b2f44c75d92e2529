"""
holonomic - holonomy radii, holonomic metrics and parallel transport on surfaces.
"""

from .version import __version__

__author__ = "holonomic developers"
__description__ = "Numerical toolkit for holonomic spaces, space-form length norms and surface transport"

from .config import get_config
from .core import HolonomicSpace, NormedGroupSample
from .surfaces import build_fiber_holonomic_space

__all__ = ["__version__", "get_config", "HolonomicSpace", "NormedGroupSample", "build_fiber_holonomic_space"]
