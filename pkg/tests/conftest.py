import os

import hypothesis
import numpy as np
import pytest

from holonomic.core import counterexample_space
from holonomic.surfaces import build_fiber_holonomic_space
from holonomic.utils.logging import setup_logging

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    setup_logging(level="WARNING", use_colors=False)


@pytest.fixture(scope="session")
def fiber_space():
    """Fiber space of the unit sphere sampled at 513 rotations."""
    return build_fiber_holonomic_space(1.0, 512)


@pytest.fixture(scope="session")
def small_fiber_space():
    return build_fiber_holonomic_space(1.0, 33)


@pytest.fixture(scope="session")
def counterexample():
    return counterexample_space(1e-6, 100.0)
