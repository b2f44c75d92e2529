"""Experiments package: one registered experiment per CLI command."""

from .base import (
    EXIT_INTERNAL,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_VIOLATION,
    Experiment,
    ExperimentParameter,
    ExperimentResult,
    experiment_registry,
    gather_limited,
    get_experiment_registry,
    register_experiment,
)
from .counterexample import CounterexampleSweepExperiment
from .spaceform import FiberDistanceExperiment, HolRadExperiment, SpaceFormTableExperiment
from .suite import CHECK_NAMES, PropertySuiteExperiment
from .transport import TransportCheckExperiment

__all__ = [
    "EXIT_INTERNAL",
    "EXIT_INVALID",
    "EXIT_OK",
    "EXIT_VIOLATION",
    "Experiment",
    "ExperimentParameter",
    "ExperimentResult",
    "experiment_registry",
    "gather_limited",
    "get_experiment_registry",
    "register_experiment",
    "CounterexampleSweepExperiment",
    "FiberDistanceExperiment",
    "HolRadExperiment",
    "SpaceFormTableExperiment",
    "CHECK_NAMES",
    "PropertySuiteExperiment",
    "TransportCheckExperiment",
]
