"""
Base experiment class for the holonomic command line.
Provides the common interface, parameter validation and error handling for
every runnable experiment.
"""

import asyncio
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

from pydantic import ValidationError

from ..config import get_config
from ..errors import HolonomicError
from ..utils.logging import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3

T = TypeVar("T")


@dataclass
class ExperimentParameter:
    """A command-line parameter of an experiment."""

    name: str
    type: str  # float, integer, string, floats
    description: str
    required: bool = False
    default: Any = None
    enum: Optional[List[str]] = None
    minimum: Optional[float] = None
    count: Optional[int] = None  # fixed length for "floats"

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


@dataclass
class ExperimentResult:
    """Outcome of one experiment run."""

    success: bool
    summary: str = ""
    data: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    sort_by: Optional[List[str]] = None
    error_message: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    @classmethod
    def violation(cls, summary: str, data: Dict[str, Any], **kwargs: Any) -> "ExperimentResult":
        return cls(success=False, summary=summary, data=data, exit_code=EXIT_VIOLATION, **kwargs)

    @classmethod
    def invalid(cls, message: str) -> "ExperimentResult":
        return cls(success=False, summary=f"invalid input: {message}", error_message=message, exit_code=EXIT_INVALID)

    @classmethod
    def internal(cls, error: Exception) -> "ExperimentResult":
        message = f"{type(error).__name__}: {error}"
        return cls(success=False, summary=f"internal error: {message}", error_message=message, exit_code=EXIT_INTERNAL)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": self.success,
            "summary": self.summary,
            "data": self.data,
            "error_message": self.error_message,
            "metadata": self.metadata,
            "exit_code": self.exit_code,
        }


async def gather_limited(jobs: Sequence[Callable[[], T]], limit: Optional[int] = None) -> List[T]:
    """Run blocking jobs in worker threads, at most `limit` (HOLONOMIC_THREADS) at a time."""
    semaphore = asyncio.Semaphore(limit or get_config().runtime.threads)

    async def run_one(job: Callable[[], T]) -> T:
        async with semaphore:
            return await asyncio.to_thread(job)

    return list(await asyncio.gather(*(run_one(job) for job in jobs)))


class Experiment(ABC):
    """Abstract base class for all experiments."""

    name: str = ""
    default_format: str = "csv"

    def __init__(self):
        if not self.name:
            self.name = self.__class__.__name__.lower().replace("experiment", "")
        self.logger = get_logger(f"experiments.{self.name}")

    @property
    @abstractmethod
    def description(self) -> str:
        """Get experiment description."""

    @property
    @abstractmethod
    def parameters(self) -> List[ExperimentParameter]:
        """Get experiment parameters."""

    @abstractmethod
    async def execute(self, **kwargs) -> ExperimentResult:
        """Execute the experiment with validated parameters."""

    def validate_parameters(self, **kwargs) -> Dict[str, Any]:
        """Validate input parameters and fill in defaults."""
        known = {p.name for p in self.parameters}
        unknown = sorted(set(kwargs) - known)
        if unknown:
            raise ValueError(f"Unknown parameter(s) for '{self.name}': {unknown}")

        validated = {}
        for param in self.parameters:
            value = kwargs.get(param.name)
            if param.required and value is None:
                raise ValueError(f"Required parameter '{param.name}' is missing")
            if value is None:
                value = param.default
            validated[param.name] = None if value is None else self._validate_parameter_type(param, value)
        return validated

    def _validate_parameter_type(self, param: ExperimentParameter, value: Any) -> Any:
        try:
            if param.type == "float":
                value = float(value)
            elif param.type == "integer":
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                value = int(value)
            elif param.type == "string":
                value = str(value)
            elif param.type == "floats":
                if isinstance(value, str):
                    value = [v for v in value.replace(",", " ").split() if v]
                value = [float(v) for v in value]
                if param.count is not None and len(value) != param.count:
                    raise ValueError(f"Parameter '{param.name}' needs {param.count} values, got {len(value)}")
        except (TypeError, ValueError) as e:
            detail = str(e) or f"Parameter '{param.name}' must be of type {param.type}"
            raise ValueError(detail) from e

        if param.minimum is not None:
            values = value if isinstance(value, list) else [value]
            if any(v < param.minimum for v in values):
                raise ValueError(f"Parameter '{param.name}' must be at least {param.minimum}")
        if param.enum and value not in param.enum:
            raise ValueError(f"Parameter '{param.name}' must be one of: {param.enum}")
        return value

    async def run(self, **kwargs) -> ExperimentResult:
        """
        Run the experiment with logging and error handling.

        Invalid input (library input errors, bad parameters) maps to exit
        code 2. Any other exception is an internal error (exit code 3), never
        reported as an invariant violation.
        """
        start_time = time.perf_counter()
        self.logger.info(f"Starting experiment: {self.name}", parameters=kwargs)

        try:
            validated_params = self.validate_parameters(**kwargs)
            result = await self.execute(**validated_params)
            result.metadata["parameters"] = validated_params
        except (HolonomicError, ValidationError, ValueError) as e:
            result = ExperimentResult.invalid(str(e))
            self.logger.error(f"Experiment rejected its input: {self.name}", error=str(e))
        except Exception as e:
            result = ExperimentResult.internal(e)
            self.logger.error(f"Experiment crashed: {self.name}", error=str(e), exc_info=True)

        duration = time.perf_counter() - start_time
        result.metadata.setdefault("duration_seconds", duration)
        self.logger.info(
            f"Experiment completed: {self.name}",
            success=result.success,
            exit_code=result.exit_code,
            duration_seconds=duration,
        )
        return result

    def get_info(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": [p.__dict__ for p in self.parameters],
        }


class ExperimentRegistry:
    """Registry for the experiments exposed as CLI commands."""

    def __init__(self):
        self.experiments: Dict[str, Experiment] = {}
        self.logger = get_logger("experiments.registry")

    def register(self, experiment: Experiment) -> None:
        if experiment.name in self.experiments:
            self.logger.warning(f"Experiment '{experiment.name}' is already registered, overriding")
        self.experiments[experiment.name] = experiment
        self.logger.debug(f"Registered experiment: {experiment.name}")

    def get_experiment(self, name: str) -> Optional[Experiment]:
        return self.experiments.get(name)

    def list_experiments(self) -> List[str]:
        return list(self.experiments.keys())

    async def execute_experiment(self, name: str, **kwargs) -> ExperimentResult:
        experiment = self.get_experiment(name)
        if not experiment:
            error_msg = f"Experiment '{name}' not found"
            self.logger.error(error_msg, available=self.list_experiments())
            return ExperimentResult.invalid(error_msg)
        return await experiment.run(**kwargs)


# Global experiment registry
experiment_registry = ExperimentRegistry()


def register_experiment(cls):
    """Class decorator registering an instance with the global registry."""
    experiment_registry.register(cls())
    return cls


def get_experiment_registry() -> ExperimentRegistry:
    return experiment_registry
