"""
Command-line front end.

Every registered experiment becomes a subcommand whose flags come from its
parameter list. A run writes one CSV or JSON artifact and prints a single
summary line on standard output; logs go to standard error.

Exit codes: 0 success, 1 invariant violation, 2 invalid input or unwritable
output (argparse also exits with 2 on malformed flags).
"""

import argparse
import asyncio
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import get_config
from .experiments import EXIT_INTERNAL, EXIT_INVALID, Experiment, ExperimentParameter, experiment_registry
from .utils.artifacts import FORMATS, artifact_metadata, write_artifact
from .utils.logging import get_logger, setup_logging
from .version import __version__

logger = get_logger(__name__)

Command = Literal[
    "spaceform-table",
    "holrad",
    "counterexample-sweep",
    "fiber-distance",
    "property-suite",
    "transport-check",
]


class RunConfig(BaseModel):
    """One experiment run: the command, its parameters and where the artifact goes."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    parameters: Dict[str, Any] = Field(default_factory=dict)
    output: Optional[Path] = None
    format: Optional[Literal["csv", "json"]] = None

    def artifact_path(self, default_format: str) -> Path:
        fmt = self.format or default_format
        return self.output or Path("results") / f"{self.command}.{fmt}"


def _add_parameter(parser: argparse.ArgumentParser, param: ExperimentParameter) -> None:
    kwargs: Dict[str, Any] = {"dest": param.name, "help": param.description}
    if param.type == "float":
        kwargs["type"] = float
    elif param.type == "integer":
        kwargs["type"] = int
    elif param.type == "floats":
        kwargs["type"] = float
        kwargs["nargs"] = param.count or "+"
    if param.enum:
        kwargs["choices"] = param.enum
    if param.default is not None:
        kwargs["help"] += f" (default: {param.default})"
    parser.add_argument(param.flag, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", type=Path, help="JSON file with a full run configuration")
    common.add_argument("--output", type=Path, help="Artifact path (default: results/<command>.<format>)")
    common.add_argument("--format", choices=FORMATS, help="Artifact format")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], help="Override LOG_LEVEL"
    )

    parser = argparse.ArgumentParser(
        prog="holonomic",
        description="Holonomy radii, holonomic metrics and surface transport experiments.",
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in experiment_registry.list_experiments():
        experiment = experiment_registry.get_experiment(name)
        sub = subparsers.add_parser(
            name, help=experiment.description, parents=[common], argument_default=argparse.SUPPRESS
        )
        for param in experiment.parameters:
            _add_parameter(sub, param)
    return parser


def config_from_args(args: argparse.Namespace) -> Optional[RunConfig]:
    """Merge --config (if any) with the command-line flags; flags win."""
    data: Dict[str, Any] = {"parameters": {}}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        data = RunConfig.model_validate_json(Path(config_path).read_text(encoding="utf-8")).model_dump(
            exclude_none=True
        )

    command = getattr(args, "command", None)
    if command is not None:
        if data.get("command") not in (None, command):
            data["parameters"] = {}
        data["command"] = command
    if "command" not in data:
        return None

    experiment = experiment_registry.get_experiment(data["command"])
    for param in experiment.parameters:
        if hasattr(args, param.name):
            data["parameters"][param.name] = getattr(args, param.name)
    for key in ("output", "format"):
        if hasattr(args, key):
            data[key] = getattr(args, key)
    return RunConfig.model_validate(data)


async def run_async(config: RunConfig) -> int:
    experiment: Experiment = experiment_registry.get_experiment(config.command)
    start = time.perf_counter()
    result = await experiment.run(**config.parameters)

    path: Optional[Path] = None
    if result.exit_code not in (EXIT_INVALID, EXIT_INTERNAL):
        fmt = config.format or experiment.default_format
        target = config.artifact_path(experiment.default_format)
        metadata = artifact_metadata(config.command, result.metadata.get("parameters", {}))
        try:
            path = await write_artifact(target, fmt, metadata, result.rows, result.data, result.sort_by)
        except OSError as e:
            logger.error("cannot write artifact", path=str(target), error=str(e))
            result.summary = f"cannot write artifact: {e}"
            result.exit_code = EXIT_INVALID

    wall = time.perf_counter() - start
    line = f"{config.command}: {result.summary} [{wall:.2f}s]"
    if path is not None:
        line += f" -> {path}"
    print(line, flush=True)
    return result.exit_code


def run(config: RunConfig) -> int:
    """Execute one configured run and return its exit status."""
    return asyncio.run(run_async(config))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_config()
    setup_logging(
        level=getattr(args, "log_level", None) or settings.logging.level,
        format_type=settings.logging.format,
        file_path=settings.log_file(),
        file_max_size=settings.logging.file_max_size,
        file_backup_count=settings.logging.file_backup_count,
    )

    try:
        config = config_from_args(args)
    except (ValidationError, OSError, ValueError) as e:
        print(f"holonomic: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    if config is None:
        parser.print_usage(sys.stderr)
        print("holonomic: error: a command or --config is required", file=sys.stderr)
        return EXIT_INVALID

    logger.info("Starting holonomic", version=__version__, command=config.command, threads=settings.runtime.threads)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
