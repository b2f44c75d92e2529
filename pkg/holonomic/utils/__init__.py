"""Utilities package for holonomic."""

from .artifacts import artifact_metadata, render_csv, render_json, write_artifact
from .logging import setup_logging, get_logger, log_function_call

__all__ = [
    "setup_logging",
    "get_logger",
    "log_function_call",
    "artifact_metadata",
    "render_csv",
    "render_json",
    "write_artifact",
]
