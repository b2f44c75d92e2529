"""
Structured logging configuration for holonomic.
Supports both JSON and text formats. Logs go to stderr; stdout is reserved
for the one-line run summary printed by the CLI.
"""

import logging
import logging.handlers
import sys
import time
from functools import wraps
from pathlib import Path
from typing import Optional

import structlog
from structlog.stdlib import LoggerFactory

_SHARED_PROCESSORS = [
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.stdlib.PositionalArgumentsFormatter(),
    structlog.processors.TimeStamper(fmt="iso", utc=True),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.format_exc_info,
    structlog.processors.UnicodeDecoder(),
]


def _build_formatter(format_type: str, use_colors: bool) -> logging.Formatter:
    if format_type.lower() == "json":
        renderer = structlog.processors.JSONRenderer(sort_keys=True)
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=use_colors and sys.stderr.isatty())
    return structlog.stdlib.ProcessorFormatter(
        processor=renderer,
        foreign_pre_chain=_SHARED_PROCESSORS,
    )


def setup_logging(
    level: str = "WARNING",
    format_type: str = "text",
    file_path: Optional[str] = None,
    file_max_size: int = 10 * 1024 * 1024,
    file_backup_count: int = 3,
    use_colors: bool = True,
) -> None:
    """
    Set up structured logging for the application.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format_type: Format type ("json" or "text")
        file_path: Path to log file (optional)
        file_max_size: Maximum file size in bytes
        file_backup_count: Number of backup files to keep
        use_colors: Whether to use colors in text format
    """
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            *_SHARED_PROCESSORS,
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        context_class=dict,
        logger_factory=LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(_build_formatter(format_type, use_colors))
    root_logger.addHandler(console_handler)

    if file_path:
        Path(file_path).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            file_path,
            maxBytes=file_max_size,
            backupCount=file_backup_count,
            encoding="utf-8",
        )
        # Files always get JSON so they can be grepped with jq
        file_handler.setFormatter(_build_formatter("json", use_colors=False))
        root_logger.addHandler(file_handler)

    logging.getLogger("asyncio").setLevel(logging.WARNING)


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """
    Get a structured logger instance.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Configured structlog logger
    """
    return structlog.get_logger(name)


def log_function_call(logger: structlog.stdlib.BoundLogger):
    """Decorator to log a numerical routine's duration at debug level."""

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.debug(
                    f"{func.__name__} failed",
                    function=func.__name__,
                    duration_seconds=time.perf_counter() - start_time,
                    exception=str(e),
                )
                raise
            logger.debug(
                f"{func.__name__} completed",
                function=func.__name__,
                duration_seconds=time.perf_counter() - start_time,
            )
            return result

        return wrapper

    return decorator
