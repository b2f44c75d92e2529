"""
CSV and JSON artifact writers.

Artifacts carry no timestamps: two runs with the same parameters and seed
produce byte-identical files. Floats are written with 17 significant digits
and a '.' decimal separator regardless of locale.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import aiofiles
import numpy as np

from ..version import __version__
from .logging import get_logger

logger = get_logger(__name__)

FORMATS = ("csv", "json")


def artifact_metadata(command: str, parameters: Dict[str, Any]) -> Dict[str, Any]:
    """The header block shared by every artifact."""
    return {
        "version": __version__,
        "command": command,
        "parameters": {key: parameters[key] for key in sorted(parameters)},
    }


def format_value(value: Any) -> str:
    """Render one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(format_value(v) for v in value)
    return str(value)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    to_json = getattr(value, "to_json", None)
    if callable(to_json):
        return to_json()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def render_csv(
    rows: Sequence[Dict[str, Any]],
    metadata: Dict[str, Any],
    sort_by: Optional[Sequence[str]] = None,
) -> str:
    """
    Render rows as CSV preceded by '# key: value' metadata lines.

    Columns follow the key order of the first row. Rows are sorted on
    `sort_by` columns when given, so output order never depends on the order
    in which parallel workers finished.
    """
    buffer = io.StringIO()
    buffer.write(f"# version: {metadata['version']}\n")
    buffer.write(f"# command: {metadata['command']}\n")
    for key, value in metadata["parameters"].items():
        buffer.write(f"# {key}: {format_value(value)}\n")

    rows = list(rows)
    if sort_by:
        rows.sort(key=lambda row: tuple(row[c] for c in sort_by))
    columns: List[str] = list(rows[0].keys()) if rows else []
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


async def write_text(path: Path, text: str) -> Path:
    """Write an artifact; raises OSError when the path is not writable."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "w", encoding="utf-8", newline="") as f:
        await f.write(text)
    logger.info("wrote artifact", path=str(path), bytes=len(text.encode("utf-8")))
    return path


async def write_artifact(
    path: Path,
    fmt: str,
    metadata: Dict[str, Any],
    rows: Sequence[Dict[str, Any]],
    data: Optional[Dict[str, Any]] = None,
    sort_by: Optional[Sequence[str]] = None,
) -> Path:
    """Write rows (CSV) or {metadata, result, rows} (JSON) to path."""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown artifact format: {fmt}. Must be one of {FORMATS}")
    if fmt == "csv":
        text = render_csv(rows, metadata, sort_by)
    else:
        ordered = list(rows)
        if sort_by:
            ordered.sort(key=lambda row: tuple(row[c] for c in sort_by))
        text = render_json({"metadata": metadata, "result": data or {}, "rows": ordered})
    return await write_text(path, text)
