"""
Report Emission

Wraps command results with the resolved configuration and tool version, and
serializes them either as one JSON document or as a comma-separated table with
one row per trial. Reports carry no timestamps, so identical inputs produce
byte-identical output.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .exceptions import DomainError, OutputError

logger = logging.getLogger(__name__)

TABLE_HEADER = (
    "Row",
    "Total Count",
    "Correct Count",
    "Error Count",
    "No-Response Event",
    "Score/Threshold",
)
FORMATS = ("obj", "table")


@dataclass(frozen=True)
class Report:
    """
    Everything one ``qpv`` command produced.

    Args:
        command: Subcommand name
        config: Resolved configuration as a plain dictionary
        results: Command results as a plain dictionary
        tool_version: Package version that produced the report
        seeds: Seeds used by the command (empty for deterministic commands)
        trials: Per-trial rows for tabular output
        verified: False when the command reports a failed verification
        theory: Expected ``tally`` and ``threshold`` for the leading table row
    """

    command: str
    config: Dict[str, Any]
    results: Dict[str, Any]
    tool_version: str
    seeds: Sequence[int] = ()
    trials: List[Dict[str, Any]] = field(default_factory=list)
    verified: bool = True
    theory: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "seeds": list(self.seeds),
            "tool_version": self.tool_version,
        }


def _cell(value: Union[int, float]) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.3f}"


def _table_row(label: str, tally: Dict[str, Any], last: float) -> List[str]:
    return [
        label,
        _cell(tally["n_c"] + tally["n_i"]),
        _cell(tally["n_c"]),
        _cell(tally["n_i"]),
        _cell(tally["n_perp"]),
        _cell(last),
    ]


def emit_report(report: Report, fmt: str = "obj") -> str:
    """
    Serialize a report.

    The table follows the experimental results layout: an optional ``Theory``
    row with the expected counts and the threshold, then one ``Trial k`` row
    per trial with its score.

    Args:
        report: Report to serialize
        fmt: ``obj`` for a JSON document, ``table`` for comma-separated rows

    Returns:
        Serialized document ending in a newline
    """
    if fmt == "obj":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "table":
        raise DomainError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    if report.theory is not None:
        theory = report.theory
        writer.writerow(_table_row("Theory", theory["tally"], theory["threshold"]))
    for index, trial in enumerate(report.trials, start=1):
        writer.writerow(_table_row(f"Trial {index}", trial["tally"], trial["score"]))
    return buffer.getvalue()


def export_report_to_file(
    report: Report, output_path: Union[str, Path], fmt: str = "obj"
) -> Path:
    """
    Write a serialized report to disk, creating parent directories.

    Raises:
        OutputError: the path cannot be written
    """
    output_path = Path(output_path)
    document = emit_report(report, fmt)

    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8", newline="") as file:
            file.write(document)
    except OSError as err:
        raise OutputError(f"cannot write report to {output_path}: {err}") from err

    logger.info("wrote %s report to %s", report.command, output_path)
    return output_path


def write_report(
    report: Report, fmt: str = "obj", out: Optional[str] = None
) -> Optional[Path]:
    """Write to ``out`` when given, otherwise print to standard output."""
    if out:
        return export_report_to_file(report, out, fmt)
    print(emit_report(report, fmt), end="")
    return None
