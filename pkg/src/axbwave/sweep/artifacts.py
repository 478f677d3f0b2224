"""CSV tables, JSON reports and YAML run manifests."""

from __future__ import annotations

import csv
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path

import yaml

from axbwave.lab.report import to_plain

REPORT_SCHEMA_VERSION = "1.0.0"
REPORT_FIELDS = (
    "schema_version",
    "task",
    "config",
    "git_describe",
    "generated",
    "wall_clock_seconds",
    "checks",
    "passed",
    "failures",
    "results",
)
KERNEL_COLUMNS = ("R", "x", "Re k", "Im k", "err")


def report_schema_version() -> str:
    return REPORT_SCHEMA_VERSION


def git_describe() -> str:
    """`git describe --always --dirty` of the working tree, or "unknown"."""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            cwd=Path(__file__).parent,
        )
    except OSError:
        return "unknown"
    if result.returncode == 0 and result.stdout.strip():
        return result.stdout.strip()
    return "unknown"


def _cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path | str, columns, rows) -> Path:
    """RFC-4180 table: header row, CRLF line ends, floats with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def build_report(task: str, config: dict, checks: dict, results, wall_clock_seconds: float) -> dict:
    """The JSON report document; passed is the conjunction of checks."""
    failures = [name for name, ok in checks.items() if not ok]
    return {
        "schema_version": report_schema_version(),
        "task": task,
        "config": to_plain(config),
        "git_describe": git_describe(),
        "generated": datetime.now(timezone.utc).isoformat(),
        "wall_clock_seconds": wall_clock_seconds,
        "checks": {name: bool(ok) for name, ok in checks.items()},
        "passed": not failures,
        "failures": failures,
        "results": to_plain(results),
    }


def build_error_report(task: str, config: dict, exc: Exception, wall_clock_seconds: float) -> dict:
    """A report for a run that raised before its checks finished.

    The failures list holds one {type, message} entry for the exception.
    """
    report = build_report(task, config, {}, [], wall_clock_seconds)
    report["passed"] = False
    report["failures"] = [{"type": type(exc).__name__, "message": str(exc)}]
    return report


def write_report(path: Path | str, report: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        json.dump(report, f, indent=2, default=str)
    return path


def read_report(path: Path | str) -> dict:
    """Load a report and check it carries every schema field of a known version."""
    with Path(path).open() as f:
        report = json.load(f)
    missing = [name for name in REPORT_FIELDS if name not in report]
    if missing:
        raise ValueError(f"report {path} lacks {', '.join(missing)}")
    if report["schema_version"].split(".")[0] != REPORT_SCHEMA_VERSION.split(".")[0]:
        raise ValueError(f"unsupported report schema {report['schema_version']}")
    return report


def write_manifest(path: Path | str, report: dict) -> Path:
    """Provenance fields of a report as YAML."""
    doc = {name: report[name] for name in REPORT_FIELDS if name != "results"}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        yaml.dump(doc, f, default_flow_style=False, sort_keys=False, allow_unicode=True)
    return path
