"""Structured audit reports.

Reports are JSON with lexicographically sorted keys so identical inputs
and flags produce byte-identical files; the timestamp is the only
non-deterministic field and can be suppressed for golden tests.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

from . import __version__

TOOL_NAME = "embedaudit"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def build_report(
    experiment: str,
    inputs: Mapping[str, str | Path],
    parameters: Mapping[str, object],
    results: Mapping[str, object],
    timestamp: bool = True,
) -> dict:
    report = {
        "experiment": experiment,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "inputs": {
            name: {"path": str(path), "sha256": file_digest(path)}
            for name, path in inputs.items()
        },
        "parameters": dict(parameters),
        "results": dict(results),
    }
    if timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    return report


def render_report(report: Mapping[str, object]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(report: Mapping[str, object], destination) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_report(report))
    else:
        destination.write(render_report(report))
