"""
Result emission — CSV with ``#`` provenance comments, or one JSON object.

Floats are written in shortest round-trip form, so reading the CSV back with
``pandas.read_csv(..., comment="#", float_precision="round_trip")`` restores
the in-memory doubles exactly.
"""
from __future__ import annotations

import sys
from datetime import datetime, timezone
from typing import Any

import pandas as pd
from pydantic import BaseModel

from latsum import __version__
from latsum.errors import ResourceLimitError
from latsum.schemas import RunConfig, RunReport


def _round_trip(frame: pd.DataFrame) -> pd.DataFrame:
    out = frame.copy()
    for column in out.columns:
        if pd.api.types.is_float_dtype(out[column]):
            out[column] = [repr(float(v)) for v in out[column]]
    return out


def _write(config: RunConfig, text: str) -> None:
    if config.output:
        try:
            with open(config.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ResourceLimitError(f"cannot write {config.output}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _metadata_lines(config: RunConfig, meta: dict[str, Any]) -> list[str]:
    lines = [f"# latsum {__version__}", f"# subcommand: {config.subcommand}"]
    lines += [f"# {key}: {value}" for key, value in meta.items()]
    if config.timestamp:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        lines.append(f"# timestamp: {stamp}")
    return lines


def emit(
    config: RunConfig,
    frame: pd.DataFrame,
    meta: dict[str, Any],
    result: dict[str, Any] | BaseModel,
) -> None:
    """Write ``frame`` as CSV, or ``result`` as JSON, per the configured format."""
    if config.output_format == "json":
        report = RunReport(subcommand=config.subcommand, params=meta, result=result)
        _write(config, report.model_dump_json(indent=2) + "\n")
        return

    body = _round_trip(frame).to_csv(index=False, lineterminator="\n")
    header = "\n".join(_metadata_lines(config, meta)) + "\n"
    _write(config, header + body)
