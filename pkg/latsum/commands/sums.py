"""
sum — partial sums by one method, as a scalar or an N-indexed series.
"""
from __future__ import annotations

import argparse
import logging

import pandas as pd

from latsum.commands import output_options, parse_point, target_options
from latsum.commands.emit import emit
from latsum.pipeline import evaluate_method
from latsum.pipeline.series import build_phase_shells, cesaro_series, fourier_cesaro_series
from latsum.pipeline.shellcount import build_shell_table
from latsum.schemas import PartialSumSeries, RunConfig

logger = logging.getLogger(__name__)

DEFAULT_TOL = {"blocks": 0.05, "greens": 1e-8}


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "sum", parents=[target_options(), output_options()],
        help="Evaluate partial sums by one summation method.",
    )
    parser.add_argument(
        "--method", required=True, choices=["plain", "cesaro", "fourier", "blocks", "greens"]
    )
    parser.add_argument("--kappa", type=float, default=0.0, help="Cesàro order (default: 0).")
    parser.add_argument("--max-n", dest="max_n", type=int, default=None)
    parser.add_argument("--series", action="store_true", help="Emit every N = 1..max_n.")
    parser.add_argument(
        "--tol", type=float, default=None,
        help="blocks: tail bound (default 0.05); greens: truncation (default 1e-8).",
    )
    parser.add_argument("--radius", type=int, default=None, help="a = 0 oracle node radius.")
    parser.add_argument("--x", type=parse_point, default=None, help="Torus point, e.g. pi,pi,pi.")
    parser.set_defaults(handler=run_sum)
    return parser


def _metadata(config: RunConfig, method: str) -> dict:
    meta = {"method": method, "a": config.params.a, "s": config.params.s, "dim": config.params.dim}
    if config.method in ("cesaro", "fourier"):
        meta["kappa"] = config.kappa
    if config.method in ("plain", "cesaro", "fourier"):
        meta["max_n"] = config.max_n
    if config.method in ("fourier", "greens"):
        meta["x"] = ",".join(repr(c) for c in config.x)
    return meta


def _series(config: RunConfig) -> PartialSumSeries:
    params = config.params
    if config.method == "fourier":
        phase = build_phase_shells(config.x, config.max_n, config.threads)
        return fourier_cesaro_series(phase, params, config.kappa, config.max_n)
    table = build_shell_table(params.dim, config.max_n, config.threads)
    kappa = config.kappa if config.method == "cesaro" else 0.0
    return cesaro_series(table, params, kappa, config.max_n)


def run_sum(config: RunConfig) -> int:
    if config.series:
        series = _series(config)
        frame = series.to_frame()
        meta = _metadata(config, series.method)
        emit(config, frame, meta, {"method": series.method, "N": frame["N"].tolist(),
                                   "values": series.values.tolist()})
        logger.info("Emitted %d partial sums", series.max_n)
        return 0

    tol = config.tol if config.tol is not None else DEFAULT_TOL.get(config.method, 1e-8)
    estimate = evaluate_method(
        config.method,
        config.params,
        kappa=config.kappa,
        max_n=config.max_n,
        x=config.x,
        tol=tol,
        radius=config.radius,
        threads=config.threads,
    )
    detail = {k: v for k, v in estimate.detail.items() if k not in ("kappa", "max_n", "x")}
    frame = pd.DataFrame([{"method": estimate.method, "value": estimate.value, **detail}])
    meta = _metadata(config, estimate.method)
    if config.method in ("blocks", "greens"):
        meta["tol"] = tol
    emit(config, frame, meta, {"method": estimate.method, "value": estimate.value, **detail})
    return 0
