"""
compare — evaluate several methods at shared parameters and check agreement.

Method tokens: plain, cesaro<κ>, fourier<κ>, blocks, greens (e.g. cesaro2).
"""
from __future__ import annotations

import argparse
import logging
import re

import pandas as pd

from latsum.commands import output_options, parse_point, target_options
from latsum.commands.emit import emit
from latsum.errors import BudgetExceededError, ComparisonMismatch
from latsum.pipeline import evaluate_method
from latsum.pipeline.differ import compare_values
from latsum.pipeline.shellcount import build_shell_table
from latsum.schemas import MethodValue, RunConfig

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"^(plain|blocks|greens|(cesaro|fourier)(\d+(?:\.\d+)?))$")
DEFAULT_MAX_N = 5000
DEFAULT_TOL = 1e-2
ORACLE_TOL = 1e-8


def parse_methods(text: str) -> list[str]:
    tokens = [t.strip().lower() for t in text.split(",") if t.strip()]
    for token in tokens:
        if not _TOKEN.match(token):
            raise ValueError(f"unknown method token {token!r}")
    return tokens


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "compare", parents=[target_options(), output_options()],
        help="Cross-check summation methods; exit 3 on disagreement.",
    )
    parser.add_argument("--methods", type=parse_methods, required=True)
    parser.add_argument("--max-n", dest="max_n", type=int, default=DEFAULT_MAX_N)
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="Verdict tolerance.")
    parser.add_argument(
        "--block-tol", dest="block_tol", type=float, default=0.05,
        help="Tail-bound tolerance of the block sum (default: 0.05).",
    )
    parser.add_argument("--radius", type=int, default=None, help="a = 0 oracle node radius.")
    parser.add_argument("--x", type=parse_point, default=None)
    parser.set_defaults(handler=run_compare)
    return parser


def _evaluate(token: str, config: RunConfig, table) -> MethodValue:
    match = _TOKEN.match(token)
    family = match.group(2) or token
    kappa = float(match.group(3)) if match.group(3) else 0.0
    tol = config.block_tol if family == "blocks" else ORACLE_TOL
    try:
        estimate = evaluate_method(
            family,
            config.params,
            kappa=kappa,
            max_n=config.max_n,
            x=config.x,
            tol=tol,
            radius=config.radius,
            table=table,
            threads=config.threads,
        )
    except BudgetExceededError as exc:
        logger.warning("%s: %s; comparing the best value at radius %s", token, exc, exc.radius)
        estimate = MethodValue(
            method=family,
            value=exc.best_value,
            detail={"radius": exc.radius, "tail_bound": exc.tail_bound, "budget_exceeded": True},
        )
    return estimate.model_copy(update={"method": token})


def run_compare(config: RunConfig) -> int:
    tol = config.tol if config.tol is not None else DEFAULT_TOL
    needs_table = any(t == "plain" or t.startswith("cesaro") for t in config.methods)
    table = (
        build_shell_table(config.params.dim, config.max_n, config.threads) if needs_table else None
    )
    values = [_evaluate(token, config, table) for token in config.methods]
    report = compare_values(values, config.params, tol)

    frame = pd.DataFrame([row.model_dump() for row in report.rows])
    meta = {
        "methods": ",".join(config.methods),
        "a": config.params.a,
        "s": config.params.s,
        "max_n": config.max_n,
        "tol": tol,
        "block_tol": config.block_tol,
    }
    meta.update({f"value[{v.method}]": repr(v.value) for v in report.values})
    emit(config, frame, meta, report)

    if not report.passed:
        worst = max(report.rows, key=lambda row: row.deviation)
        raise ComparisonMismatch(
            f"{worst.left} vs {worst.right} differ by {worst.deviation:.3g} > tol={tol:g}"
        )
    logger.info("Comparison passed: %d pairs within tol=%g", len(report.rows), tol)
    return 0
