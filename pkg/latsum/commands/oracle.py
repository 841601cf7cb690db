"""
oracle — the periodized-kernel value at a torus point.
"""
from __future__ import annotations

import argparse
import logging

import pandas as pd

from latsum.commands import output_options, parse_point, target_options
from latsum.commands.emit import emit
from latsum.errors import DomainError
from latsum.pipeline.greens import periodized_green, periodized_green_zero_a
from latsum.schemas import KernelParams, RunConfig

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "oracle", parents=[target_options(with_dim=False), output_options()],
        help="Evaluate the lattice sum through the periodized Green function.",
    )
    parser.add_argument("--x", type=parse_point, default=None, help="Torus point (default: pi,pi,pi).")
    parser.add_argument("--tol", type=float, default=None, help="a > 0 truncation (default: 1e-8).")
    parser.add_argument("--radius", type=int, default=None, help="a = 0 node radius (default: 200).")
    parser.set_defaults(handler=run_oracle)
    return parser


def run_oracle(config: RunConfig) -> int:
    params = config.params
    if params.a == 0 and params.s >= 1:
        raise DomainError(
            f"the a = 0 oracle needs s < 1 (got s={params.s}); use the block sum instead"
        )
    if params.s >= 1.5:
        raise DomainError(f"the oracle needs s < 3/2, got s={params.s}")

    if params.a == 0:
        evaluation = periodized_green_zero_a(params.s, config.x, config.radius, config.threads)
    else:
        kernel = KernelParams(a=abs(params.a), s=params.s)
        tol = config.tol if config.tol is not None else 1e-8
        evaluation = periodized_green(kernel, config.x, tol, config.threads)

    frame = pd.DataFrame([{
        "value": evaluation.value,
        "truncation_radius": evaluation.truncation_radius,
        "error_estimate": evaluation.error_estimate,
    }])
    meta = {"a": params.a, "s": params.s, "x": ",".join(repr(c) for c in config.x)}
    result = {
        "value": evaluation.value,
        "radius": evaluation.truncation_radius,
        "error_estimate": evaluation.error_estimate,
        "params": {"a": params.a, "s": params.s},
    }
    emit(config, frame, meta, result)
    return 0
