"""
shells — r_d(n) table emission.
"""
from __future__ import annotations

import argparse
import logging

import numpy as np
import pandas as pd

from latsum.commands import output_options
from latsum.commands.emit import emit
from latsum.pipeline.shellcount import build_shell_table
from latsum.schemas import RunConfig

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "shells", parents=[output_options()], help="Emit lattice-shell counts r_d(n)."
    )
    parser.add_argument("--dim", type=int, default=3, help="Lattice dimension d (default: 3).")
    parser.add_argument("--max-n", dest="max_n", type=int, required=True)
    parser.set_defaults(handler=run_shells)
    return parser


def run_shells(config: RunConfig) -> int:
    table = build_shell_table(config.dim, config.max_n, config.threads)
    counts = table.counts.astype(np.int64)
    frame = pd.DataFrame({"n": np.arange(table.max_n + 1), "count": counts})
    meta = {"dim": table.dim, "max_n": table.max_n}
    emit(config, frame, meta, {"n": frame["n"].tolist(), "count": counts.tolist()})
    logger.info("Emitted %d shells", table.max_n + 1)
    return 0
