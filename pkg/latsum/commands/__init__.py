"""
Sub-command modules and the argument plumbing they share.
"""
from __future__ import annotations

import argparse
import math

from latsum.schemas import RunConfig, SumParams

_PI_TOKENS = {"pi": math.pi, "+pi": math.pi, "-pi": -math.pi}


def parse_point(text: str) -> tuple[float, float, float]:
    """``pi,pi,pi`` or three numeric literals."""
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated coordinates, got {text!r}")
    return tuple(_PI_TOKENS[p] if p in _PI_TOKENS else float(p) for p in parts)


def output_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
    parent.add_argument("--output", default=None, help="Write here instead of stdout.")
    parent.add_argument(
        "--no-timestamp", dest="timestamp", action="store_false",
        help="Omit the timestamp comment (reproducible output).",
    )
    parent.add_argument(
        "--threads", type=int, default=None,
        help="Worker cap (default: LATSUM_THREADS, else all cores).",
    )
    return parent


def target_options(with_dim: bool = True) -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--a", type=float, required=True, help="Screening parameter a.")
    parent.add_argument("--s", type=float, required=True, help="Exponent s > 0.")
    if with_dim:
        parent.add_argument("--dim", type=int, default=3, help="Lattice dimension (default: 3).")
    return parent


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k != "handler"}
    subcommand = values.pop("command")
    a = values.pop("a", None)
    s = values.pop("s", None)
    if s is not None:
        values["params"] = SumParams(a=a, s=s, dim=values.get("dim", 3))
    return RunConfig(subcommand=subcommand, **values)
