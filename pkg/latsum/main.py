"""
latsum — command-line entry-point.

Exit codes: 0 success, 1 usage or domain error, 2 numeric or resource
failure, 3 comparison mismatch.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from latsum import __version__
from latsum.commands import config_from_args
from latsum.config import settings
from latsum.errors import DomainError, LatsumError, UsageError

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="latsum",
        description="Generalized Madelung constants by spherical, Cesàro, block "
        "and periodized-kernel summation.",
    )
    parser.add_argument("--version", action="version", version=f"latsum {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # ── Register sub-commands ────────────────────────────────────────────
    from latsum.commands import compare, oracle, shells, sums

    shells.add_parser(subparsers)
    sums.add_parser(subparsers)
    oracle.add_parser(subparsers)
    compare.add_parser(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s  %(name)-30s  %(levelname)-5s  %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
        return args.handler(config)
    except UsageError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"latsum: error: {exc}\n")
        return exc.exit_code
    except ValidationError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"latsum: error: invalid arguments\n{exc}\n")
        return 1
    except DomainError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"latsum: error: {exc}\n")
        return exc.exit_code
    except LatsumError as exc:
        sys.stderr.write(f"latsum: error: {exc}\n")
        return exc.exit_code
    except (ArithmeticError, MemoryError) as exc:
        logger.exception("Numeric failure")
        sys.stderr.write(f"latsum: numeric failure: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
