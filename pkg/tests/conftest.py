"""
Shared pytest fixtures — session shell tables and a CLI runner.
"""
import math

import numpy as np
import pytest

from latsum.main import main
from latsum.pipeline.shellcount import build_shell_table

MADELUNG_NACL = -1.74756
PI3 = (math.pi, math.pi, math.pi)


@pytest.fixture(scope="session")
def r3_table():
    """r_3(n) up to 2·10⁴."""
    return build_shell_table(3, 20_000)


def brute_force_counts(d: int, max_n: int) -> np.ndarray:
    """r_d(n) for n <= max_n by enumerating the cube of half-side √max_n."""
    m = math.isqrt(max_n)
    squares = np.arange(-m, m + 1) ** 2
    norms = squares
    for _ in range(d - 1):
        norms = np.add.outer(norms, squares)
    norms = norms.ravel()
    return np.bincount(norms[norms <= max_n], minlength=max_n + 1)


@pytest.fixture()
def run_cli(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run
