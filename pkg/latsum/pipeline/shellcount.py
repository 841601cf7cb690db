"""
Lattice-shell representation counts r_d(n).

Tables are built by the one-dimensional convolution recurrence

    r_d(n) = r_{d−1}(n) + 2 · Σ_{k ≥ 1, k² ≤ n} r_{d−1}(n − k²)

starting from r_1, in unsigned 64-bit integer arithmetic.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from latsum.config import settings
from latsum.errors import DomainError, ResourceLimitError
from latsum.pipeline.summation import map_ordered, split_range, worker_count
from latsum.schemas import ShellCountTable

logger = logging.getLogger(__name__)

_TWO = np.uint64(2)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _one_dim_counts(max_n: int) -> np.ndarray:
    counts = np.zeros(max_n + 1, dtype=np.uint64)
    counts[0] = 1
    k = np.arange(1, math.isqrt(max_n) + 1)
    counts[k * k] = 2
    return counts


def _add_dimension_chunk(prev: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Next-dimension counts for n in [lo, hi)."""
    out = prev[lo:hi].copy()
    for k in range(1, math.isqrt(hi - 1) + 1):
        sq = k * k
        start = max(lo, sq)
        out[start - lo:] += _TWO * prev[start - sq:hi - sq]
    return out


def _add_dimension(prev: np.ndarray, threads: Optional[int]) -> np.ndarray:
    size = len(prev)
    chunks = split_range(0, size, 4 * worker_count(threads))
    parts = map_ordered(
        lambda bounds: _add_dimension_chunk(prev, *bounds), chunks, threads
    )
    return np.concatenate(parts)


def _check_capacity(d: int, max_n: int) -> None:
    entries = d * (max_n + 1)
    if entries > settings.LATSUM_MAX_TABLE_ENTRIES:
        raise ResourceLimitError(
            f"shell table needs {entries} entries, ceiling is "
            f"{settings.LATSUM_MAX_TABLE_ENTRIES}"
        )
    # r_d(n) is at most the number of points in the cube of half-side √n
    if d * math.log2(2 * math.isqrt(max_n) + 1) >= 64:
        raise ResourceLimitError(f"r_{d}(n) may overflow 64 bits for n <= {max_n}")


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def build_shell_table(
    d: int, max_n: int, threads: Optional[int] = None
) -> ShellCountTable:
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if max_n < 0:
        raise DomainError(f"max_n must be >= 0, got {max_n}")
    _check_capacity(d, max_n)

    counts = _one_dim_counts(max_n)
    for _ in range(d - 1):
        counts = _add_dimension(counts, threads)
    logger.info("Shell table built: d=%d  max_n=%d", d, max_n)
    return ShellCountTable(dim=d, max_n=max_n, counts=counts)


def combine_tables(t1: ShellCountTable, t2: ShellCountTable) -> ShellCountTable:
    """Cauchy convolution: r_{d1+d2}(n) = Σ_m r_{d1}(m) · r_{d2}(n − m)."""
    max_n = min(t1.max_n, t2.max_n)
    _check_capacity(t1.dim + t2.dim, max_n)
    a = t1.counts[: max_n + 1]
    b = t2.counts[: max_n + 1]
    out = np.zeros(max_n + 1, dtype=np.uint64)
    for m in np.flatnonzero(b):
        out[m:] += b[m] * a[: max_n + 1 - m]
    return ShellCountTable(dim=t1.dim + t2.dim, max_n=max_n, counts=out)


def ball_count(table: ShellCountTable, n: int) -> int:
    """Number of lattice points with |x|² <= n."""
    if not 0 <= n <= table.max_n:
        raise IndexError(f"n={n} outside table range [0, {table.max_n}]")
    return int(table.counts[: n + 1].sum(dtype=np.uint64))


def shell_layer_count(table: ShellCountTable, lo: int, hi: int) -> int:
    """Number of lattice points with lo <= |x|² <= hi."""
    if not 0 <= lo <= hi <= table.max_n:
        raise IndexError(f"layer [{lo}, {hi}] outside table range [0, {table.max_n}]")
    return int(table.counts[lo: hi + 1].sum(dtype=np.uint64))


def find_large_shells(table: ShellCountTable, c: float) -> list[int]:
    """All n in [1, max_n] with r_3(n) >= c·√n, ascending."""
    if table.dim != 3:
        raise DomainError(f"large-shell search needs a d=3 table, got d={table.dim}")
    if c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    n = np.arange(1, table.max_n + 1)
    hits = table.counts[1:].astype(np.float64) >= c * np.sqrt(n)
    return [int(v) for v in n[hits]]
