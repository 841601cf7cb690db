"""
Shared numerics: correctly rounded reductions and an order-preserving worker map.

Every parallel reduction in the package goes through ``map_ordered``: work
is split into a fixed list of slices independent of the worker count, and
slice results come back in slice order, so merged values are bit-identical
for any number of threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

from latsum.config import settings

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: Optional[int] = None) -> int:
    if threads is None:
        threads = settings.LATSUM_THREADS
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


def map_ordered(
    fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None
) -> list[R]:
    """``list(map(fn, items))`` spread over a thread pool."""
    workers = min(worker_count(threads), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fsum(values: Iterable[float] | np.ndarray) -> float:
    """Correctly rounded sum."""
    if isinstance(values, np.ndarray):
        values = values.ravel().tolist()
    return math.fsum(values)


_FIXED_SHIFT = 1074  # every finite double is an integer multiple of 2^-1074


def exact_cumsum(terms: np.ndarray) -> np.ndarray:
    """Running sums, each correctly rounded, so entry N equals ``fsum(terms[:N])``.

    Terms are accumulated exactly as integer multiples of 2^-1074; int / int
    true division rounds correctly.
    """
    scale = 1 << _FIXED_SHIFT
    out = np.empty(len(terms), dtype=np.float64)
    total = 0
    for idx, t in enumerate(terms.tolist()):
        num, den = t.as_integer_ratio()
        total += num * (scale // den)
        out[idx] = total / scale
    return out


def split_range(lo: int, hi: int, pieces: int) -> list[tuple[int, int]]:
    """Split [lo, hi) into at most ``pieces`` contiguous half-open ranges."""
    if hi <= lo:
        return []
    pieces = max(1, min(pieces, hi - lo))
    edges = np.linspace(lo, hi, pieces + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
