"""
Spherical partial sums of the alternating lattice series.

    C^κ_N = Σ_{n=1}^{N} (1 − n/N)^κ · (−1)^n r_d(n) / (a² + n)^s

κ = 0 is the plain sum by expanding spheres. The phase-weighted variant
replaces (−1)^n r_3(n) by the shell sum Σ_{|k|²=n} e^{ik·x}.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from latsum.config import settings
from latsum.errors import DomainError, ResourceLimitError, TableMismatchError
from latsum.pipeline.summation import exact_cumsum, fsum, map_ordered
from latsum.schemas import (
    CesaroConfig,
    PartialSumSeries,
    PhaseShellTable,
    Point3,
    ShellCountTable,
    SumParams,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _check_table(table: ShellCountTable, params: SumParams, max_n: int) -> None:
    if table.dim != params.dim:
        raise TableMismatchError(
            f"table dimension {table.dim} does not match params.dim={params.dim}"
        )
    if table.max_n < max_n:
        raise TableMismatchError(f"table ends at n={table.max_n}, need {max_n}")


def _denominators(params: SumParams, max_n: int) -> np.ndarray:
    n = np.arange(1, max_n + 1, dtype=np.float64)
    return (params.a2 + n) ** params.s


def _weights(kappa: float, max_n: int) -> np.ndarray:
    if kappa == 0:
        return np.ones(max_n)
    n = np.arange(1, max_n + 1, dtype=np.float64)
    return (1.0 - n / max_n) ** kappa


def _running_means(terms: np.ndarray, kappa: float) -> np.ndarray:
    """C^κ_N for every N = 1..len(terms) from the term sequence.

    Each entry is bit-identical to ``cesaro_sum`` at the same cutoff: the
    weights depend on N, so κ > 0 re-weighs every prefix.
    """
    size = len(terms)
    if kappa == 0:
        return exact_cumsum(terms)
    return np.array(
        [fsum(_weights(kappa, cutoff) * terms[:cutoff]) for cutoff in range(1, size + 1)]
    )


def _method_tag(kappa: float) -> str:
    return "plain" if kappa == 0 else f"cesaro({kappa:g})"


# ---------------------------------------------------------------------------
# Lattice series
# ---------------------------------------------------------------------------

def term_sequence(
    table: ShellCountTable, params: SumParams, max_n: int
) -> np.ndarray:
    """t_n = (−1)^n r_d(n) / (a² + n)^s for n = 1..max_n."""
    _check_table(table, params, max_n)
    counts = table.counts[1: max_n + 1].astype(np.float64)
    signs = np.where(np.arange(1, max_n + 1) % 2 == 1, -1.0, 1.0)
    return (signs * counts) / _denominators(params, max_n)


def cesaro_sum(
    table: ShellCountTable, params: SumParams, config: CesaroConfig
) -> float:
    terms = term_sequence(table, params, config.max_n)
    return fsum(_weights(config.kappa, config.max_n) * terms)


def cesaro_series(
    table: ShellCountTable, params: SumParams, kappa: float, max_n: int
) -> PartialSumSeries:
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    if max_n < 1:
        raise DomainError(f"max_n must be >= 1, got {max_n}")
    terms = term_sequence(table, params, max_n)
    values = _running_means(terms, kappa)
    logger.info("Series %s: a=%g s=%g N=%d", _method_tag(kappa), params.a, params.s, max_n)
    return PartialSumSeries(
        method=_method_tag(kappa), params=params, kappa=kappa, values=values
    )


# ---------------------------------------------------------------------------
# Phase-weighted shells
# ---------------------------------------------------------------------------

def _phase_slice(x: Point3, max_n: int, k1: int) -> np.ndarray:
    rest = max_n - k1 * k1
    m = math.isqrt(rest)
    k = np.arange(-m, m + 1)
    k2, k3 = np.meshgrid(k, k, indexing="ij")
    n = k1 * k1 + k2 * k2 + k3 * k3
    inside = n <= max_n
    phase = np.cos(k1 * x[0] + k2[inside] * x[1] + k3[inside] * x[2])
    return np.bincount(n[inside], weights=phase, minlength=max_n + 1)


def build_phase_shells(
    x: Point3, max_n: int, threads: Optional[int] = None
) -> PhaseShellTable:
    if max_n < 1:
        raise DomainError(f"max_n must be >= 1, got {max_n}")
    m = math.isqrt(max_n)
    visits = (2 * m + 1) ** 3
    if visits > settings.LATSUM_ENUMERATION_BUDGET:
        raise ResourceLimitError(
            f"phase shells up to n={max_n} visit {visits} points, budget is "
            f"{settings.LATSUM_ENUMERATION_BUDGET}"
        )
    x = tuple(float(c) for c in x)
    slices = map_ordered(lambda k1: _phase_slice(x, max_n, k1), range(-m, m + 1), threads)
    total = np.zeros(max_n + 1)
    for part in slices:
        total += part
    logger.info("Phase shells built: x=%s  max_n=%d", x, max_n)
    return PhaseShellTable(x=x, max_n=max_n, sums=total.astype(np.complex128))


def _phase_terms(phase: PhaseShellTable, params: SumParams, max_n: int) -> np.ndarray:
    if params.dim != 3:
        raise TableMismatchError("phase-weighted sums are three-dimensional")
    if phase.max_n < max_n:
        raise TableMismatchError(f"phase table ends at n={phase.max_n}, need {max_n}")
    return phase.sums.real[1: max_n + 1] / _denominators(params, max_n)


def fourier_cesaro_eval(
    phase: PhaseShellTable, params: SumParams, config: CesaroConfig
) -> float:
    terms = _phase_terms(phase, params, config.max_n)
    return fsum(_weights(config.kappa, config.max_n) * terms)


def fourier_cesaro_series(
    phase: PhaseShellTable, params: SumParams, kappa: float, max_n: int
) -> PartialSumSeries:
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    terms = _phase_terms(phase, params, max_n)
    return PartialSumSeries(
        method=f"fourier-cesaro({kappa:g}, x)",
        params=params,
        kappa=kappa,
        x=phase.x,
        values=_running_means(terms, kappa),
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def _window(series: PartialSumSeries, lo: int, hi: int, strict: bool) -> np.ndarray:
    ok = 1 <= lo < hi <= series.max_n if strict else 1 <= lo <= hi <= series.max_n
    if not ok:
        raise IndexError(f"window [{lo}, {hi}] invalid for series of length {series.max_n}")
    return series.values[lo - 1: hi]


def window_oscillation(series: PartialSumSeries, lo: int, hi: int) -> float:
    """max − min of the partial sums over the 1-based window [lo, hi]."""
    values = _window(series, lo, hi, strict=True)
    return float(values.max() - values.min())


def series_mean(series: PartialSumSeries, lo: int, hi: int) -> float:
    values = _window(series, lo, hi, strict=False)
    return fsum(values) / len(values)
