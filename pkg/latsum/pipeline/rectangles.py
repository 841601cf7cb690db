"""
Summation by expanding rectangles and 2×2×2 alternating blocks.

A block E_{I,J,K} is the alternating sum of f(i,j,k) = (a² + i² + j² + k²)^(−s)
over the lattice cube [2I,2I+1]×[2J,2J+1]×[2K,2K+1]. It equals minus the
integral of ∂₁∂₂∂₃f over that cube, which gives

    |E_{I,J,K}| <= C_σ (a² + ρ²)^(−s−3/2),  C_σ = 8/(3√3) · |σ(σ−1)(σ−2)|,

with σ = −s and ρ the distance from the origin to the nearest block corner
(|x₁x₂x₃| <= (|x|/√3)³ inside the derivative). The block series is absolutely
convergent and defines the reference value of the lattice sum.

Box sums are evaluated in folded coordinates: f depends only on |i|, |j|, |k|
and the sign (−1)^{i+j+k} only on their parity, so each absolute coordinate p
is visited once with multiplicity [p <= −lo] + [p <= hi] (1 for p = 0).
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from latsum.config import settings
from latsum.errors import BudgetExceededError, DomainError, ResourceLimitError
from latsum.pipeline.summation import fsum, map_ordered
from latsum.schemas import BlockIndex, BlockSum, SumParams

logger = logging.getLogger(__name__)

Box = tuple[tuple[int, int, int], tuple[int, int, int]]


def derivative_constant(s: float) -> float:
    """C_σ for σ = −s."""
    sigma = -s
    return 8.0 / (3.0 * math.sqrt(3.0)) * abs(sigma * (sigma - 1) * (sigma - 2))


def nearest_corner(index):
    """Nearest-to-origin coordinate of [2I, 2I+1]: 2I for I >= 0, 2|I| − 1 otherwise.

    Maps the block indices Z one-to-one onto N₀.
    """
    index = np.asarray(index)
    return np.where(index >= 0, 2 * index, -2 * index - 1)


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------

def alternating_block(
    idx: BlockIndex,
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    omit_origin: bool = False,
) -> float:
    """E_{I,J,K}(f) for a vectorized integrand f(i, j, k)."""
    i, j, k = idx.corners()
    values = np.broadcast_to(np.asarray(f(i, j, k), dtype=np.float64), i.shape)
    signs = np.where((i + j + k) % 2 == 0, 1.0, -1.0)
    terms = signs * values
    if omit_origin:
        terms = terms[(i != 0) | (j != 0) | (k != 0)]
    return fsum(terms)


def block_term(idx: BlockIndex, params: SumParams) -> float:
    """E_{I,J,K} of (a² + |x|²)^(−s); the origin term is dropped."""
    a2, s = params.a2, params.s
    return alternating_block(
        idx, lambda i, j, k: (a2 + i * i + j * j + k * k) ** (-s), omit_origin=True
    )


def block_term_array(params: SumParams, I, J, K) -> np.ndarray:
    """Vectorized block_term over broadcastable index arrays (fixed corner order)."""
    I, J, K = np.broadcast_arrays(*(np.asarray(v, dtype=np.int64) for v in (I, J, K)))
    total = np.zeros(I.shape)
    for di in (0, 1):
        for dj in (0, 1):
            for dk in (0, 1):
                i, j, k = 2 * I + di, 2 * J + dj, 2 * K + dk
                r2 = (i * i + j * j + k * k).astype(np.float64)
                with np.errstate(divide="ignore"):
                    value = (params.a2 + r2) ** (-params.s)
                value = np.where(r2 == 0, 0.0, value)
                total += value if (di + dj + dk) % 2 == 0 else -value
    return total


def block_decay_bound(idx: BlockIndex, params: SumParams) -> float:
    rho2 = sum(int(nearest_corner(v)) ** 2 for v in (idx.I, idx.J, idx.K))
    return derivative_constant(params.s) * (params.a2 + rho2) ** (-params.s - 1.5)


# ---------------------------------------------------------------------------
# Box sums
# ---------------------------------------------------------------------------

def _multiplicity(lo: int, hi: int, extent: int) -> np.ndarray:
    p = np.arange(extent + 1)
    mult = (p <= -lo).astype(np.int64) + (p <= hi).astype(np.int64)
    mult[0] = 1
    return mult


def _box_sum(params: SumParams, box: Box, threads: Optional[int]) -> float:
    """Primed alternating sum over the box lo <= (i, j, k) <= hi (lo <= 0 <= hi)."""
    lo, hi = box
    extents = [max(-l, h) for l, h in zip(lo, hi)]
    w1, w2, w3 = (_multiplicity(l, h, e) for l, h, e in zip(lo, hi, extents))
    q = np.arange(extents[1] + 1)
    r = np.arange(extents[2] + 1)
    q2 = (q * q)[:, None] + (r * r)[None, :]
    qr_sign = np.where((q[:, None] + r[None, :]) % 2 == 0, 1.0, -1.0)
    qr_weight = (w2[:, None] * w3[None, :]).astype(np.float64) * qr_sign
    a2, s = params.a2, params.s

    def _slice(p: int) -> float:
        r2 = (p * p + q2).astype(np.float64)
        with np.errstate(divide="ignore"):
            values = (a2 + r2) ** (-s)
        if p == 0:
            values[0, 0] = 0.0
        sign = 1.0 if p % 2 == 0 else -1.0
        return fsum(sign * w1[p] * qr_weight * values)

    partials = map_ordered(_slice, range(extents[0] + 1), threads)
    return fsum(partials)


def _check_enumeration(points: int, what: str) -> None:
    if points > settings.LATSUM_ENUMERATION_BUDGET:
        raise ResourceLimitError(
            f"{what} needs {points} lattice evaluations, budget is "
            f"{settings.LATSUM_ENUMERATION_BUDGET}"
        )


def rect_partial_sum(
    params: SumParams, I: int, J: int, K: int, threads: Optional[int] = None
) -> float:
    """S over [−I,I]×[−J,J]×[−K,K] without the origin."""
    if min(I, J, K) < 0:
        raise DomainError(f"box half-sides must be >= 0, got {(I, J, K)}")
    _check_enumeration((2 * I + 1) * (2 * J + 1) * (2 * K + 1), "rectangle sum")
    return _box_sum(params, ((-I, -J, -K), (I, J, K)), threads)


def blocks_box_sum(params: SumParams, radius: int, threads: Optional[int] = None) -> float:
    """Σ block_term over all blocks with max(|I|,|J|,|K|) <= radius.

    Those blocks tile the box [−2R, 2R+1]³ exactly.
    """
    _check_enumeration((2 * radius + 2) ** 3, "block sum")
    lo, hi = -2 * radius, 2 * radius + 1
    return _box_sum(params, ((lo, lo, lo), (hi, hi, hi)), threads)


def s_minus_e_defect(params: SumParams, N: int, threads: Optional[int] = None) -> float:
    """|S_{Π_2N} − E_{Π_2N}|, E taking every block whose lower corner lies in the cube."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    side = 2 * N
    _check_enumeration((2 * side + 2) ** 3, "defect")
    rect = _box_sum(params, ((-side,) * 3, (side,) * 3), threads)
    blocks = _box_sum(params, ((-side,) * 3, (side + 1,) * 3), threads)
    return abs(rect - blocks)


# ---------------------------------------------------------------------------
# Global block sum
# ---------------------------------------------------------------------------

def block_tail_bound(params: SumParams, radius: int) -> float:
    """Bound on Σ |E| over the blocks with Chebyshev radius > R.

    Omitted blocks have nearest corners m ∈ N₀³ with max(m) = t >= 2R + 1;
    there are 3t² + 3t + 1 of them per t, each with |m| >= t. With L = 2R
    and β = s + 3/2 the sum is at most

        C_σ · c_L · ∫_L^∞ (a² + t²)^(1−β) dt,  c_L = 3 + 3/(L+1) + 1/(L+1)².
    """
    s = params.s
    length = 2.0 * radius
    c_l = 3.0 + 3.0 / (length + 1) + 1.0 / (length + 1) ** 2
    if params.a2 == 0.0:
        integral = length ** (-2.0 * s) / (2.0 * s)
    else:
        integral, _ = quad(
            lambda t: (params.a2 + t * t) ** (-0.5 - s), length, np.inf,
            epsabs=0.0, epsrel=1e-10, limit=200,
        )
    return derivative_constant(s) * c_l * integral


def _select_radius(params: SumParams, tol: float, budget: int) -> int:
    if block_tail_bound(params, budget) > tol:
        return budget + 1
    lo, hi = 1, budget
    while lo < hi:
        mid = (lo + hi) // 2
        if block_tail_bound(params, mid) <= tol:
            hi = mid
        else:
            lo = mid + 1
    return lo


def block_global_sum(
    params: SumParams, tol: float, threads: Optional[int] = None
) -> BlockSum:
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    budget = settings.LATSUM_MAX_BLOCK_RADIUS
    radius = _select_radius(params, tol, budget)
    if radius > budget:
        bound = block_tail_bound(params, budget)
        best = blocks_box_sum(params, budget, threads)
        logger.warning(
            "Block sum: tol=%g unreachable within radius %d (tail %.3g)", tol, budget, bound
        )
        raise BudgetExceededError(
            f"tail bound at radius {budget} is {bound:.3g} > tol={tol:g}",
            best_value=best,
            tail_bound=bound,
            radius=budget,
        )
    logger.info("Block sum: a=%g s=%g tol=%g -> radius %d", params.a, params.s, tol, radius)
    return BlockSum(
        params=params,
        radius=radius,
        value=blocks_box_sum(params, radius, threads),
        tail_bound=block_tail_bound(params, radius),
    )
