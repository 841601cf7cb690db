"""
Continuum oracle: the torus kernel of (a² − Δ)^s by periodization.

The whole-space kernel with Fourier transform (a² + |k|²)^(−s) is

    G(r) = r^(2s−3) Ψ(a r) / (2^(1/2+s) π^(3/2) Γ(s)),   Ψ(z) = z^ν K_ν(z),  ν = 3/2 − s,

and Poisson summation turns the lattice series Σ'_k e^{ik·x} (a² + |k|²)^(−s) into

    M(x) = (2π)³ Σ_n G(x − 2πn) − a^(−2s)                 (a > 0)

For a = 0 the node sum only converges once each term is paired with
G(2πn); the pairs are summed over a max-norm cube and a zero-mean
constant restores the missing k = 0 convention.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.special import digamma, gamma

from latsum.config import settings
from latsum.errors import (
    AccuracyError,
    BudgetExceededError,
    DomainError,
    ResourceLimitError,
    SingularPointError,
)
from latsum.pipeline.summation import fsum, map_ordered
from latsum.schemas import GreenEvaluation, KernelParams, Point3

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
CELL_HALF_DIAGONAL = math.sqrt(3.0) * math.pi

_PROBE = np.linspace(0.0, 60.0, 4801)
_LOG_RANGE = 16.0 * math.log(10.0)
_BESSEL_START_STEP = 0.5
_BESSEL_MAX_LEVELS = 12
_BESSEL_RTOL = 1e-13
_BESSEL_CHUNK = 4096
_SINGULAR_EPS = 1e-12
_POINT_CHUNK = 2048
_SLICE_CELLS = 500_000  # points × nodes held per slice


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def gamma_fn(z: float) -> float:
    if z <= 0:
        raise DomainError(f"gamma_fn needs z > 0, got {z}")
    return float(gamma(z))


def _bessel_cutoff(nu: float, z_min: float) -> float:
    """t beyond the peak where e^{−z cosh t} cosh(νt) falls below 1e-16 of its maximum."""
    log_f = -z_min * np.cosh(_PROBE) + np.log(np.cosh(nu * _PROBE))
    peak = int(np.argmax(log_f))
    below = np.flatnonzero(log_f[peak:] < log_f[peak] - _LOG_RANGE)
    if len(below) == 0:
        raise AccuracyError(f"K_{nu:g}({z_min:g}): integrand does not decay on [0, 60]")
    return float(_PROBE[peak + below[0]])


def _bessel_chunk(nu: float, z: np.ndarray) -> np.ndarray:
    t_max = _bessel_cutoff(nu, float(z.min()))
    h = _BESSEL_START_STEP
    t = np.arange(0.0, t_max + h, h)

    def _f(nodes: np.ndarray) -> np.ndarray:
        return np.exp(-np.outer(z, np.cosh(nodes))) @ np.cosh(nu * nodes)

    # integrand is even in t; the half-line trapezoid keeps weight 1/2 at t = 0
    node_sum = _f(t) - 0.5 * np.exp(-z)
    estimate = h * node_sum
    for _ in range(_BESSEL_MAX_LEVELS):
        midpoints = t[:-1] + 0.5 * h
        node_sum = node_sum + _f(midpoints)
        t = np.sort(np.concatenate([t, midpoints]))
        h *= 0.5
        refined = h * node_sum
        if np.all(np.abs(refined - estimate) <= _BESSEL_RTOL * np.abs(refined)):
            return refined
        estimate = refined
    raise AccuracyError(f"K_{nu:g} trapezoid refinement stalled at step {h:g}")


def bessel_k(nu: float, z):
    """K_ν(z) from ∫₀^∞ e^{−z cosh t} cosh(νt) dt by step-halving trapezoid.

    Accepts a scalar or an array of z.
    """
    if not 0 < nu <= 1.5:
        raise DomainError(f"bessel_k order must lie in (0, 3/2], got {nu}")
    z_arr = np.asarray(z, dtype=np.float64)
    if np.any(z_arr <= 0) or not np.all(np.isfinite(z_arr)):
        raise DomainError("bessel_k needs finite z > 0")
    flat = z_arr.ravel()
    out = np.empty_like(flat)
    for lo in range(0, len(flat), _BESSEL_CHUNK):
        out[lo: lo + _BESSEL_CHUNK] = _bessel_chunk(nu, flat[lo: lo + _BESSEL_CHUNK])
    if z_arr.ndim == 0:
        return float(out[0])
    return out.reshape(z_arr.shape)


def _bessel_i_series(order: float, z: float, terms: int = 80) -> float:
    half = 0.5 * z
    k = np.arange(terms)
    logs = (2 * k + order) * math.log(half) - np.array(
        [math.lgamma(v + 1) + math.lgamma(v + order + 1) for v in range(terms)]
    )
    signs = np.sign(gamma(k + order + 1))
    return fsum(signs * np.exp(logs))


def _bessel_k_integer(n: int, z: float, terms: int = 80) -> float:
    """K_n for integer n >= 1 from the logarithmic ascending series."""
    half = 0.5 * z
    head = 0.5 * half ** (-n) * fsum(
        math.factorial(n - k - 1) / math.factorial(k) * (-half * half) ** k
        for k in range(n)
    )
    k = np.arange(terms)
    tail = fsum(
        (digamma(k + 1) + digamma(n + k + 1))
        * np.exp(2 * k * math.log(half) - np.array(
            [math.lgamma(v + 1) + math.lgamma(n + v + 1) for v in range(terms)]
        ))
    )
    return (
        head
        + (-1) ** (n + 1) * math.log(half) * _bessel_i_series(n, z, terms)
        + (-1) ** n * 0.5 * half**n * tail
    )


def _bessel_k_fractional(mu: float, z: float) -> float:
    return math.pi / (2.0 * math.sin(mu * math.pi)) * (
        _bessel_i_series(-mu, z) - _bessel_i_series(mu, z)
    )


def bessel_k_series(nu: float, z: float) -> float:
    """K_ν(z) from ascending series plus the upward recurrence
    K_{μ+1}(z) = K_{μ−1}(z) + (2μ/z) K_μ(z).

    Intended for moderate z (<= 2); the I-series difference loses digits
    as e^{2z}.
    """
    if not 0 < nu <= 1.5:
        raise DomainError(f"bessel_k_series order must lie in (0, 3/2], got {nu}")
    if z <= 0:
        raise DomainError(f"bessel_k_series needs z > 0, got {z}")
    if float(nu).is_integer():
        return _bessel_k_integer(int(nu), z)
    base = nu - math.floor(nu)
    current = _bessel_k_fractional(base, z)
    if nu < 1:
        return current
    below = _bessel_k_fractional(1.0 - base, z)  # K_{μ−1} = K_{1−μ}
    return below + 2.0 * base / z * current


# ---------------------------------------------------------------------------
# Whole-space kernel
# ---------------------------------------------------------------------------

def _prefactor(s: float) -> float:
    return 1.0 / (2.0 ** (0.5 + s) * math.pi**1.5 * gamma_fn(s))


def riesz_coefficient(s: float) -> float:
    """Coefficient of r^(2s−3) in the a = 0 kernel."""
    return gamma_fn(1.5 - s) / (2.0 ** (2 * s) * math.pi**1.5 * gamma_fn(s))


def psi(nu: float, z):
    """Ψ(z) = z^ν K_ν(z), with Ψ(0) = 2^(ν−1) Γ(ν)."""
    z_arr = np.asarray(z, dtype=np.float64)
    out = np.full(z_arr.shape, 2.0 ** (nu - 1) * gamma_fn(nu))
    positive = z_arr > 0
    if np.any(positive):
        zp = z_arr[positive]
        out[positive] = zp**nu * bessel_k(nu, zp)
    return float(out) if out.ndim == 0 else out


def _kernel(p: KernelParams, r: np.ndarray) -> np.ndarray:
    if p.a == 0:
        return riesz_coefficient(p.s) * r ** (2 * p.s - 3)
    return _prefactor(p.s) * r ** (2 * p.s - 3) * psi(p.nu, p.a * r)


def green_whole_space(p: KernelParams, r):
    """Positive-normalization kernel G(r); scalar or array r."""
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any(r_arr <= 0):
        raise DomainError("green_whole_space needs r > 0")
    out = _kernel(p, r_arr)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Node sums
# ---------------------------------------------------------------------------

def wrap_point(x) -> np.ndarray:
    """Reduce x into the cell [−π, π]³."""
    x = np.asarray(x, dtype=np.float64)
    return x - TWO_PI * np.round(x / TWO_PI)


def _reduced(x) -> np.ndarray:
    xw = wrap_point(x)
    if np.all(np.abs(xw) < _SINGULAR_EPS):
        raise SingularPointError(f"x={tuple(x)} lies on the 2πZ³ lattice")
    return xw


def _slice_nodes(n1: int, radius: int) -> np.ndarray:
    k = np.arange(-radius, radius + 1)
    n2, n3 = np.meshgrid(k, k, indexing="ij")
    return np.stack([np.full(n2.size, n1), n2.ravel(), n3.ravel()], axis=1)


def _node_sums(
    points: np.ndarray,
    radius: int,
    term: Callable[[np.ndarray, np.ndarray], np.ndarray],
    threads: Optional[int],
) -> np.ndarray:
    """Σ_{|n|∞ <= radius} term(points, nodes) per point, slice-ordered fsum."""

    def _slice(n1: int) -> list[float]:
        nodes = TWO_PI * _slice_nodes(n1, radius)
        block = term(points, nodes)
        return [fsum(row) for row in block]

    partials = map_ordered(_slice, range(-radius, radius + 1), threads)
    return np.array([fsum(col) for col in zip(*partials)])


# ---------------------------------------------------------------------------
# a > 0: exponentially convergent periodization
# ---------------------------------------------------------------------------

def _psi_envelope(nu: float) -> float:
    """C with Ψ(z) <= C e^{−z/2} for z >= 1 (from K_ν <= K_{3/2} <= 2√(π/2z) e^{−z})."""
    q = nu - 0.5
    sup = math.exp(-0.5) if 2 * q <= 1 else (2 * q) ** q * math.exp(-q)
    return 2.0 * math.sqrt(math.pi / 2.0) * sup


def exponential_tail(p: KernelParams, v0: float) -> float:
    """Bound (safety factor 10) on (2π)³ Σ G over nodes farther than v0 + 2√3π.

    Each node's cell lies beyond v0 + √3π, and G at the node is dominated by
    its envelope at any cell point shifted back by √3π.
    """
    coef = _prefactor(p.s) * _psi_envelope(p.nu)
    integral, _ = quad(
        lambda v: (v + CELL_HALF_DIAGONAL) ** 2 * v ** (2 * p.s - 3) * math.exp(-0.5 * p.a * v),
        v0, np.inf, epsabs=0.0, epsrel=1e-10, limit=200,
    )
    return 10.0 * 4.0 * math.pi * coef * integral


def _exponential_cutoff(p: KernelParams, tol: float) -> float:
    lo = hi = max(1.0 / p.a, 1.0)
    if exponential_tail(p, hi) > tol:
        for _ in range(200):
            lo, hi = hi, 2.0 * hi
            if exponential_tail(p, hi) <= tol:
                break
        else:
            raise AccuracyError(f"no cutoff reaches tol={tol:g}")
        while hi - lo > 1e-3 * hi:
            mid = 0.5 * (lo + hi)
            if exponential_tail(p, mid) <= tol:
                hi = mid
            else:
                lo = mid
    return hi


def periodized_green(
    p: KernelParams, x: Point3, tol: float, threads: Optional[int] = None
) -> GreenEvaluation:
    if p.a <= 0:
        raise DomainError("periodized_green needs a > 0; use periodized_green_zero_a")
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    xw = _reduced(x)
    reach = float(np.linalg.norm(xw))
    v0 = _exponential_cutoff(p, tol)
    radius = max(1, math.ceil((v0 + 2 * CELL_HALF_DIAGONAL + reach) / TWO_PI))
    budget = settings.LATSUM_MAX_NODE_RADIUS

    def _term(points: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(points[:, None, :] - nodes[None, :, :], axis=2)
        return _kernel(p, dist)

    def _assemble(r: int) -> float:
        total = _node_sums(xw[None, :], r, _term, threads)[0]
        return TWO_PI**3 * total - p.a ** (-2 * p.s)

    if radius > 2 * budget:
        logger.warning("Periodization: tol=%g needs node radius %d >> %d", tol, radius, budget)
        raise ResourceLimitError(
            f"node radius {radius} is more than twice the budget {budget}; "
            f"raise a, loosen tol or raise LATSUM_MAX_NODE_RADIUS"
        )
    if radius > budget:
        v_budget = TWO_PI * budget - reach - 2 * CELL_HALF_DIAGONAL
        bound = exponential_tail(p, v_budget) if p.a * v_budget >= 1 else math.inf
        logger.warning("Periodization: tol=%g needs node radius %d > %d", tol, radius, budget)
        raise BudgetExceededError(
            f"node radius {radius} exceeds budget {budget}",
            best_value=_assemble(budget),
            tail_bound=bound,
            radius=budget,
        )

    logger.info("Periodization: a=%g s=%g tol=%g -> node radius %d", p.a, p.s, tol, radius)
    return GreenEvaluation(
        x=tuple(float(c) for c in x),
        value=_assemble(radius),
        truncation_radius=radius,
        error_estimate=exponential_tail(p, v0),
    )


# ---------------------------------------------------------------------------
# a = 0: paired differences, far-field correction, zero-mean constant
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def face_integral(beta: float) -> float:
    """∫∫_{[−1,1]²} (1 + p² + q²)^β by refined Gauss–Legendre tensor grids."""
    previous = None
    for order in (16, 32, 64, 128, 256):
        nodes, weights = leggauss(order)
        p2 = nodes[:, None] ** 2 + nodes[None, :] ** 2
        value = float(weights @ (1.0 + p2) ** beta @ weights)
        if previous is not None and abs(value - previous) <= 1e-13 * abs(value):
            return value
        previous = value
    raise AccuracyError(f"face integral with exponent {beta:g} did not converge")


def ball_integral(s: float, rho: float) -> float:
    """∫_{|x| <= ρ} of the a = 0 kernel: c₀ · 4π ρ^(2s) / (2s)."""
    return riesz_coefficient(s) * 4.0 * math.pi * rho ** (2 * s) / (2 * s)


def _cube_remainder(s: float, half_side: float) -> float:
    """∫ over [−L, L]³ minus the inscribed ball B_L, both of the a = 0 kernel.

    With ∇·(x r^α) = 2s r^α both regions reduce to boundary fluxes: the six
    faces give 6L ∫∫ (L² + u² + v²)^(α/2), the sphere gives 4π L^(2s).
    """
    alpha = 2 * s - 3
    flux = 6.0 * face_integral(alpha / 2) - 4.0 * math.pi
    return riesz_coefficient(s) * half_side ** (2 * s) * flux / (2 * s)


def cube_integral(s: float, half_side: float) -> float:
    """∫ over [−L, L]³ of the a = 0 kernel: analytic ball plus smooth remainder."""
    return ball_integral(s, half_side) + _cube_remainder(s, half_side)


def far_field_coefficient(s: float, radius: int) -> float:
    """Q_R: nodes beyond the cube add ≈ Q_R |x|² to the paired sum.

    Cubic symmetry leaves (|x|²/6) Σ ΔG over the omitted nodes; the node sum
    is the midpoint rule for the integral of ΔG outside the cube of half-side
    L = 2π(R + 1/2), which is minus the outward flux of ∇G through its faces.
    """
    alpha = 2 * s - 3
    half_side = TWO_PI * (radius + 0.5)
    c0 = riesz_coefficient(s)
    outside = -6.0 * c0 * alpha * half_side ** (alpha + 1) * face_integral(alpha / 2 - 1)
    return outside / (6.0 * TWO_PI**3)


def _check_zero_a(s: float, radius: int) -> None:
    if not 0 < s < 1:
        raise DomainError(f"the a = 0 oracle needs 0 < s < 1, got s={s}")
    if radius < 1:
        raise DomainError(f"radius must be >= 1, got {radius}")
    if radius > settings.LATSUM_MAX_NODE_RADIUS:
        raise ResourceLimitError(
            f"node radius {radius} exceeds budget {settings.LATSUM_MAX_NODE_RADIUS}"
        )


def _paired_term(s: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    alpha = 2 * s - 3
    c0 = riesz_coefficient(s)

    def _term(points: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(points[:, None, :] - nodes[None, :, :], axis=2)
        anchor = np.linalg.norm(nodes, axis=1)
        with np.errstate(divide="ignore"):
            reference = np.where(anchor > 0, anchor, np.inf) ** alpha
        return c0 * (dist**alpha - reference[None, :])

    return _term


@lru_cache(maxsize=None)
def zero_mean_constant(s: float, radius: int, threads: Optional[int] = None) -> float:
    """C₀' making the torus average of the assembled a = 0 kernel vanish."""
    _check_zero_a(s, radius)
    alpha = 2 * s - 3
    c0 = riesz_coefficient(s)

    def _anchor_term(points: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        anchor = np.linalg.norm(nodes, axis=1)
        with np.errstate(divide="ignore"):
            values = np.where(anchor > 0, anchor, np.inf) ** alpha
        return c0 * values[None, :]

    lattice = TWO_PI**3 * _node_sums(np.zeros((1, 3)), radius, _anchor_term, threads)[0]
    cube = cube_integral(s, TWO_PI * (radius + 0.5))
    quadratic = far_field_coefficient(s, radius) * 8.0 * math.pi**5
    return -(cube - lattice + quadratic)


def _zero_a_error(s: float, radius: int) -> float:
    """Fourth-order Taylor estimate of what the corrected cube sum leaves out.

    |∂_u⁴ r^α| <= |α|(|α|+1)(|α|+2)(|α|+3) r^(α−4); counted for the point
    value and for the constant, each doubled for the midpoint rule.
    """
    alpha = 2 * s - 3
    b = -alpha
    fourth = b * (b + 1) * (b + 2) * (b + 3)
    rho0 = TWO_PI * (radius + 0.5) - CELL_HALF_DIAGONAL
    reach4 = (3.0 * math.pi**2) ** 2
    per_point = riesz_coefficient(s) * reach4 * fourth / 24.0 * 4.0 * math.pi
    per_point *= rho0 ** (alpha - 1) / (1 - alpha)
    return 4.0 * per_point


def green_zero_a_values(
    s: float, points, radius: int, threads: Optional[int] = None
) -> np.ndarray:
    """Assembled a = 0 torus kernel at each row of ``points`` (shape (m, 3))."""
    _check_zero_a(s, radius)
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    wrapped = wrap_point(pts)
    if np.any(np.all(np.abs(wrapped) < _SINGULAR_EPS, axis=1)):
        raise SingularPointError("a point lies on the 2πZ³ lattice")
    q = far_field_coefficient(s, radius)
    term = _paired_term(s)
    step = max(1, min(_POINT_CHUNK, _SLICE_CELLS // (2 * radius + 1) ** 2))
    out = np.empty(len(wrapped))
    for lo in range(0, len(wrapped), step):
        chunk = wrapped[lo: lo + step]
        paired = _node_sums(chunk, radius, term, threads)
        out[lo: lo + step] = TWO_PI**3 * (paired + q * np.sum(chunk**2, axis=1))
    return out + zero_mean_constant(s, radius, threads)


def periodized_green_zero_a(
    s: float, x: Point3, radius: int, threads: Optional[int] = None
) -> GreenEvaluation:
    _check_zero_a(s, radius)
    xw = _reduced(x)
    value = float(green_zero_a_values(s, xw[None, :], radius, threads)[0])
    logger.info("Zero-a periodization: s=%g radius=%d value=%.12g", s, radius, value)
    return GreenEvaluation(
        x=tuple(float(c) for c in x),
        value=value,
        truncation_radius=radius,
        error_estimate=_zero_a_error(s, radius),
    )
