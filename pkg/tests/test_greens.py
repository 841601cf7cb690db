"""
Unit tests for the periodized-kernel oracle — Bessel functions, whole-space
kernel, exponential periodization and the a = 0 paired sums.
"""
import math

import numpy as np
import pytest
from scipy.special import kv

from latsum.config import settings
from latsum.errors import (
    BudgetExceededError,
    DomainError,
    ResourceLimitError,
    SingularPointError,
)
from latsum.pipeline.greens import (
    ball_integral,
    bessel_k,
    bessel_k_series,
    cube_integral,
    gamma_fn,
    green_whole_space,
    green_zero_a_values,
    periodized_green,
    periodized_green_zero_a,
    riesz_coefficient,
    wrap_point,
)
from latsum.pipeline.series import (
    build_phase_shells,
    cesaro_sum,
    fourier_cesaro_eval,
)
from latsum.schemas import CesaroConfig, KernelParams, SumParams
from tests.conftest import MADELUNG_NACL, PI3

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def nacl_zero_a():
    return periodized_green_zero_a(0.5, PI3, 200)


# =====================================================================
# Special functions
# =====================================================================
class TestSpecialFunctions:
    @pytest.mark.parametrize(
        "z, expected",
        [(0.5, math.sqrt(math.pi)), (1.0, 1.0), (1.5, math.sqrt(math.pi) / 2), (5.0, 24.0)],
    )
    def test_gamma(self, z, expected):
        assert gamma_fn(z) == pytest.approx(expected, rel=1e-14)

    def test_gamma_domain(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)

    def test_half_order_closed_form(self):
        z = np.linspace(0.1, 20.0, 60)
        closed = np.sqrt(math.pi / (2 * z)) * np.exp(-z)
        np.testing.assert_allclose(bessel_k(0.5, z), closed, rtol=1e-10)

    @pytest.mark.parametrize("nu", [0.25, 0.5, 1.0, 1.25, 1.5])
    @pytest.mark.parametrize("z", [0.05, 0.7, 3.0, 25.0])
    def test_integral_agrees_with_scipy(self, nu, z):
        assert bessel_k(nu, z) == pytest.approx(float(kv(nu, z)), rel=1e-10)

    @pytest.mark.parametrize("nu", [0.25, 0.5, 0.9, 1.0, 1.25, 1.5])
    @pytest.mark.parametrize("z", [0.1, 1.0, 2.0])
    def test_series_agrees_with_integral(self, nu, z):
        assert bessel_k_series(nu, z) == pytest.approx(bessel_k(nu, z), rel=1e-9)

    def test_unit_order_value(self):
        assert bessel_k_series(1.0, 1.0) == pytest.approx(0.6019072301972346, abs=1e-9)

    def test_scalar_and_array_shapes(self):
        assert isinstance(bessel_k(1.0, 2.0), float)
        assert bessel_k(1.0, np.ones((2, 3))).shape == (2, 3)

    @pytest.mark.parametrize("nu, z", [(2.0, 1.0), (0.0, 1.0), (0.5, -1.0), (0.5, 0.0)])
    def test_bessel_domain(self, nu, z):
        with pytest.raises(DomainError):
            bessel_k(nu, z)


# =====================================================================
# Whole-space kernel
# =====================================================================
class TestWholeSpaceKernel:
    def test_coulomb_case(self):
        p = KernelParams(a=0.0, s=0.5)
        assert green_whole_space(p, 1.0) == pytest.approx(1 / (2 * math.pi**2), rel=1e-14)
        assert green_whole_space(p, 2.0) == pytest.approx(1 / (4 * math.pi**2), rel=1e-14)

    @pytest.mark.parametrize("s", [0.3, 0.5, 1.0])
    def test_small_mass_limit(self, s):
        screened = green_whole_space(KernelParams(a=1e-4, s=s), 1.0)
        assert screened == pytest.approx(riesz_coefficient(s), rel=1e-3)

    def test_exponential_decay(self):
        p = KernelParams(a=1.0, s=1.0)
        assert green_whole_space(p, 10.0) < 1e-3 * green_whole_space(p, 1.0)

    def test_screened_yukawa(self):
        # s = 1: e^{−ar} / (4πr)
        p = KernelParams(a=2.0, s=1.0)
        r = np.array([0.3, 1.0, 4.0])
        np.testing.assert_allclose(
            green_whole_space(p, r), np.exp(-2.0 * r) / (4 * math.pi * r), rtol=1e-10
        )

    @pytest.mark.parametrize("a", [0.0, 0.5, 3.0])
    def test_positive(self, a):
        r = np.linspace(0.05, 8.0, 40)
        assert np.all(green_whole_space(KernelParams(a=a, s=0.75), r) > 0)

    def test_rejects_origin(self):
        with pytest.raises(DomainError):
            green_whole_space(KernelParams(a=1.0, s=1.0), 0.0)

    def test_ball_integral(self):
        assert ball_integral(0.5, 1.0) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_cube_contains_ball(self):
        assert cube_integral(0.5, 1.0) > ball_integral(0.5, 1.0)
        assert cube_integral(0.5, 1.0) < ball_integral(0.5, math.sqrt(3.0))


# =====================================================================
# a > 0 periodization
# =====================================================================
class TestPeriodizedGreen:
    @pytest.mark.parametrize("x", [(0.0, 0.0, 0.0), (TWO_PI, 0.0, -TWO_PI)])
    def test_singular_points(self, x):
        with pytest.raises(SingularPointError):
            periodized_green(KernelParams(a=1.0, s=1.0), x, 1e-6)

    def test_needs_positive_mass(self):
        with pytest.raises(DomainError):
            periodized_green(KernelParams(a=0.0, s=0.5), PI3, 1e-6)

    @pytest.mark.parametrize("a, s", [(2.0, 1.0), (1.0, 0.5)])
    def test_matches_cesaro_means(self, r3_table, a, s):
        oracle = periodized_green(KernelParams(a=a, s=s), PI3, 1e-8)
        spheres = cesaro_sum(r3_table, SumParams(a=a, s=s), CesaroConfig(kappa=2, max_n=5000))
        assert oracle.value == pytest.approx(spheres, abs=1e-2)

    def test_error_estimate_within_tolerance(self):
        result = periodized_green(KernelParams(a=2.0, s=1.0), PI3, 1e-8)
        assert result.error_estimate <= 1e-8
        assert result.truncation_radius >= 1

    def test_screening_shrinks_value(self):
        weak = periodized_green(KernelParams(a=2.0, s=1.0), PI3, 1e-8)
        strong = periodized_green(KernelParams(a=5.0, s=1.0), PI3, 1e-8)
        assert abs(strong.value) < abs(weak.value)

    def test_periodic(self):
        p = KernelParams(a=2.0, s=1.0)
        x = (1.0, 0.5, 2.0)
        shifted = (1.0 + TWO_PI, 0.5 - 2 * TWO_PI, 2.0)
        assert periodized_green(p, shifted, 1e-8).value == pytest.approx(
            periodized_green(p, x, 1e-8).value, rel=1e-12
        )

    def test_budget_exceeded(self, monkeypatch):
        p = KernelParams(a=1.0, s=1.0)
        needed = periodized_green(p, PI3, 1e-10).truncation_radius
        monkeypatch.setattr(settings, "LATSUM_MAX_NODE_RADIUS", needed - 1)
        with pytest.raises(BudgetExceededError) as info:
            periodized_green(p, PI3, 1e-10)
        assert info.value.radius == needed - 1
        assert math.isfinite(info.value.best_value)

    def test_far_over_budget_fails_fast(self):
        # a = 1e-3 needs thousands of node shells; nothing is assembled
        with pytest.raises(ResourceLimitError) as info:
            periodized_green(KernelParams(a=1e-3, s=0.5), PI3, 1e-3)
        assert not isinstance(info.value, BudgetExceededError)
        assert "twice the budget" in str(info.value)

    def test_fourier_means_at_general_point(self):
        x = (1.0, 0.5, 2.0)
        params = SumParams(a=1.0, s=1.0)
        target = periodized_green(KernelParams(a=1.0, s=1.0), x, 1e-8).value
        phase = build_phase_shells(x, 5000)
        errors = {
            n: abs(fourier_cesaro_eval(phase, params, CesaroConfig(kappa=2, max_n=n)) - target)
            for n in (500, 2000, 5000)
        }
        assert errors[5000] < errors[500]
        assert errors[5000] < 1e-2

    def test_fourier_means_lock_on_oracle(self):
        params = SumParams(a=2.0, s=1.0)
        target = periodized_green(KernelParams(a=2.0, s=1.0), PI3, 1e-10).value
        phase = build_phase_shells(PI3, 10_000)
        errors = {
            n: abs(fourier_cesaro_eval(phase, params, CesaroConfig(kappa=2, max_n=n)) - target)
            for n in (500, 1000, 2000, 5000, 10_000)
        }
        # not monotone in N; decays by more than a decade past N = 2000
        assert errors[2000] < errors[500] / 10
        assert errors[5000] < errors[500] / 10
        assert errors[10_000] < 1e-6


# =====================================================================
# a = 0 periodization
# =====================================================================
class TestZeroMass:
    def test_madelung_constant(self, nacl_zero_a):
        assert nacl_zero_a.value == pytest.approx(MADELUNG_NACL, abs=1e-3)
        assert nacl_zero_a.truncation_radius == 200

    def test_reflection_symmetry(self):
        x = np.array([0.7, -1.3, 2.2])
        plus, minus = green_zero_a_values(0.5, np.stack([x, -x]), 20)
        assert plus == pytest.approx(minus, rel=1e-12)

    def test_periodic(self):
        x = np.array([0.4, 1.1, -2.0])
        values = green_zero_a_values(0.75, np.stack([x, x + TWO_PI * np.array([1, -1, 3])]), 10)
        assert values[0] == pytest.approx(values[1], rel=1e-12)

    def test_successive_radii_converge(self, nacl_zero_a):
        values = [periodized_green_zero_a(0.5, PI3, r).value for r in (50, 100)]
        values.append(nacl_zero_a.value)
        d1 = abs(values[1] - values[0])
        d2 = abs(values[2] - values[1])
        assert 1 <= d1 / d2 <= 16

    @pytest.mark.parametrize("s", [0.5, 0.75])
    def test_zero_torus_mean(self, s):
        m = 48
        h = TWO_PI / m
        axis = -math.pi + h * (np.arange(m) + 0.5)
        grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
        values = green_zero_a_values(s, grid, 4)
        # smooth remainder after removing the central singularity
        r = np.linalg.norm(grid, axis=1)
        smooth = values - TWO_PI**3 * riesz_coefficient(s) * r ** (2 * s - 3)
        mean = float(np.mean(smooth)) + cube_integral(s, math.pi)
        assert mean == pytest.approx(0.0, abs=2e-3)

    def test_near_origin_singularity(self):
        s = 0.5
        x = 0.05 * np.array([1.0, 2.0, 2.0]) / 3.0
        value = green_zero_a_values(s, x[None, :], 20)[0]
        scaled = value * np.linalg.norm(x) ** (3 - 2 * s)
        assert scaled == pytest.approx(TWO_PI**3 * riesz_coefficient(s), rel=0.05)

    def test_finite_along_diagonal(self):
        t = np.linspace(0.3, 3.0, 10)
        values = green_zero_a_values(0.5, np.stack([t, t, t], axis=1), 10)
        assert np.all(np.isfinite(values))
        # distance from the origin grows along the ray until the cell corner
        assert np.all(np.diff(values) < 0)

    @pytest.mark.parametrize("s", [1.0, 1.2])
    def test_rejects_large_exponent(self, s):
        with pytest.raises(DomainError):
            periodized_green_zero_a(s, PI3, 10)

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            periodized_green_zero_a(0.5, (TWO_PI, 0.0, 0.0), 10)

    def test_radius_budget(self, monkeypatch):
        monkeypatch.setattr(settings, "LATSUM_MAX_NODE_RADIUS", 5)
        with pytest.raises(ResourceLimitError):
            periodized_green_zero_a(0.5, PI3, 6)

    def test_small_mass_limit(self, nacl_zero_a):
        screened = periodized_green(KernelParams(a=0.05, s=0.5), PI3, 1e-3)
        assert screened.value == pytest.approx(nacl_zero_a.value, abs=1e-2)

    def test_wrap_point(self):
        wrapped = wrap_point([3 * math.pi + 0.5, -TWO_PI, 0.25])
        np.testing.assert_allclose(wrapped, [-math.pi + 0.5, 0.0, 0.25], atol=1e-12)
