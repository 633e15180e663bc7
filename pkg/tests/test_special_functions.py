"""Tests for the F_q/G_q quadrature and the normal distribution function.

High-precision reference values were frozen from a 50-digit mpmath
computation (tanh-sinh quadrature of the defining integral, erfc for
the normal distribution function) run independently of this package;
a live mpmath cross-check on a small sweep keeps the two routes honest.
"""

import math

import pytest
from mpmath import mp, mpf
from mpmath import erfc as mp_erfc
from mpmath import exp as mp_exp
from mpmath import inf as mp_inf
from mpmath import quad as mp_quad

from bridgestop import (
    ConvergenceError,
    DomainError,
    QuadratureSettings,
    big_f,
    big_f_prime,
    big_g,
    big_g_prime,
    fg_sum,
    fg_sum_prime,
    phi_cdf,
)
from bridgestop.special_functions import SQRT_2PI, erf, erfc, erfcx

mp.dps = 30

# frozen 50-digit references
PHI_AT_1 = 0.8413447460685429485852325456320379224779129667266043
F_1_AT_1 = 3.4770518117036944669256848732276559152844907423229
F_2_AT_HALF = 1.9820087476789968768435617897769522012762562971304

Y_GRID = [x / 10.0 for x in range(-40, 41, 5)]


class TestPhi:
    def test_symmetry_point(self):
        assert phi_cdf(0.0) == 0.5

    def test_tail_limit(self):
        assert abs(phi_cdf(40.0) - 1.0) <= 1e-15

    def test_frozen_value(self):
        assert phi_cdf(1.0) == pytest.approx(PHI_AT_1, rel=5e-16, abs=0)

    @pytest.mark.parametrize("y", Y_GRID)
    def test_complement(self, y):
        assert phi_cdf(y) + phi_cdf(-y) == pytest.approx(1.0, abs=1e-15)

    def test_monotone(self):
        values = [phi_cdf(y) for y in Y_GRID]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert all(0.0 < v < 1.0 for v in values)

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            phi_cdf(bad)

    @pytest.mark.parametrize("y", [-8.0, -2.3, -0.4, 0.0, 0.3, 1.7, 6.0, 20.0])
    def test_against_mpmath(self, y):
        ref = float(mp_erfc(-mpf(y) / mp.sqrt(2)) / 2)
        assert phi_cdf(y) == pytest.approx(ref, rel=5e-15)


class TestErfFamily:
    @pytest.mark.parametrize("x", [-6.0, -1.0, -0.2, 0.0, 0.2, 1.0, 6.0, 25.0])
    def test_erf_erfc_against_mpmath(self, x):
        assert erf(x) == pytest.approx(float(1 - mp_erfc(mpf(x))), rel=2e-15, abs=1e-300)
        if erfc(x) != 0.0:
            assert erfc(x) == pytest.approx(float(mp_erfc(mpf(x))), rel=2e-15)

    @pytest.mark.parametrize("x", [-5.0, -0.3, 0.0, 0.4, 2.0, 10.0, 1e4])
    def test_erfcx_against_mpmath(self, x):
        ref = float(mp_exp(mpf(x) ** 2) * mp_erfc(mpf(x)))
        assert erfcx(x) == pytest.approx(ref, rel=5e-14)

    def test_erfcx_overflow_side(self):
        assert erfcx(-27.0) == math.inf


def _mp_big_f(q, y):
    q, y = mpf(q), mpf(y)
    return mp_quad(lambda u: u ** (q - 1) * mp_exp(y * u - u * u / 2), [0, mp_inf])


class TestBigF:
    def test_trivial_points(self):
        assert big_f(1.0, 0.0).value == pytest.approx(SQRT_2PI / 2.0, rel=1e-12)
        assert big_f(2.0, 0.0).value == pytest.approx(1.0, rel=1e-12)
        assert big_f(3.0, 0.0).value == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-12)

    def test_frozen_value(self):
        assert big_f(1.0, 1.0).value == pytest.approx(F_1_AT_1, rel=1e-12)

    @pytest.mark.parametrize("q", [0.4, 1.0, 2.5, 7.0])
    @pytest.mark.parametrize("y", [-6.0, -1.0, 0.0, 2.0, 9.0])
    def test_against_mpmath(self, q, y):
        assert big_f(q, y).value == pytest.approx(float(_mp_big_f(q, y)), rel=5e-12)

    @pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("y", Y_GRID)
    def test_error_estimate_contract(self, q, y):
        out = big_f(q, y)
        assert out.value > 0.0
        assert out.est_error <= max(1e-12 * abs(out.value), 1e-300)

    @pytest.mark.parametrize("y", Y_GRID)
    def test_q1_closed_form(self, y):
        closed = SQRT_2PI * math.exp(y * y / 2.0) * phi_cdf(y)
        assert big_f(1.0, y).value == pytest.approx(closed, rel=1e-10)

    @pytest.mark.parametrize("q", [0.7, 1.0, 3.0])
    def test_monotone_in_y(self, q):
        values = [big_f(q, y).value for y in Y_GRID]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("bad_q", [0.0, -1.0, math.nan])
    def test_bad_order(self, bad_q):
        with pytest.raises(DomainError):
            big_f(bad_q, 0.0)

    def test_bad_argument(self):
        with pytest.raises(DomainError):
            big_f(1.0, math.inf)

    def test_convergence_error_carries_estimate(self):
        settings = QuadratureSettings(rel_tol=1e-18, abs_tol=1e-300, max_subdivisions=1)
        with pytest.raises(ConvergenceError) as info:
            big_f(0.5, 3.0, settings)
        assert info.value.est_error > 0.0
        assert info.value.value == pytest.approx(big_f(0.5, 3.0).value, rel=1e-9)

    def test_settings_validation(self):
        with pytest.raises(DomainError):
            QuadratureSettings(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureSettings(max_subdivisions=0)


class TestSymmetryAndSums:
    @pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("y", [-3.0, -1.3, 0.0, 1.3, 3.0])
    def test_g_is_f_mirrored_bitwise(self, q, y):
        assert big_g(q, y).value == big_f(q, -y).value

    def test_g_trivial(self):
        assert big_g(1.0, 0.0).value == pytest.approx(1.2533141373155003, rel=1e-12)
        closed = SQRT_2PI * math.exp(2.0) * phi_cdf(-2.0)
        assert big_g(1.0, 2.0).value == pytest.approx(closed, rel=1e-10)
        assert big_g(2.0, -3.0).value == big_f(2.0, 3.0).value

    @pytest.mark.parametrize("q", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("y", [0.4, 1.3, 2.8])
    def test_sum_even_bitwise(self, q, y):
        assert fg_sum(q, y).value == fg_sum(q, -y).value

    def test_sum_trivial(self):
        assert fg_sum(1.0, 0.0).value == pytest.approx(SQRT_2PI, rel=1e-12)
        assert fg_sum(2.0, 0.0).value == pytest.approx(2.0 * big_f(2.0, 0.0).value, rel=1e-14)

    @pytest.mark.parametrize("y", Y_GRID)
    def test_sum_q1_closed_form(self, y):
        assert fg_sum(1.0, y).value == pytest.approx(SQRT_2PI * math.exp(y * y / 2.0), rel=1e-10)


class TestDerivatives:
    def test_prime_is_next_order(self):
        assert big_f_prime(1.0, 0.0).value == big_f(2.0, 0.0).value
        assert big_f_prime(2.0, -1.0).value == big_f(3.0, -1.0).value

    def test_prime_matches_finite_difference(self):
        # independent oracle: central difference of the order-1 integral
        h = 1e-5
        fd = (big_f(1.0, 0.5 + h).value - big_f(1.0, 0.5 - h).value) / (2.0 * h)
        assert big_f_prime(1.0, 0.5).value == pytest.approx(fd, rel=1e-8)
        assert big_f_prime(1.0, 0.5).value == pytest.approx(F_2_AT_HALF, rel=1e-12)

    @pytest.mark.parametrize("y", [-2.0, 0.0, 1.5])
    def test_g_prime_sign(self, y):
        h = 1e-5
        fd = (big_g(2.0, y + h).value - big_g(2.0, y - h).value) / (2.0 * h)
        assert big_g_prime(2.0, y).value == pytest.approx(fd, rel=1e-7)

    @pytest.mark.parametrize("y", [-2.0, 0.0, 1.5])
    def test_fg_sum_prime(self, y):
        h = 1e-5
        fd = (fg_sum(3.0, y + h).value - fg_sum(3.0, y - h).value) / (2.0 * h)
        assert fg_sum_prime(3.0, y).value == pytest.approx(fd, rel=1e-7, abs=1e-7)

    def test_fg_sum_prime_vanishes_at_zero(self):
        assert abs(fg_sum_prime(2.5, 0.0).value) < 1e-13


class TestRecurrences:
    Y_FINE = [x / 10.0 for x in range(-40, 41)]

    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0, 5.0])
    def test_three_term_recurrence(self, q):
        for y in self.Y_FINE:
            lhs = big_f(q + 1.0, y).value
            rhs = y * big_f(q, y).value + (q - 1.0) * big_f(q - 1.0, y).value
            assert abs(lhs - rhs) < 1e-8 * abs(lhs), (q, y)

    def test_boundary_recurrence(self):
        for y in self.Y_FINE:
            lhs = big_f(2.0, y).value
            rhs = y * big_f(1.0, y).value + 1.0
            assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0), y

    @pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 4.0])
    def test_ode(self, q):
        for y in self.Y_FINE[::2]:
            f2 = big_f(q + 2.0, y).value
            residual = f2 - y * big_f(q + 1.0, y).value - q * big_f(q, y).value
            assert abs(residual) < 1e-8 * f2, (q, y)
