import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whitham_lab.symbols import (SERIES_SWITCH, DomainError, e_aux, japanese_bracket, k_symbol,
                                 m_double_prime, m_prime, m_symbol, symbol_bounds_scan,
                                 symbol_point)

mp.mp.dps = 40

# frozen high-precision references (mpmath, 40 digits)
K_1 = 0.8726936208978296915
K_4 = 0.4998322968104069613
E_1 = 0.8134302039235093838


def mp_k(r):
    r = mp.mpf(r)
    return mp.sqrt(mp.tanh(r) / r) if r != 0 else mp.mpf(1)


def mp_m(r):
    return mp.mpf(r) * mp_k(r)


class TestKSymbol:
    def test_zero_is_limit_one(self):
        assert k_symbol(0.0) == 1.0

    def test_reference_values(self):
        assert k_symbol(1.0) == pytest.approx(K_1, rel=1e-15)
        assert k_symbol(4.0) == pytest.approx(K_4, rel=1e-15)

    def test_relative_error_over_wide_range(self):
        r = np.concatenate([np.linspace(0, 2, 401), np.geomspace(2, 1e6, 400)])
        ours = k_symbol(r)
        ref = np.array([float(mp_k(x)) for x in r])
        assert np.max(np.abs(ours / ref - 1)) <= 1e-14

    def test_continuous_across_series_switch(self):
        r = SERIES_SWITCH
        lo, hi = k_symbol(np.nextafter(r, 0)), k_symbol(r)
        assert abs(lo - hi) <= 4e-16

    @pytest.mark.parametrize("bad", [-1e-300, -1.0, np.nan, np.inf])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            k_symbol(bad)

    def test_array_shape_preserved(self):
        r = np.ones((3, 4))
        assert k_symbol(r).shape == (3, 4)


class TestMSymbol:
    def test_zero(self):
        assert m_symbol(0.0) == 0.0

    @given(st.floats(-1e4, 1e4, allow_nan=False))
    def test_odd_in_1d(self, xi):
        assert m_symbol(-xi) == -m_symbol(xi)

    def test_2d_radial(self):
        assert m_symbol(np.array([3.0, 4.0]), d=2) == pytest.approx(5 * k_symbol(5.0), rel=1e-15)

    def test_2d_needs_pairs(self):
        with pytest.raises(ValueError):
            m_symbol(np.ones(3), d=2)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            m_symbol(np.nan)

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            m_symbol(1.0, d=3)


class TestDerivatives:
    def test_m_prime_at_zero(self):
        assert m_prime(0.0) == 1.0

    def test_m_prime_finite_difference_at_one(self):
        h = 1e-5
        fd = (m_symbol(1 + h) - m_symbol(1 - h)) / (2 * h)
        assert abs(m_prime(1.0) - fd) <= 1e-8

    def test_m_prime_high_precision(self):
        r = np.geomspace(1e-3, 1e3, 60)
        ref = np.array([float(mp.diff(mp_m, x)) for x in r])
        assert np.max(np.abs(m_prime(r) / ref - 1)) <= 1e-13

    def test_m_prime_large_r_asymptote(self):
        assert abs(m_prime(1e4) * math.sqrt(1e4) - 0.5) <= 1e-3

    def test_m_double_prime_at_zero(self):
        assert m_double_prime(0.0) == 0.0

    def test_m_double_prime_second_difference_at_one(self):
        h = 1e-4
        fd = (m_symbol(1 + h) - 2 * m_symbol(1.0) + m_symbol(1 - h)) / h**2
        assert abs(m_double_prime(1.0) - fd) <= 1e-6

    def test_m_double_prime_high_precision(self):
        r = np.geomspace(1e-3, 1e3, 60)
        ref = np.array([float(mp.diff(mp_m, x, 2)) for x in r])
        assert np.max(np.abs(m_double_prime(r) / ref - 1)) <= 1e-12

    @pytest.mark.parametrize("r", [0.01, 1.0, 100.0])
    def test_m_double_prime_negative(self, r):
        assert np.sign(m_double_prime(r)) == -1

    def test_finite_differences_at_random_points(self, rng):
        r = rng.uniform(1e-2, 1e2, 100)
        fd1 = (m_symbol(r + 1e-5) - m_symbol(r - 1e-5)) / 2e-5
        fd2 = (m_symbol(r + 1e-3) - 2 * m_symbol(r) + m_symbol(r - 1e-3)) / 1e-6
        assert np.max(np.abs(m_prime(r) - fd1)) <= 1e-8
        assert np.max(np.abs(m_double_prime(r) - fd2)) <= 1e-6

    def test_m_prime_strictly_decreasing(self):
        r = np.geomspace(1e-4, 1e6, 2000)
        assert np.all(np.diff(m_prime(r)) < 0)

    @settings(max_examples=200)
    @given(st.floats(0.0, 1e6))
    def test_m_prime_equivalence_band(self, r):
        val = m_prime(r) * math.sqrt(japanese_bracket(r))
        assert 0.4 <= val <= 1.1

    @settings(max_examples=200)
    @given(st.floats(1e-6, 1e6))
    def test_m_double_prime_equivalence_band(self, r):
        val = -m_double_prime(r) / (r * japanese_bracket(r) ** -2.5)
        # band measured once on [1e-3, 1e3] and frozen with slack
        assert 0.24 <= val <= 1.04


class TestEAux:
    def test_small_r_limit(self):
        assert abs(e_aux(1e-4) / 1e-8 - 2.0 / 3.0) <= 1e-6

    def test_reference_value(self):
        assert e_aux(1.0) == pytest.approx(E_1, rel=1e-15)

    def test_large_r_limit(self):
        assert abs(50 * e_aux(50.0) * math.exp(-100) - 0.25) <= 1e-10

    def test_relative_error(self):
        r = np.concatenate([np.geomspace(1e-6, 0.5, 100), np.linspace(0.5, 300, 200)])
        ref = np.array([float((mp.e**(2 * mp.mpf(x)) - mp.e**(-2 * mp.mpf(x)) - 4 * mp.mpf(x))
                              / (4 * mp.mpf(x))) for x in r])
        assert np.max(np.abs(e_aux(r) / ref - 1)) <= 1e-12

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            e_aux(bad)

    def test_identity_with_k(self):
        r = np.linspace(1e-3, 20, 2000)
        sech2 = 1 / np.cosh(r) ** 2
        assert np.max(np.abs(e_aux(r) * sech2 + sech2 - k_symbol(r) ** 2)) <= 1e-12


class TestScan:
    def test_default_scan_bands(self):
        rep = symbol_bounds_scan(np.geomspace(1e-3, 1e3, 400))
        assert rep.m1_min >= 0.45 and rep.m1_max <= 1.05
        assert np.all(rep.ratio_m2 > 0)
        assert rep.m2_band_ratio <= 5

    def test_singleton(self):
        rep = symbol_bounds_scan([1.0])
        assert rep.grid.size == 1
        assert rep.m1_min == rep.m1_max and rep.m2_min == rep.m2_max

    def test_empty(self):
        with pytest.raises(ValueError):
            symbol_bounds_scan([])

    @pytest.mark.parametrize("grid", [[2.0, 1.0], [0.0, 1.0], [-1.0, 1.0]])
    def test_bad_grids(self, grid):
        with pytest.raises(ValueError):
            symbol_bounds_scan(grid)


@settings(max_examples=100)
@given(st.floats(0.0, 1e5))
def test_symbol_point_invariants(r):
    p = symbol_point(r)
    assert p.k > 0 and p.m1 > 0 and p.m2 <= 0
    assert p.m == pytest.approx(p.r * p.k, rel=1e-15, abs=0)
    if r > 0:
        assert p.m2 < 0


def test_m_double_prime_finite_at_extreme_r():
    r = np.array([1e-300, 1e-120, 1e120, 1e300])
    out = m_double_prime(r)
    assert np.all(np.isfinite(out)) and np.all(out <= 0)
    # m ~ sqrt(r) for large r, so m'' ~ -r^(-3/2) / 4
    assert m_double_prime(1e120) == pytest.approx(-0.25e-180, rel=1e-12)
