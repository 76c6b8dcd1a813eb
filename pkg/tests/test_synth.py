import math

import numpy as np
import pytest

from entroport import (DataError, GeneratorSpec, arfima_series,
                       arfima_theoretical_acf, fbm_series, garch_series,
                       to_price_series)
from entroport.synth import fractional_weights


def _acf(x, lag):
    x = x - x.mean()
    return float(np.dot(x[:-lag], x[lag:]) / np.dot(x, x))


class TestFBM:
    def test_bounds(self):
        with pytest.raises(DataError):
            fbm_series(1.2, 1024, 0)
        with pytest.raises(DataError):
            fbm_series(0.0, 1024, 0)
        with pytest.raises(DataError):
            fbm_series(0.5, 1000, 0)  # not a power of two

    def test_h_half_increments_uncorrelated(self):
        n = 2 ** 14
        acfs = [_acf(np.diff(fbm_series(0.5, n, seed).values), 1)
                for seed in range(20)]
        assert abs(np.mean(acfs)) < 3 / np.sqrt(n)

    def test_h_half_kstep_variance(self):
        # Var[B(t+k) - B(t)] = k for H = 1/2
        for k in (1, 5, 20):
            vs = []
            for seed in range(20):
                x = fbm_series(0.5, 2 ** 14, seed).values
                vs.append(np.var(x[k:] - x[:-k]))
            assert np.mean(vs) == pytest.approx(k, rel=0.05)

    def test_general_h_scaling(self):
        for hurst in (0.3, 0.7):
            for k in (2, 8):
                vs = [np.var(np.subtract(x[k:], x[:-k]))
                      for x in (fbm_series(hurst, 2 ** 14, s).values
                                for s in range(10))]
                assert np.mean(vs) == pytest.approx(k ** (2 * hurst), rel=0.07)


class TestARFIMA:
    def test_bounds(self):
        with pytest.raises(DataError):
            arfima_series(0.6, 100, 0)
        with pytest.raises(DataError):
            arfima_series(-0.5, 100, 0)

    def test_d_zero_is_white_noise(self):
        n = 20_000
        acfs = [_acf(arfima_series(0.0, n, seed).values, 1) for seed in range(10)]
        assert abs(np.mean(acfs)) < 3 / np.sqrt(n)

    def test_positive_memory_matches_theoretical_acf(self):
        d = 0.3
        rho = arfima_theoretical_acf(d, 10)
        n = 2 ** 15
        emp = np.zeros(10)
        for seed in range(10):
            x = arfima_series(d, n, seed).values
            emp += np.array([_acf(x, k) for k in range(1, 11)])
        emp /= 10
        assert np.all(emp > 0)
        assert np.allclose(emp, rho[1:], atol=0.05)

    def test_weights_match_gamma_formula(self):
        d = 0.27
        psi = fractional_weights(d, 50)
        for k in (1, 5, 20, 49):
            expected = math.exp(math.lgamma(k + d) - math.lgamma(d)
                                - math.lgamma(k + 1))
            assert psi[k] == pytest.approx(expected, rel=1e-12)


class TestGARCH:
    def test_bounds(self):
        with pytest.raises(DataError):
            garch_series(1e-5, 0.5, 0.5, 100, 0)
        with pytest.raises(DataError):
            garch_series(-1e-5, 0.1, 0.1, 100, 0)

    def test_degenerate_iid_case(self):
        omega = 4e-4
        x = garch_series(omega, 0.0, 0.0, 100_000, 1).values
        assert np.var(x) == pytest.approx(omega, rel=0.05)

    def test_unconditional_variance(self):
        x = garch_series(1e-5, 0.1, 0.85, 100_000, 2).values
        assert np.var(x) == pytest.approx(2e-4, rel=0.10)


class TestReproducibility:
    def test_identical_specs_bitwise_equal(self):
        for spec in (GeneratorSpec("fbm", 1024, 7, hurst=0.6),
                     GeneratorSpec("arfima", 500, 7, d=0.2),
                     GeneratorSpec("garch", 500, 7, omega=1e-5, alpha=0.1,
                                   beta=0.8)):
            a = spec.generate()
            b = spec.generate()
            assert np.array_equal(a.values, b.values)

    def test_distinct_seeds_differ(self):
        a = fbm_series(0.5, 1024, 1).values
        b = fbm_series(0.5, 1024, 2).values
        assert not np.array_equal(a, b)

    def test_streams_are_independent_of_each_other(self):
        a = arfima_series(0.0, 100, 5).values
        g = garch_series(1.0, 0.0, 0.0, 100, 5).values
        assert not np.allclose(a, g)


class TestToPriceSeries:
    def test_level_path_exponentiates(self):
        s = fbm_series(0.5, 256, 3)
        p = to_price_series(s, scale=1e-3)
        assert np.all(p.values > 0)
        assert p.kind == "price"
        assert np.allclose(p.values, 100.0 * np.exp(1e-3 * s.values))

    def test_return_path_compounds(self):
        g = garch_series(1e-5, 0.0, 0.0, 100, 4)
        p = to_price_series(g)
        assert np.all(p.values > 0)
        assert p.values[0] == pytest.approx(100.0 * (1 + g.values[0]))
