import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from truncfit.estimator import compute_moments, fit
from truncfit.model import TruncatedModel, log_likelihood, model_moments
from truncfit.quadrature import Interval
from truncfit.synth import (
    SamplerConfig,
    cdf_table,
    grid_mle_oracle,
    sample,
    splitmix64,
    truncated_exponential_cdf,
    truncated_exponential_mean,
    uniforms,
)

UNIT = TruncatedModel(0.0, 0.0, Interval(0, 1))
EXPONENTIAL = TruncatedModel(1.0, 0.0, Interval(0, 10))


def splitmix64_scalar(seed, n):
    """Textbook sequential splitmix64 on Python ints."""
    mask, x, out = (1 << 64) - 1, seed, []
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & mask
        z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


class TestPrng:
    @pytest.mark.parametrize("seed", [0, 1234567, 2**64 - 1])
    def test_matches_sequential_reference(self, seed):
        assert splitmix64(seed, 50).tolist() == splitmix64_scalar(seed, 50)

    def test_counter_offset(self):
        assert np.array_equal(splitmix64(9, 10)[4:], splitmix64(9, 6, start=4))

    def test_uniform_range(self):
        u = uniforms(3, 10_000)
        assert u.min() >= 0.0 and u.max() < 1.0


class TestSample:
    @pytest.mark.parametrize("method", ["inverse_cdf_table", "rejection"])
    def test_deterministic(self, method):
        cfg = SamplerConfig(seed=42, method=method)
        m = TruncatedModel(0.5, 0.8, Interval(-2, 3))
        assert np.array_equal(sample(m, 500, cfg), sample(m, 500, cfg))
        assert not np.array_equal(sample(m, 500, cfg), sample(m, 500, SamplerConfig(seed=43, method=method)))

    def test_uniform_mean(self):
        assert abs(sample(UNIT, 100_000, SamplerConfig(seed=1)).mean() - 0.5) < 0.01

    @pytest.mark.parametrize("method", ["inverse_cdf_table", "rejection"])
    def test_exponential_ks(self, method):
        y = sample(EXPONENTIAL, 100_000, SamplerConfig(seed=8, method=method))
        ks = stats.kstest(y, lambda t: truncated_exponential_cdf(t, 1.0, 0.0, 10.0)).statistic
        assert ks < 0.01

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(table_resolution=100)
        with pytest.raises(ValueError):
            SamplerConfig(method="bootstrap")
        with pytest.raises(ValueError):
            sample(UNIT, 0)

    @given(alpha=st.floats(-5, 5), psi=st.floats(-2, 5), lo=st.floats(-5, 5), w=st.floats(0.1, 8),
           seed=st.integers(0, 2**64 - 1))
    def test_containment(self, alpha, psi, lo, w, seed):
        m = TruncatedModel(alpha, psi, Interval(lo, lo + w))
        y = sample(m, 300, SamplerConfig(seed=seed))
        assert np.all((y >= m.support.lo) & (y <= m.support.hi))

    @given(alpha=st.floats(-3, 3), psi=st.floats(0.05, 3), lo=st.floats(-4, 0), w=st.floats(1, 6),
           seed=st.integers(0, 2**32))
    def test_monte_carlo_rate(self, alpha, psi, lo, w, seed):
        m = TruncatedModel(alpha, psi, Interval(lo, lo + w))
        n = 100_000
        s = compute_moments(sample(m, n, SamplerConfig(seed=seed)))
        e = model_moments(m)
        assert abs(s.m1 - e.e1) <= 5 * math.sqrt(e.variance / n)
        assert abs(s.m2 - e.e2) <= 5 * math.sqrt((e.e4 - e.e2**2) / n)


class TestCdfTable:
    @given(alpha=st.floats(-20, 20), psi=st.floats(-5, 20), w=st.floats(0.1, 10))
    def test_monotone_and_spanning(self, alpha, psi, w):
        knots, probs = cdf_table(TruncatedModel(alpha, psi, Interval(-w / 2, w / 2)), 256)
        assert np.all(np.diff(knots) > 0)
        assert np.all(np.diff(probs) >= 0)
        assert abs(probs[0]) <= 1e-9 and abs(probs[-1] - 1.0) <= 1e-9

    def test_matches_closed_form(self):
        knots, probs = cdf_table(EXPONENTIAL, 1024)
        np.testing.assert_allclose(probs, truncated_exponential_cdf(knots, 1.0, 0.0, 10.0), atol=1e-12)


class TestClosedForms:
    def test_exponential_mean(self):
        assert truncated_exponential_mean(1.0, 0.0, 10.0) == pytest.approx(0.999546, abs=5e-7)
        assert truncated_exponential_mean(-1.0, 0.0, 10.0) == pytest.approx(10 - 0.999546, abs=5e-7)


class TestGridOracle:
    def test_uniform(self):
        # midpoint grid: raw moments match the uniform law to O(1/n^2)
        y = (np.arange(4000) + 0.5) / 4000 * 2 - 1
        a, p, _ = grid_mle_oracle(y, Interval(-1, 1), Interval(-1, 1), Interval(-1, 1), grid_size=21)
        cell = 2 / 20 / 100
        assert abs(a) <= cell and abs(p) <= cell

    def test_coarse_vs_fine(self, normal_sample):
        y, iv = normal_sample
        ranges = (Interval(-1, 5), Interval(-2.5, 3.5))
        coarse = grid_mle_oracle(y[:100], iv, *ranges, grid_size=11)
        fine = grid_mle_oracle(y[:100], iv, *ranges, grid_size=101)
        assert abs(coarse[0] - fine[0]) <= 6 / 10 and abs(coarse[1] - fine[1]) <= 6 / 10
        assert fine[2] >= coarse[2] - 1e-9

    def test_agrees_with_fit(self, normal_sample):
        y, iv = normal_sample
        y = y[:100]
        r = fit(compute_moments(y), iv)
        # ranges centred on the generating parameters, not on the fit
        a, p, ll = grid_mle_oracle(y, iv, Interval(-1, 5), Interval(-2.5, 3.5))
        assert abs(a - r.alpha) < 1e-3 and abs(p - r.psi) < 1e-3
        # the oracle's own likelihood agrees with the model's
        assert ll == pytest.approx(log_likelihood(TruncatedModel(a, p, iv), compute_moments(y)), abs=1e-8)
        assert r.log_likelihood >= ll - 1e-6

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            grid_mle_oracle([0.1, 0.2, 0.3], Interval(0, 1), Interval(-1, 1), Interval(-1, 1), grid_size=10)
