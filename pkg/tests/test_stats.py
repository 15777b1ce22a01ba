import math

import mpmath
import numpy as np
import pytest

from teleportsim.protocol import classical_fidelities
from teleportsim.qubit_math import PLUS_D
from teleportsim.stats import (
    HypothesisResult,
    bootstrap_fidelity_error,
    hoeffding_bound,
    hoeffding_log_bound,
    hoeffding_test,
    mean_and_stderr,
    split_log10,
)
from teleportsim.tomography import CountTable

mpmath.mp.dps = 50


def oracle_log10(f, n):
    """Direct product form at 50 digits, no log-space shortcut."""
    f = mpmath.mpf(f)
    top = mpmath.mpf(4) / 3
    two3 = mpmath.mpf(2) / 3
    base = (two3 / (top - f)) ** ((top - f) / top) * (two3 / f) ** (f / top)
    return float(mpmath.log10(base ** (4 * n)))


class TestHoeffding:
    @pytest.mark.parametrize("f,n", [(0.85, 240), (0.91, 150), (0.75, 50), (0.70, 10), (1.0, 1000)])
    def test_matches_oracle(self, f, n):
        assert hoeffding_test(f, n).log10_p == pytest.approx(oracle_log10(f, n), rel=1e-10)

    def test_reported_ceilings(self):
        assert hoeffding_bound(0.85, 240) <= 2.4e-14
        assert hoeffding_bound(0.91, 150) <= 1.5e-16

    def test_classical_point(self):
        for n in (1, 10, 240, 10**6):
            assert hoeffding_bound(2 / 3, n) == 1.0
            assert hoeffding_bound(0.5, n) == 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            hoeffding_bound(4 / 3, 10)
        with pytest.raises(ValueError):
            hoeffding_bound(0.9, 0)
        with pytest.raises(ValueError):
            hoeffding_bound(0.9, 2.5)

    def test_monotone_grid(self):
        fs = np.linspace(0.67, 1.3, 40)
        ns = [1, 5, 20, 100, 240, 1000]
        grid = np.array([[hoeffding_log_bound(f, n) for n in ns] for f in fs])
        assert np.all(np.diff(grid, axis=0) < 0)
        assert np.all(np.diff(grid, axis=1) < 0)

    def test_no_underflow(self):
        r = hoeffding_test(0.99, 10**6)
        assert r.p_bound == 0.0
        assert math.isfinite(r.log10_p) and r.log10_p < -1000
        m, e = r.mantissa_exponent
        assert 1 <= m < 10

    def test_monte_carlo_classical_strategy(self):
        # measure-and-prepare runs of 4N trials should exceed F_obs no more often than the bound says
        n, experiments = 50, 10**5
        rng = np.random.default_rng(0)
        means = np.empty(experiments)
        chunk = 10**4
        for i in range(0, experiments, chunk):
            means[i:i + chunk] = classical_fidelities(chunk * 4 * n, rng).reshape(chunk, 4 * n).mean(axis=1)
        for f_obs in (0.70, 0.75, 0.80):
            assert np.mean(means >= f_obs) <= hoeffding_bound(f_obs, n) + 3 / np.sqrt(experiments)


class TestSplitLog10:
    @pytest.mark.parametrize("x", [2.4e-14, 1.5e-16, 1.0, 0.5, 9.99e-3, 1e-300])
    def test_round_trip(self, x):
        m, e = split_log10(math.log10(x))
        assert 1 <= m < 10
        assert m * 10.0**e == pytest.approx(x, rel=1e-9)

    def test_result_dict(self):
        r = hoeffding_test(0.85, 240)
        d = r.to_dict()
        assert HypothesisResult.from_dict(d) == r
        assert d["p_mantissa"] * 10.0 ** d["p_exponent10"] == pytest.approx(r.p_bound, rel=1e-9)
        assert hoeffding_test(0.6, 10).format() == "1"


class TestBootstrap:
    def test_zero_variance(self):
        assert bootstrap_fidelity_error(np.full(100, 0.9), rng=np.random.default_rng(0)) == 0.0

    def test_binomial_scale(self):
        p, shots = 0.9, 1000
        rng = np.random.default_rng(1)
        data = (rng.random(shots) < p).astype(float)
        err = bootstrap_fidelity_error(data, resamples=2000, rng=rng)
        assert err == pytest.approx(np.sqrt(p * (1 - p) / shots), rel=0.2)

    def test_count_table(self):
        # X basis carries the D fidelity; p = 0.9 at 1e3 shots
        c = CountTable((500, 500), (900, 100), (500, 500))
        err = bootstrap_fidelity_error(c, resamples=2000, rng=np.random.default_rng(2), target=PLUS_D)
        assert err == pytest.approx(np.sqrt(0.9 * 0.1 / 1000), rel=0.2)

    def test_event_level_scale(self):
        # 80 shots per basis, as from 240 successes split over three bases
        c = CountTable((40, 40), (74, 6), (40, 40))
        err = bootstrap_fidelity_error(c, rng=np.random.default_rng(3), target=PLUS_D)
        assert 0.015 < err < 0.05

    def test_needs_target(self):
        with pytest.raises(ValueError):
            bootstrap_fidelity_error(CountTable((1, 1), (1, 1), (1, 1)))

    def test_min_resamples(self):
        with pytest.raises(ValueError):
            bootstrap_fidelity_error(np.ones(5), resamples=10)


def test_mean_and_stderr():
    m, s = mean_and_stderr([1.0, 2.0, 3.0])
    assert m == 2.0 and s == pytest.approx(1 / np.sqrt(3))
    assert mean_and_stderr([0.5]) == (0.5, 0.0)
