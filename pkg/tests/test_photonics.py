import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from teleportsim.photonics import (
    ChannelParams,
    DetectorParams,
    NoiseParams,
    SourceParams,
    apply_unitary_error,
    apply_visibility,
    detector_fires,
    effective_visibility,
    rotation_fidelity,
    sample_pair_count,
    thermal_pmf,
    transmission,
    unitary_error_channel,
    unitary_fidelity_for_rotation_fidelity,
)
from teleportsim.qubit_math import I2, PLUS_D, SIGMA_Z, T0, apply_unitary, fidelity_pure, is_density_matrix

probability = st.floats(0, 1)


class TestPairSource:
    def test_zero_mean(self):
        rng = np.random.default_rng(0)
        assert np.all(sample_pair_count(SourceParams(0.0), rng, size=1000) == 0)

    def test_mean_alice(self):
        mu, n = 0.08, 10**6
        x = sample_pair_count(SourceParams(mu), np.random.default_rng(1), size=n)
        sigma = np.sqrt(mu + mu**2) / np.sqrt(n)
        assert abs(x.mean() - mu) < 3 * sigma

    def test_multi_pair_probability(self):
        mu, n = 0.03, 10**6
        # closed form 1 - P(0) - P(1)
        expected = 1 - 1 / (1 + mu) - mu / (1 + mu) ** 2
        assert expected == pytest.approx(8.4834e-4, rel=1e-4)
        assert 1 - thermal_pmf(0, mu) - thermal_pmf(1, mu) == pytest.approx(expected, rel=1e-12)
        x = sample_pair_count(SourceParams(mu), np.random.default_rng(2), size=n)
        frac = np.mean(x >= 2)
        assert abs(frac - expected) < 4 * np.sqrt(expected * (1 - expected) / n)

    def test_thermal_variance(self):
        mu, n = 0.08, 10**6
        x = sample_pair_count(SourceParams(mu), np.random.default_rng(3), size=n)
        var = mu + mu**2
        # standard error of the sample variance, from the fourth central moment of the geometric law
        p = 1 / (1 + mu)
        m4 = (1 - p) * (p**2 - 9 * p + 9) / p**4
        se = np.sqrt((m4 - var**2) / n)
        assert abs(x.var() - var) < 5 * se

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            SourceParams(-0.1)


class TestTransmission:
    def test_values(self):
        assert transmission(ChannelParams(1.0, 0.0)) == 1.0
        assert transmission(ChannelParams(15.7, 5.0)) == pytest.approx(0.31623, abs=1e-5)
        assert transmission(ChannelParams(14.7, 6.0)) == pytest.approx(0.25119, abs=1e-5)

    @given(st.floats(0, 100), st.floats(0, 100))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert transmission(ChannelParams(0, hi)) <= transmission(ChannelParams(0, lo))


class TestVisibility:
    def test_limits(self):
        rho = PLUS_D.projector()
        np.testing.assert_allclose(apply_visibility(rho, 1.0), rho)
        np.testing.assert_allclose(apply_visibility(rho, 0.0), I2 / 2)

    def test_fidelity(self):
        out = apply_visibility(PLUS_D.projector(), 0.917)
        assert fidelity_pure(PLUS_D, out) == pytest.approx(0.9585, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            apply_visibility(I2 / 2, 1.2)

    @given(probability, probability, probability)
    def test_affine_and_valid(self, v, t, s):
        a = PLUS_D.projector()
        b = np.array([[t, 0], [0, 1 - t]], dtype=complex)
        mix = s * a + (1 - s) * b
        out = apply_visibility(mix, v)
        np.testing.assert_allclose(out, s * apply_visibility(a, v) + (1 - s) * apply_visibility(b, v), atol=1e-12)
        assert is_density_matrix(out)


class TestUnitaryError:
    def test_perfect(self):
        rng = np.random.default_rng(0)
        rho = PLUS_D.projector()
        np.testing.assert_allclose(apply_unitary_error(rho, 1.0, SIGMA_Z, rng), apply_unitary(SIGMA_Z, rho))

    def test_full_dephasing(self):
        out = apply_unitary_error(PLUS_D.projector(), 0.0, SIGMA_Z, np.random.default_rng(0))
        np.testing.assert_allclose(out, np.diag([0.5, 0.5]))

    def test_expected_fidelity(self):
        target = apply_unitary(SIGMA_Z, PLUS_D)
        rng = np.random.default_rng(1)
        n = 20000
        fids = [fidelity_pure(target, apply_unitary_error(PLUS_D.projector(), 0.85, SIGMA_Z, rng)) for _ in range(n)]
        expected = 0.85 + 0.15 * 0.5
        assert expected == pytest.approx(0.925)
        # per-trial fidelity is 1 or 1/2: Bernoulli spread of 0.5
        assert abs(np.mean(fids) - expected) < 3 * 0.5 * np.sqrt(0.85 * 0.15 / n)
        assert fidelity_pure(target, unitary_error_channel(PLUS_D.projector(), 0.85, SIGMA_Z)) == pytest.approx(0.925)

    def test_non_unitary(self):
        with pytest.raises(ValueError):
            apply_unitary_error(I2 / 2, 0.5, np.ones((2, 2)), np.random.default_rng(0))

    @given(probability, st.integers(0, 2**32 - 1))
    def test_preserves_validity(self, f, seed):
        rng = np.random.default_rng(seed)
        rho = apply_visibility(PLUS_D.projector(), 0.7)
        assert is_density_matrix(apply_unitary_error(rho, f, SIGMA_Z, rng))
        assert is_density_matrix(unitary_error_channel(rho, f, SIGMA_Z))

    def test_rotation_fidelity_inverse(self):
        assert rotation_fidelity(0.4) == pytest.approx(0.85)
        assert unitary_fidelity_for_rotation_fidelity(0.85) == pytest.approx(0.4)
        with pytest.raises(ValueError):
            unitary_fidelity_for_rotation_fidelity(0.7)

    def test_rotation_fidelity_matches_channel(self):
        # average over the four canonical inputs of the averaged channel
        from teleportsim.qubit_math import PLUS_R, T1
        f = 0.4
        vals = []
        for psi in (T0, T1, PLUS_D, PLUS_R):
            target = apply_unitary(SIGMA_Z, psi)
            vals.append(fidelity_pure(target, unitary_error_channel(psi.projector(), f, SIGMA_Z)))
        assert np.mean(vals) == pytest.approx(rotation_fidelity(f), abs=1e-12)


def test_effective_visibility():
    assert effective_visibility(0.917, 0.91, 0.84) == pytest.approx(0.917 * np.sqrt(0.91 * 0.84))
    assert effective_visibility(0.917, 1.0, 1.0) == 0.917


class TestDetector:
    def test_ideal(self):
        assert detector_fires(True, DetectorParams(1.0, 0.0), np.random.default_rng(0))

    def test_blind(self):
        rng = np.random.default_rng(0)
        det = DetectorParams(0.0, 0.0)
        assert not any(detector_fires(s, det, rng) for s in (True, False) for _ in range(1000))

    def test_binomial_rate(self):
        rng = np.random.default_rng(5)
        det = DetectorParams(0.7, 0.0)
        n = 10**6
        hits = sum(detector_fires(True, det, rng) for _ in range(n))
        assert abs(hits / n - 0.7) < 3 * np.sqrt(0.21 / n)

    def test_dark_counts(self):
        rng = np.random.default_rng(6)
        det = DetectorParams(0.0, 0.01)
        n = 100000
        rate = sum(detector_fires(False, det, rng) for _ in range(n)) / n
        assert abs(rate - 0.01) < 3 * np.sqrt(0.0099 / n)

    def test_defaults(self):
        assert DetectorParams().recovery_time_ns == 40.0
        assert NoiseParams() == NoiseParams(0.917, 0.85)
