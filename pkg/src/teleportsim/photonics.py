"""Physical-layer models: pair sources, fibre loss, detectors and noise.

All stochastic functions take an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qubit_math import I2, QubitMathError, apply_unitary, check_density_matrix, check_unitary


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class SourceParams:
    mean_pairs_per_pulse: float
    heralding_efficiency: float = 1.0
    purity: float = 1.0

    def __post_init__(self):
        if self.mean_pairs_per_pulse < 0:
            raise ValueError("mean_pairs_per_pulse must be >= 0")
        _check_prob("heralding_efficiency", self.heralding_efficiency)
        if not 0.0 < self.purity <= 1.0:
            raise ValueError("purity must lie in (0, 1]")

    @property
    def low_gain(self) -> bool:
        return self.mean_pairs_per_pulse < 1.0


@dataclass(frozen=True)
class ChannelParams:
    length_km: float
    loss_db: float
    extra_delay_ns: float = 0.0

    def __post_init__(self):
        for name in ("length_km", "loss_db", "extra_delay_ns"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 0.7
    dark_count_prob_per_gate: float = 0.0
    recovery_time_ns: float = 40.0

    def __post_init__(self):
        _check_prob("efficiency", self.efficiency)
        _check_prob("dark_count_prob_per_gate", self.dark_count_prob_per_gate)
        if self.recovery_time_ns < 0:
            raise ValueError("recovery_time_ns must be >= 0")


@dataclass(frozen=True)
class NoiseParams:
    """Two-photon interference visibility and feed-forward rotation quality.

    ``unitary_fidelity`` is the probability that the correction is applied
    exactly; otherwise the qubit is fully dephased after the rotation.
    """

    visibility: float = 0.917
    unitary_fidelity: float = 0.85

    def __post_init__(self):
        _check_prob("visibility", self.visibility)
        _check_prob("unitary_fidelity", self.unitary_fidelity)


IDEAL_NOISE = NoiseParams(1.0, 1.0)


def thermal_pmf(n, mu: float):
    """P(n) = mu^n / (1 + mu)^(n + 1) for a single-mode thermal source."""
    n = np.asarray(n)
    return mu**n / (1.0 + mu) ** (n + 1)


def sample_pair_count(src: SourceParams, rng: np.random.Generator, size=None):
    """Draw the number of photon pairs emitted in one pulse (thermal statistics)."""
    mu = src.mean_pairs_per_pulse
    if mu < 0:
        raise ValueError("mean photon number must be >= 0")
    # numpy's geometric counts trials to first success (support starts at 1)
    return rng.geometric(1.0 / (1.0 + mu), size=size) - 1


def transmission(ch: ChannelParams) -> float:
    return 10.0 ** (-ch.loss_db / 10.0)


def db_to_transmission(loss_db: float) -> float:
    if loss_db < 0:
        raise ValueError("loss must be >= 0 dB")
    return 10.0 ** (-loss_db / 10.0)


def apply_visibility(rho_ideal, visibility: float) -> np.ndarray:
    """Admix white noise: ``V * rho + (1 - V) * I / 2``."""
    _check_prob("visibility", visibility)
    rho = check_density_matrix(rho_ideal, 2)
    return visibility * rho + (1.0 - visibility) * I2 / 2


def dephase(rho) -> np.ndarray:
    """Complete dephasing in the time-bin basis (off-diagonals zeroed)."""
    rho = np.asarray(rho, dtype=complex)
    return np.diag(np.diag(rho))


def apply_unitary_error(rho, unitary_fidelity: float, intended, rng: np.random.Generator) -> np.ndarray:
    """Apply ``intended``; with probability ``1 - unitary_fidelity`` also dephase."""
    _check_prob("unitary_fidelity", unitary_fidelity)
    try:
        intended = check_unitary(intended)
    except QubitMathError as exc:
        raise ValueError(str(exc)) from exc
    out = np.array(apply_unitary(intended, rho))
    if rng.random() >= unitary_fidelity:
        out = dephase(out)
    return out


def unitary_error_channel(rho, unitary_fidelity: float, intended) -> np.ndarray:
    """Expected output of :func:`apply_unitary_error` (the averaged channel)."""
    _check_prob("unitary_fidelity", unitary_fidelity)
    out = np.array(apply_unitary(check_unitary(intended), rho))
    return unitary_fidelity * out + (1.0 - unitary_fidelity) * dephase(out)


def rotation_fidelity(unitary_fidelity: float) -> float:
    """Mean state fidelity of the noisy rotation over the inputs t0, t1, D, R.

    Time-bin eigenstates survive dephasing; equatorial states drop to 1/2.
    """
    _check_prob("unitary_fidelity", unitary_fidelity)
    return (3.0 + unitary_fidelity) / 4.0


def unitary_fidelity_for_rotation_fidelity(target: float) -> float:
    """Invert :func:`rotation_fidelity`; valid for targets in [3/4, 1]."""
    if not 0.75 <= target <= 1.0:
        raise ValueError("dephasing errors cannot push the mean below 3/4")
    return 4.0 * target - 3.0


def effective_visibility(bound: float, purity_a: float, purity_b: float) -> float:
    """Multi-pair visibility bound reduced by spectral mode overlap.

    Two independent sources with single-photon purities ``P_a`` and ``P_b``
    interfere with an overlap of at most ``sqrt(P_a * P_b)``.
    """
    _check_prob("bound", bound)
    return bound * float(np.sqrt(purity_a * purity_b))


def detector_fires(signal_present: bool, det: DetectorParams, rng: np.random.Generator) -> bool:
    p = det.efficiency if signal_present else det.dark_count_prob_per_gate
    return bool(rng.random() < p)
