"""Hoeffding bound against classical teleportation and bootstrap error bars."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qubit_math import PureState
from .tomography import CountTable, TomographyError, reconstruct_state

CLASSICAL_LIMIT = 2.0 / 3.0
FIDELITY_RANGE = 4.0 / 3.0
LN10 = math.log(10.0)


def hoeffding_log_bound(mean_fidelity: float, n_per_state: int) -> float:
    """Natural log of the classical-process p-value bound after ``4 N`` trials.

    Returns 0 (p = 1) when the observed mean does not exceed 2/3.
    """
    if int(n_per_state) != n_per_state or n_per_state < 1:
        raise ValueError(f"n_per_state must be a positive integer, got {n_per_state!r}")
    f = float(mean_fidelity)
    if f >= FIDELITY_RANGE:
        raise ValueError(f"mean fidelity must be below 4/3, got {f!r}")
    if f <= CLASSICAL_LIMIT:
        return 0.0
    upper = FIDELITY_RANGE - f
    exponent = (upper / FIDELITY_RANGE) * math.log(CLASSICAL_LIMIT / upper) + (
        f / FIDELITY_RANGE
    ) * math.log(CLASSICAL_LIMIT / f)
    return min(0.0, 4 * int(n_per_state) * exponent)


def hoeffding_bound(mean_fidelity: float, n_per_state: int) -> float:
    return math.exp(hoeffding_log_bound(mean_fidelity, n_per_state))


def split_log10(log10_p: float) -> tuple[float, int]:
    """(mantissa, exponent) with ``10**log10_p == mantissa * 10**exponent``."""
    exponent = math.floor(log10_p)
    mantissa = 10.0 ** (log10_p - exponent)
    if mantissa >= 9.9999999999:
        mantissa, exponent = 1.0, exponent + 1
    return mantissa, int(exponent)


@dataclass(frozen=True)
class HypothesisResult:
    observed_mean_fidelity: float
    trials_per_state: int
    p_bound: float
    log10_p: float

    @property
    def mantissa_exponent(self) -> tuple[float, int]:
        return split_log10(self.log10_p)

    def format(self) -> str:
        if self.log10_p == 0.0:
            return "1"
        m, e = self.mantissa_exponent
        return f"{m:.2f}e{e:+d}"

    def to_dict(self) -> dict:
        m, e = self.mantissa_exponent
        return {
            "observed_mean_fidelity": self.observed_mean_fidelity,
            "trials_per_state": self.trials_per_state,
            "p_bound": self.p_bound,
            "log10_p": self.log10_p,
            "p_mantissa": m,
            "p_exponent10": e,
        }

    @classmethod
    def from_dict(cls, d) -> "HypothesisResult":
        return cls(d["observed_mean_fidelity"], d["trials_per_state"], d["p_bound"], d["log10_p"])


def hoeffding_test(mean_fidelity: float, n_per_state: int) -> HypothesisResult:
    ln_p = hoeffding_log_bound(mean_fidelity, n_per_state)
    return HypothesisResult(float(mean_fidelity), int(n_per_state), math.exp(ln_p), ln_p / LN10)


def mean_and_stderr(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("no values")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def _fidelity_from_counts(counts: np.ndarray, target: PureState) -> float:
    rho = reconstruct_state(CountTable.from_array(counts))
    v = target.vector
    return float(np.vdot(v, rho @ v).real)


def bootstrap_fidelity_error(data, resamples: int = 1000, rng: np.random.Generator | None = None,
                             target: PureState | None = None) -> float:
    """Bootstrap standard deviation of a fidelity estimate.

    ``data`` is either a :class:`CountTable` (requires ``target``; every count
    is redrawn from a Poisson distribution and the state reconstructed again)
    or a 1-d array of per-trial fidelities (resampled with replacement; the
    statistic is the mean).
    """
    if resamples < 100:
        raise ValueError("use at least 100 resamples")
    rng = rng if rng is not None else np.random.default_rng(0)

    if isinstance(data, CountTable):
        if target is None:
            raise ValueError("a target state is required for count data")
        base = data.as_array()
        if base.sum() == 0:
            raise ValueError("empty count table")
        draws = rng.poisson(base, size=(resamples, 3, 2))
        stats = []
        for d in draws:
            # a basis that resamples to zero keeps its observed counts
            empty = d.sum(axis=1) == 0
            d[empty] = base[empty]
            try:
                stats.append(_fidelity_from_counts(d, target))
            except TomographyError:
                continue
        stats = np.asarray(stats)
    else:
        values = np.asarray(data, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("empty data")
        idx = rng.integers(0, values.size, size=(resamples, values.size))
        stats = values[idx].mean(axis=1)
    return float(np.std(stats, ddof=1))
