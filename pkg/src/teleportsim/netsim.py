"""Timing and rate model of the three-node network (Alice, Charlie, Bob)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .photonics import ChannelParams, db_to_transmission, transmission
from .protocol import BSM_SUCCESS_WITH_FF

# group delay of standard single-mode fibre, group index ~1.4675
NS_PER_KM = 4895.0
SECONDS_PER_HOUR = 3600.0


def propagation_delay(length_km: float) -> float:
    """Fibre propagation delay in nanoseconds."""
    if length_km < 0:
        raise ValueError("length must be >= 0")
    return length_km * NS_PER_KM


@dataclass(frozen=True)
class NetworkTopology:
    alice_charlie: ChannelParams = field(default_factory=lambda: ChannelParams(15.7, 5.0))
    charlie_bob: ChannelParams = field(default_factory=lambda: ChannelParams(14.7, 6.0))
    charlie_buffer_km: float = 15.0
    bob_buffer_km: float = 15.0
    classical_latency_ns: float = 0.0

    def __post_init__(self):
        for name in ("charlie_buffer_km", "bob_buffer_km", "classical_latency_ns"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class ClockModel:
    repetition_period_ns: float = 10.0
    jitter_rms_ps: float = 2.04
    coherence_time_ps: float = 110.0

    def __post_init__(self):
        if self.repetition_period_ns <= 0:
            raise ValueError("repetition period must be > 0")
        if self.jitter_rms_ps < 0:
            raise ValueError("jitter must be >= 0")
        if self.coherence_time_ps <= 0:
            raise ValueError("coherence time must be > 0")

    @property
    def rep_rate_hz(self) -> float:
        return 1e9 / self.repetition_period_ns

    @property
    def jitter_ratio(self) -> float:
        return self.jitter_rms_ps / self.coherence_time_ps


@dataclass(frozen=True)
class TimingReport:
    photon_release_ns: float
    signal_arrival_ns: float
    slack_ns: float
    feasible: bool
    alice_to_charlie_ns: float
    charlie_to_bob_ns: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d) -> "TimingReport":
        return cls(**d)


def feed_forward_feasible(topo: NetworkTopology) -> TimingReport:
    """Does the feed-forward signal reach Bob before his buffered photon leaves?

    The clock starts when the Bell measurement fires, taken as the moment the
    idler enters Bob's buffer. Source-to-Charlie delays are equal on both
    paths and only reported.
    """
    hop = propagation_delay(topo.charlie_bob.length_km)
    release = propagation_delay(topo.bob_buffer_km)
    arrival = hop + topo.classical_latency_ns
    slack = release - arrival
    return TimingReport(
        photon_release_ns=release,
        signal_arrival_ns=arrival,
        slack_ns=slack,
        feasible=bool(slack >= 0),
        alice_to_charlie_ns=propagation_delay(topo.alice_charlie.length_km),
        charlie_to_bob_ns=hop,
    )


@dataclass(frozen=True)
class TimelineEvent:
    time_ns: float
    node: str
    event: str


def event_timeline(topo: NetworkTopology) -> list[TimelineEvent]:
    """Absolute event times for one heralded four-fold event.

    Origin: Charlie's pair emission. Alice's emission is scheduled so her
    photon reaches Charlie as his signal photon leaves the buffer.
    """
    bsm = propagation_delay(topo.charlie_buffer_km)
    idler_at_bob = propagation_delay(topo.charlie_bob.length_km)
    alice_emit = bsm - propagation_delay(topo.alice_charlie.length_km)
    ff_sent = bsm + topo.classical_latency_ns
    ff_arrival = ff_sent + propagation_delay(topo.charlie_bob.length_km)
    release = idler_at_bob + propagation_delay(topo.bob_buffer_km)
    events = [
        TimelineEvent(0.0, "Charlie", "pair emitted; signal enters buffer, idler sent to Bob"),
        TimelineEvent(alice_emit, "Alice", "heralded photon encoded and sent"),
        TimelineEvent(idler_at_bob, "Bob", "idler arrives; enters buffer"),
        TimelineEvent(bsm, "Charlie", "Bell-state measurement"),
        TimelineEvent(ff_sent, "Charlie", "feed-forward signal sent"),
        TimelineEvent(ff_arrival, "Bob", "feed-forward signal arrives"),
        TimelineEvent(release, "Bob", "idler leaves buffer"),
    ]
    return sorted(events, key=lambda e: e.time_ns)


def sync_jitter_penalty(clock: ClockModel, rng: np.random.Generator, size=None):
    """Temporal-overlap factor exp(-dt^2 / (2 tau^2)) for sampled timing offsets."""
    dt = rng.normal(0.0, clock.jitter_rms_ps, size=size)
    return np.exp(-(dt**2) / (2.0 * clock.coherence_time_ps**2))


def mean_jitter_penalty(clock: ClockModel) -> float:
    """Closed-form mean of :func:`sync_jitter_penalty`: 1 / sqrt(1 + (sigma/tau)^2)."""
    return float(1.0 / np.sqrt(1.0 + clock.jitter_ratio**2))


@dataclass(frozen=True)
class BudgetInputs:
    """Per-pulse probabilities entering the four-fold rate.

    ``detector_efficiency``, ``heralding_efficiency``, ``analysis_efficiency``,
    ``buffer_loss_db_per_km`` and ``excess_loss_db`` are not measured
    quantities; they are modelling assumptions.
    """

    mean_pairs_alice: float = 0.08
    mean_pairs_charlie: float = 0.03
    alice_charlie: ChannelParams = field(default_factory=lambda: ChannelParams(15.7, 5.0))
    charlie_bob: ChannelParams = field(default_factory=lambda: ChannelParams(14.7, 6.0))
    charlie_buffer_km: float = 15.0
    bob_buffer_km: float = 15.0
    detector_efficiency: float = 0.7
    heralding_efficiency: float = 0.5
    analysis_efficiency: float = 0.5
    buffer_loss_db_per_km: float = 0.2
    excess_loss_db: float = 54.0
    bsm_success: float = BSM_SUCCESS_WITH_FF


@dataclass(frozen=True)
class RateBudget:
    factors: dict[str, float]
    rep_rate_hz: float
    fourfold_rate_per_second: float

    @property
    def fourfold_rate_per_hour(self) -> float:
        return self.fourfold_rate_per_second * SECONDS_PER_HOUR

    def to_dict(self) -> dict:
        return {
            "factors": dict(self.factors),
            "rep_rate_hz": self.rep_rate_hz,
            "fourfold_rate_per_second": self.fourfold_rate_per_second,
            "fourfold_rate_per_hour": self.fourfold_rate_per_hour,
        }

    @classmethod
    def from_dict(cls, d) -> "RateBudget":
        return cls(dict(d["factors"]), d["rep_rate_hz"], d["fourfold_rate_per_second"])


def budget_factors(inp: BudgetInputs) -> dict[str, float]:
    """Itemized per-pulse probabilities; their product times the rep rate is the rate."""
    det = inp.detector_efficiency
    return {
        "alice_pair": inp.mean_pairs_alice,
        "alice_herald": inp.heralding_efficiency,
        "alice_photon_to_bsm": transmission(inp.alice_charlie) * det,
        "charlie_pair": inp.mean_pairs_charlie,
        "charlie_signal_buffer_and_detection":
            db_to_transmission(inp.charlie_buffer_km * inp.buffer_loss_db_per_km) * det,
        "idler_to_bob_buffer_and_detection":
            transmission(inp.charlie_bob) * db_to_transmission(inp.bob_buffer_km * inp.buffer_loss_db_per_km) * det,
        "bsm_success": inp.bsm_success,
        "analysis_arm": inp.analysis_efficiency,
        "excess_loss": db_to_transmission(inp.excess_loss_db),
    }


def coincidence_rate_budget(inp: BudgetInputs, rep_rate_hz: float = 1e8) -> RateBudget:
    if rep_rate_hz <= 0:
        raise ValueError("rep rate must be > 0")
    factors = budget_factors(inp)
    for name, value in factors.items():
        if name in ("alice_pair", "charlie_pair"):
            if value < 0:
                raise ValueError(f"{name} must be >= 0")
        elif not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    rate = rep_rate_hz * float(np.prod(list(factors.values())))
    return RateBudget(factors, rep_rate_hz, rate)
