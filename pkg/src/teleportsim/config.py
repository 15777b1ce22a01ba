"""Experiment configuration: TOML loading, strict key checking and validation."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .netsim import BudgetInputs, ClockModel, NetworkTopology
from .photonics import ChannelParams, NoiseParams
from .protocol import Mode

SHIPPED_CONFIGS = ("default", "calibrated", "ideal", "buffers_10km")

# Measured values that the shipped default.toml must carry unchanged.
MEASURED_DEFAULTS = {
    "sources.mean_pairs_alice": 0.08,
    "sources.mean_pairs_charlie": 0.03,
    "sources.purity_alice": 0.91,
    "sources.purity_charlie": 0.84,
    "noise.visibility": 0.917,
    "noise.unitary_fidelity": 0.85,
    "topology.alice_charlie_km": 15.7,
    "topology.alice_charlie_loss_db": 5.0,
    "topology.charlie_bob_km": 14.7,
    "topology.charlie_bob_loss_db": 6.0,
    "topology.charlie_buffer_km": 15.0,
    "topology.bob_buffer_km": 15.0,
    "clock.repetition_period_ns": 10.0,
    "clock.jitter_rms_ps": 2.04,
    "clock.coherence_time_ps": 110.0,
    "run.trials_per_state": 240,
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _require(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _prob(path: str, v: float) -> None:
    _require(0.0 <= v <= 1.0, path, f"must lie in [0, 1], got {v!r}")


def _nonneg(path: str, v: float) -> None:
    _require(v >= 0.0, path, f"must be >= 0, got {v!r}")


@dataclass(frozen=True)
class SourcesConfig:
    mean_pairs_alice: float = 0.08
    mean_pairs_charlie: float = 0.03
    purity_alice: float = 0.91
    purity_charlie: float = 0.84

    def __post_init__(self):
        _nonneg("sources.mean_pairs_alice", self.mean_pairs_alice)
        _nonneg("sources.mean_pairs_charlie", self.mean_pairs_charlie)
        for name in ("purity_alice", "purity_charlie"):
            v = getattr(self, name)
            _require(0.0 < v <= 1.0, f"sources.{name}", f"must lie in (0, 1], got {v!r}")


@dataclass(frozen=True)
class NoiseConfig:
    visibility: float = 0.917
    unitary_fidelity: float = 0.85

    def __post_init__(self):
        _prob("noise.visibility", self.visibility)
        _prob("noise.unitary_fidelity", self.unitary_fidelity)


@dataclass(frozen=True)
class TopologyConfig:
    alice_charlie_km: float = 15.7
    alice_charlie_loss_db: float = 5.0
    charlie_bob_km: float = 14.7
    charlie_bob_loss_db: float = 6.0
    charlie_buffer_km: float = 15.0
    bob_buffer_km: float = 15.0
    classical_latency_ns: float = 0.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _nonneg(f"topology.{f.name}", getattr(self, f.name))


@dataclass(frozen=True)
class ClockConfig:
    repetition_period_ns: float = 10.0
    jitter_rms_ps: float = 2.04
    coherence_time_ps: float = 110.0

    def __post_init__(self):
        _require(self.repetition_period_ns > 0, "clock.repetition_period_ns", "must be > 0")
        _nonneg("clock.jitter_rms_ps", self.jitter_rms_ps)
        _require(self.coherence_time_ps > 0, "clock.coherence_time_ps", "must be > 0")


@dataclass(frozen=True)
class EfficiencyConfig:
    detector: float = 0.7
    heralding: float = 0.5
    analysis_arm: float = 0.5
    buffer_loss_db_per_km: float = 0.2
    excess_loss_db: float = 54.0

    def __post_init__(self):
        for name in ("detector", "heralding", "analysis_arm"):
            _prob(f"efficiencies.{name}", getattr(self, name))
        _nonneg("efficiencies.buffer_loss_db_per_km", self.buffer_loss_db_per_km)
        _nonneg("efficiencies.excess_loss_db", self.excess_loss_db)


@dataclass(frozen=True)
class RunConfig:
    seed: int
    trials_per_state: int = 240
    shots_per_basis: int = 0
    bootstrap_resamples: int = 1000

    def __post_init__(self):
        _require(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "run.seed",
                 f"must be an unsigned 64-bit integer, got {self.seed!r}")
        _require(isinstance(self.trials_per_state, int) and self.trials_per_state >= 1,
                 "run.trials_per_state", "must be a positive integer")
        _require(isinstance(self.shots_per_basis, int) and self.shots_per_basis >= 0,
                 "run.shots_per_basis", "must be a non-negative integer (0 = one shot per trial)")
        _require(isinstance(self.bootstrap_resamples, int) and self.bootstrap_resamples >= 100,
                 "run.bootstrap_resamples", "must be an integer >= 100")


@dataclass(frozen=True)
class ExperimentConfig:
    run: RunConfig
    mode: str = "with_ff"
    sources: SourcesConfig = field(default_factory=SourcesConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    clock: ClockConfig = field(default_factory=ClockConfig)
    efficiencies: EfficiencyConfig = field(default_factory=EfficiencyConfig)

    def __post_init__(self):
        _require(self.mode in {m.value for m in Mode}, "mode",
                 f"must be one of {[m.value for m in Mode]}, got {self.mode!r}")

    # -- derived model objects

    @property
    def noise_params(self) -> NoiseParams:
        return NoiseParams(self.noise.visibility, self.noise.unitary_fidelity)

    @property
    def topology_model(self) -> NetworkTopology:
        t = self.topology
        return NetworkTopology(
            alice_charlie=ChannelParams(t.alice_charlie_km, t.alice_charlie_loss_db),
            charlie_bob=ChannelParams(t.charlie_bob_km, t.charlie_bob_loss_db),
            charlie_buffer_km=t.charlie_buffer_km,
            bob_buffer_km=t.bob_buffer_km,
            classical_latency_ns=t.classical_latency_ns,
        )

    @property
    def clock_model(self) -> ClockModel:
        c = self.clock
        return ClockModel(c.repetition_period_ns, c.jitter_rms_ps, c.coherence_time_ps)

    @property
    def budget_inputs(self) -> BudgetInputs:
        t, e = self.topology, self.efficiencies
        return BudgetInputs(
            mean_pairs_alice=self.sources.mean_pairs_alice,
            mean_pairs_charlie=self.sources.mean_pairs_charlie,
            alice_charlie=ChannelParams(t.alice_charlie_km, t.alice_charlie_loss_db),
            charlie_bob=ChannelParams(t.charlie_bob_km, t.charlie_bob_loss_db),
            charlie_buffer_km=t.charlie_buffer_km,
            bob_buffer_km=t.bob_buffer_km,
            detector_efficiency=e.detector,
            heralding_efficiency=e.heralding,
            analysis_efficiency=e.analysis_arm,
            buffer_loss_db_per_km=e.buffer_loss_db_per_km,
            excess_loss_db=e.excess_loss_db,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        """Copy with dotted-path overrides, e.g. ``replace(**{"run.seed": 7})``."""
        d = self.to_dict()
        for path, value in changes.items():
            node = d
            *parents, leaf = path.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise ConfigError(f"{path}: unknown key")
            node[leaf] = value
        return config_from_dict(d)


_SECTIONS = {
    "sources": SourcesConfig,
    "noise": NoiseConfig,
    "topology": TopologyConfig,
    "clock": ClockConfig,
    "efficiencies": EfficiencyConfig,
    "run": RunConfig,
}

_FLOAT_SECTIONS = {"sources", "noise", "topology", "clock", "efficiencies"}


def _build_section(name: str, cls, raw: Any):
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a table")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown key")
    values = {}
    for key, v in raw.items():
        path = f"{name}.{key}"
        if isinstance(v, bool):
            raise ConfigError(f"{path}: expected a number, got a boolean")
        if name in _FLOAT_SECTIONS:
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{path}: expected a finite number, got {v!r}")
            v = float(v)
        elif not isinstance(v, int):
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
        values[key] = v
    if name == "run" and "seed" not in values:
        raise ConfigError("run.seed: missing (a seed is required for reproducibility)")
    try:
        return cls(**values)
    except TypeError as exc:  # pragma: no cover - guarded by the key check
        raise ConfigError(f"{name}: {exc}") from exc


def config_from_dict(d: dict) -> ExperimentConfig:
    unknown = sorted(set(d) - set(_SECTIONS) - {"mode"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    if "run" not in d:
        raise ConfigError("run.seed: missing (a seed is required for reproducibility)")
    sections = {name: _build_section(name, cls, d[name]) for name, cls in _SECTIONS.items() if name in d}
    mode = d.get("mode", "with_ff")
    if not isinstance(mode, str):
        raise ConfigError(f"mode: expected a string, got {mode!r}")
    return ExperimentConfig(mode=mode, **sections)


def shipped_config_path(name: str) -> Path:
    return Path(str(resources.files("teleportsim") / "configs" / f"{name}.toml"))


def load_config(source: str | Path) -> ExperimentConfig:
    """Load a TOML config file, or a shipped config by name (``"calibrated"``)."""
    path = Path(source)
    if not path.exists() and str(source) in SHIPPED_CONFIGS:
        path = shipped_config_path(str(source))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(source)!r}: {exc.strerror}") from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    return config_from_dict(raw)
