"""Simulation and analysis toolkit for fibre-network time-bin teleportation."""

from ._kernels import BACKEND
from .config import ExperimentConfig, load_config
from .photonics import NoiseParams
from .protocol import BsmOutcome, InputStateLabel, Mode, run_trial
from .qubit_math import BellState, PureState

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BellState",
    "BsmOutcome",
    "ExperimentConfig",
    "InputStateLabel",
    "Mode",
    "NoiseParams",
    "PureState",
    "load_config",
    "run_trial",
]
