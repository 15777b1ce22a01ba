"""Teleportation trials: Bell measurement, feed-forward and fidelity accounting.

Bob's target is always ``sigma_y |psi_in>``. A PsiMinus herald leaves Bob's
photon already in that state; a PsiPlus herald leaves ``sigma_x |psi_in>``,
which the sigma_z correction maps onto the target up to a global phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .photonics import NoiseParams, apply_unitary_error, apply_visibility
from .qubit_math import (
    I2,
    PLUS_D,
    PLUS_R,
    SIGMA_Y,
    SIGMA_Z,
    T0,
    T1,
    BellState,
    PureState,
    apply_unitary,
    bell_decompose,
    fidelity_pure,
    haar_random_states,
)
from .stats import mean_and_stderr

BSM_SUCCESS_WITH_FF = 3.0 / 8.0
BSM_SUCCESS_WITHOUT_FF = 1.0 / 4.0


class InputStateLabel(enum.Enum):
    T0 = "T0"
    T1 = "T1"
    D = "D"
    R = "R"

    @property
    def state(self) -> PureState:
        return {"T0": T0, "T1": T1, "D": PLUS_D, "R": PLUS_R}[self.value]


INPUT_LABELS = tuple(InputStateLabel)


class BsmOutcome(enum.Enum):
    PSI_MINUS = "PsiMinus"
    PSI_PLUS = "PsiPlus"
    FAIL = "Fail"


class Mode(enum.Enum):
    WITH_FF = "with_ff"
    WITHOUT_FF = "without_ff"


def success_probability(mode: Mode | str) -> float:
    return BSM_SUCCESS_WITH_FF if Mode(mode) is Mode.WITH_FF else BSM_SUCCESS_WITHOUT_FF


def target_state(psi: PureState) -> PureState:
    return apply_unitary(SIGMA_Y, psi)


@dataclass(frozen=True)
class TrialResult:
    outcome: BsmOutcome
    target: PureState
    bob_state: np.ndarray | None = field(default=None, compare=False)
    feed_forward_applied: bool = False
    success: bool = False

    def fidelity(self) -> float:
        if self.bob_state is None:
            raise ValueError("failed trial has no Bob state")
        return fidelity_pure(self.target, self.bob_state)


def bsm_discriminate(true_bell: BellState, rng: np.random.Generator) -> BsmOutcome:
    """Linear-optics Bell measurement with detector dead time.

    PsiMinus is always identified; PsiPlus half of the time (both photons
    reach the same detector otherwise); Phi states never herald. One uniform
    is drawn per call regardless of the input.
    """
    u = rng.random()
    if true_bell is BellState.PSI_MINUS:
        return BsmOutcome.PSI_MINUS
    if true_bell is BellState.PSI_PLUS and u < 0.5:
        return BsmOutcome.PSI_PLUS
    return BsmOutcome.FAIL


def feed_forward_correction(outcome: BsmOutcome) -> np.ndarray:
    if outcome is BsmOutcome.PSI_MINUS:
        return I2
    if outcome is BsmOutcome.PSI_PLUS:
        return SIGMA_Z
    raise ValueError("no correction exists for a failed Bell measurement")


def run_trial(psi: PureState, noise: NoiseParams, mode: Mode | str, rng: np.random.Generator) -> TrialResult:
    """One teleportation attempt. Draws exactly three uniforms from ``rng``."""
    mode = Mode(mode)
    target = target_state(psi)
    branches = bell_decompose(psi)
    u = rng.random()
    acc, chosen = 0.0, branches[-1]
    for br in branches:
        acc += br.probability
        if u < acc:
            chosen = br
            break
    outcome = bsm_discriminate(chosen.bell, rng)
    if outcome is BsmOutcome.FAIL:
        rng.random()
        return TrialResult(outcome, target)

    rho = apply_visibility(chosen.conditional.projector(), noise.visibility)
    if outcome is BsmOutcome.PSI_MINUS:
        rng.random()
        return TrialResult(outcome, target, rho, False, True)
    if mode is Mode.WITHOUT_FF:
        rng.random()
        return TrialResult(outcome, target, rho, False, False)
    rho = apply_unitary_error(rho, noise.unitary_fidelity, feed_forward_correction(outcome), rng)
    return TrialResult(outcome, target, rho, True, True)


def classical_trial(psi: PureState, rng: np.random.Generator) -> np.ndarray:
    """Measure in the time-bin basis and prepare the observed eigenstate."""
    return T0.projector() if rng.random() < abs(psi.alpha) ** 2 else T1.projector()


def classical_fidelities(n: int, rng: np.random.Generator, backend=None) -> np.ndarray:
    """Per-trial fidelities of the measure-and-prepare strategy on Haar inputs."""
    psi = haar_random_states(n, rng)
    return _kernels.classical_fidelity(psi[:, 0], psi[:, 1], rng.random(n), backend=backend)


# --------------------------------------------------------------------------
# batches

@dataclass(frozen=True)
class TrialBatch:
    bell: np.ndarray
    outcome: np.ndarray
    success: np.ndarray
    bob_states: np.ndarray
    targets: np.ndarray

    def __len__(self):
        return self.bell.shape[0]

    def fidelities(self, backend=None) -> np.ndarray:
        """Fidelities of the successful trials, in trial order."""
        s = self.success
        return _kernels.fidelity_batch(self.targets[s], self.bob_states[s], backend=backend)


def run_trial_batch(psi, noise: NoiseParams, mode: Mode | str, rng: np.random.Generator,
                    n: int | None = None, backend=None) -> TrialBatch:
    """Vectorized :func:`run_trial`.

    ``psi`` is a single :class:`PureState` repeated ``n`` times, or an (n, 2)
    array of input vectors. Uniforms are drawn as an (n, 3) block, so a batch
    reproduces ``n`` consecutive calls to :func:`run_trial` on the same stream.
    """
    if isinstance(psi, PureState):
        if n is None:
            raise ValueError("n is required for a single input state")
        vecs = np.broadcast_to(psi.vector, (n, 2))
    else:
        vecs = np.asarray(psi, dtype=complex)
        n = vecs.shape[0]
    u = rng.random((n, 3))
    bell, outcome, success, rho = _kernels.teleport_batch(
        vecs[:, 0], vecs[:, 1], u[:, 0], u[:, 1], u[:, 2],
        Mode(mode) is Mode.WITH_FF, noise.visibility, noise.unitary_fidelity, backend=backend,
    )
    targets = np.stack([-1j * vecs[:, 1], 1j * vecs[:, 0]], axis=1)
    return TrialBatch(bell, outcome, success, rho, targets)


@dataclass(frozen=True)
class LabelRun:
    """Successful trials collected for one input state."""

    attempts: int
    outcomes: np.ndarray
    bob_states: np.ndarray
    fidelities: np.ndarray

    @property
    def successes(self) -> int:
        return int(self.bob_states.shape[0])

    @property
    def failures(self) -> int:
        return self.attempts - self.successes


def collect_successes(psi: PureState, noise: NoiseParams, mode: Mode | str, n_success: int,
                      rng: np.random.Generator, backend=None) -> LabelRun:
    """Run trials until exactly ``n_success`` teleportations succeed."""
    if n_success < 1:
        raise ValueError("n_success must be >= 1")
    p = success_probability(mode)
    attempts = 0
    outcomes, states, fids = [], [], []
    got = 0
    while got < n_success:
        need = n_success - got
        size = int(math.ceil(need / p * 1.2)) + 16
        batch = run_trial_batch(psi, noise, mode, rng, n=size, backend=backend)
        idx = np.flatnonzero(batch.success)
        if idx.size >= need:
            last = idx[need - 1]
            attempts += int(last) + 1
            idx = idx[:need]
        else:
            attempts += size
        outcomes.append(batch.outcome[idx])
        states.append(batch.bob_states[idx])
        fids.append(_kernels.fidelity_batch(batch.targets[idx], batch.bob_states[idx], backend=backend))
        got += idx.size
    return LabelRun(attempts, np.concatenate(outcomes), np.concatenate(states), np.concatenate(fids))


# --------------------------------------------------------------------------
# fidelity accounting

@dataclass(frozen=True)
class FidelitySummary:
    per_label: dict[str, tuple[float, float]]
    mean: float
    stderr: float


def summarize(per_label: Mapping[str, tuple[float, float]]) -> FidelitySummary:
    if not per_label:
        raise ValueError("no groups to average")
    means = [m for m, _ in per_label.values()]
    errs = [e for _, e in per_label.values()]
    k = len(means)
    return FidelitySummary(dict(per_label), float(np.mean(means)),
                           float(np.sqrt(np.sum(np.square(errs))) / k))


def average_fidelity(results: Mapping[str, Sequence[TrialResult]]) -> FidelitySummary:
    """Per-label mean fidelity of successful trials and their unweighted mean."""
    per_label = {}
    for label, group in results.items():
        fids = [r.fidelity() for r in group if r.success]
        if not fids:
            raise ValueError(f"group {label!r} has no successful trials")
        key = label.value if isinstance(label, InputStateLabel) else str(label)
        per_label[key] = mean_and_stderr(fids)
    return summarize(per_label)
