"""Single-qubit state tomography and process (chi-matrix) tomography."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .qubit_math import (
    I2,
    PAULI_BASIS,
    PAULI_LABELS,
    PLUS_D,
    PLUS_R,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    T0,
    T1,
    PureState,
    check_density_matrix,
)

BASES = ("Z", "X", "Y")
_BASIS_OPS = {"Z": SIGMA_Z, "X": SIGMA_X, "Y": SIGMA_Y}


class TomographyError(ValueError):
    pass


@dataclass(frozen=True)
class CountTable:
    """Two-outcome counts per measurement basis, ``(n_plus, n_minus)``."""

    z: tuple[int, int]
    x: tuple[int, int]
    y: tuple[int, int]

    def __post_init__(self):
        for b in ("z", "x", "y"):
            pair = tuple(int(c) for c in getattr(self, b))
            if len(pair) != 2 or min(pair) < 0:
                raise TomographyError(f"basis {b.upper()}: counts must be two non-negative integers")
            object.__setattr__(self, b, pair)

    def __getitem__(self, basis: str) -> tuple[int, int]:
        return getattr(self, basis.lower())

    def totals(self) -> dict[str, int]:
        return {b: sum(self[b]) for b in BASES}

    def to_dict(self) -> dict:
        return {b: {"plus": self[b][0], "minus": self[b][1]} for b in BASES}

    @classmethod
    def from_dict(cls, d: Mapping) -> "CountTable":
        unknown = set(d) - set(BASES)
        if unknown:
            raise TomographyError(f"unknown bases in count table: {sorted(unknown)}")
        try:
            vals = {b.lower(): (d[b]["plus"], d[b]["minus"]) for b in BASES}
        except (KeyError, TypeError) as exc:
            raise TomographyError(f"malformed count table: missing {exc}") from exc
        return cls(**vals)

    @classmethod
    def from_array(cls, arr) -> "CountTable":
        """From a (3, 2) array ordered Z, X, Y."""
        arr = np.asarray(arr)
        return cls(tuple(arr[0]), tuple(arr[1]), tuple(arr[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.x, self.y], dtype=np.int64)


def plus_probability(rho, basis: str) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.clip(np.trace(rho @ (I2 + _BASIS_OPS[basis]) / 2).real, 0.0, 1.0))


def simulate_counts(rho, shots_per_basis: int, rng: np.random.Generator) -> CountTable:
    """Binomial counts for each Pauli basis with ``shots_per_basis`` shots."""
    if int(shots_per_basis) != shots_per_basis or shots_per_basis < 1:
        raise TomographyError(f"shots_per_basis must be a positive integer, got {shots_per_basis!r}")
    rho = check_density_matrix(rho, 2)
    counts = []
    for b in BASES:
        k = int(rng.binomial(int(shots_per_basis), plus_probability(rho, b)))
        counts.append((k, int(shots_per_basis) - k))
    return CountTable.from_array(counts)


def sample_event_counts(states, rng: np.random.Generator) -> CountTable:
    """Measure each state once, cycling through the Z, X, Y bases.

    ``states`` is an (n, 2, 2) stack; event ``i`` is measured in basis
    ``i mod 3``.
    """
    states = np.asarray(states, dtype=complex)
    n = states.shape[0]
    basis = np.arange(n) % 3
    plus = _kernels.measure_batch(states, basis, rng.random(n))
    out = np.zeros((3, 2), dtype=np.int64)
    np.add.at(out, (basis, np.where(plus, 0, 1)), 1)
    return CountTable.from_array(out)


def project_to_density(mat) -> np.ndarray:
    """Hermitize, clip negative eigenvalues and rescale to unit trace.

    Surviving eigenvalues are rescaled proportionally.
    """
    mat = np.asarray(mat, dtype=complex)
    mat = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise TomographyError("matrix has no positive spectrum to project onto")
    w = w / w.sum()
    out = (v * w) @ v.conj().T
    return (out + out.conj().T) / 2


def stokes_vector(counts: CountTable) -> np.ndarray:
    r = []
    for b in ("X", "Y", "Z"):
        p, m = counts[b]
        if p + m == 0:
            raise TomographyError(f"basis {b} has zero total counts")
        r.append((p - m) / (p + m))
    return np.array(r)


def reconstruct_state(counts: CountTable) -> np.ndarray:
    """Linear-inversion estimate, projected onto the physical states if needed."""
    rx, ry, rz = stokes_vector(counts)
    rho = (I2 + rx * SIGMA_X + ry * SIGMA_Y + rz * SIGMA_Z) / 2
    if np.min(np.linalg.eigvalsh(rho)) < 0:
        rho = project_to_density(rho)
    return rho


# --------------------------------------------------------------------------
# process tomography

PROCESS_INPUTS = {"T0": T0, "T1": T1, "D": PLUS_D, "R": PLUS_R}

# beta[j, a, b, m, n] = (sigma_m sigma_j sigma_n)[a, b]
_BETA = np.einsum("mac,jcd,ndb->jabmn", PAULI_BASIS, PAULI_BASIS, PAULI_BASIS).reshape(16, 16)


def pauli_images(outputs: Mapping[str, np.ndarray]) -> np.ndarray:
    """Channel images of I, X, Y, Z from outputs for the t0, t1, D, R inputs."""
    missing = [k for k in PROCESS_INPUTS if k not in outputs]
    if missing:
        raise TomographyError(f"missing process-tomography inputs: {missing}")
    e0, e1, ed, er = (np.asarray(outputs[k], dtype=complex) for k in ("T0", "T1", "D", "R"))
    e_i = e0 + e1
    return np.stack([e_i, 2 * ed - e_i, 2 * er - e_i, e0 - e1])


def chi_from_pauli_images(images) -> np.ndarray:
    """Solve E(sigma_j) = sum_mn chi_mn sigma_m sigma_j sigma_n for chi (unprojected)."""
    rhs = np.asarray(images, dtype=complex).reshape(16)
    chi = np.linalg.solve(_BETA, rhs).reshape(4, 4)
    return (chi + chi.conj().T) / 2


def reconstruct_process(io_pairs) -> np.ndarray:
    """Chi matrix in the Pauli basis from the four canonical input/output pairs.

    ``io_pairs`` maps a label in {T0, T1, D, R} (or the corresponding
    :class:`PureState`) to the output density matrix.
    """
    outputs = {}
    items = io_pairs.items() if isinstance(io_pairs, Mapping) else io_pairs
    for key, rho in items:
        if isinstance(key, PureState):
            label = next((k for k, s in PROCESS_INPUTS.items() if s == key), None)
            if label is None:
                raise TomographyError(f"input {key} is not one of t0, t1, D, R")
        else:
            label = key.name if hasattr(key, "name") else str(key)
        outputs[label] = check_density_matrix(rho, 2)
    chi = chi_from_pauli_images(pauli_images(outputs))
    return project_to_density(chi)


def check_chi(chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4, 4):
        raise TomographyError(f"chi must be 4x4, got {chi.shape}")
    if np.max(np.abs(chi - chi.conj().T)) > 1e-10:
        raise TomographyError("chi is not Hermitian")
    if abs(np.trace(chi) - 1) > 1e-10:
        raise TomographyError("chi does not have unit trace")
    if np.min(np.linalg.eigvalsh(chi)) < -1e-8:
        raise TomographyError("chi is not positive semidefinite")
    return chi


def pauli_projector_chi(label: str) -> np.ndarray:
    """Chi of the unitary channel rho -> P rho P for a Pauli ``label``."""
    i = PAULI_LABELS.index(label)
    chi = np.zeros((4, 4), dtype=complex)
    chi[i, i] = 1.0
    return chi


CHI_IDEAL = pauli_projector_chi("Y")


def process_fidelity(chi, chi_ideal=CHI_IDEAL) -> float:
    chi = check_chi(chi)
    chi_ideal = check_chi(chi_ideal)
    return float(np.clip(np.trace(chi @ chi_ideal).real, 0.0, 1.0))


def average_fidelity_from_process(process_fid: float) -> float:
    """Haar-average state fidelity of a qubit channel: (2 F_p + 1) / 3."""
    if not 0.0 <= process_fid <= 1.0:
        raise ValueError(f"process fidelity must lie in [0, 1], got {process_fid!r}")
    return (2.0 * process_fid + 1.0) / 3.0


def apply_chi(chi, rho) -> np.ndarray:
    """E(rho) = sum_mn chi_mn sigma_m rho sigma_n."""
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    return np.einsum("mn,mab,bc,ncd->ad", chi, PAULI_BASIS, rho, PAULI_BASIS)
