"""Exact one- and two-qubit linear algebra in the time-bin basis.

Basis ordering is fixed: ``|t0> = (1, 0)``, ``|t1> = (0, 1)``. Two-qubit
vectors use the Kronecker ordering ``|a b> = kron(a, b)``. Bell states are
always enumerated as PhiPlus, PhiMinus, PsiPlus, PsiMinus.

Density matrices are plain ``numpy`` arrays; :func:`check_density_matrix`
enforces the invariants (Hermitian, unit trace, PSD up to a small slack).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ATOL = 1e-12
PSD_SLACK = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False

PAULI_LABELS = ("I", "X", "Y", "Z")
PAULIS = {"I": I2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
PAULI_BASIS = np.stack([I2, SIGMA_X, SIGMA_Y, SIGMA_Z])
PAULI_BASIS.flags.writeable = False


class QubitMathError(ValueError):
    """Raised for dimension mismatches and invalid operators or states."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PureState:
    """Normalized single-qubit state ``alpha|t0> + beta|t1>``.

    Equality is up to a global phase. The stored amplitudes are exactly what
    was passed in; use :meth:`canonical` for the phase-fixed form.
    """

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > ATOL:
            raise QubitMathError(f"state not normalized: |a|^2+|b|^2 = {norm!r}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @classmethod
    def from_vector(cls, vec, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape != (2,):
            raise QubitMathError(f"expected a 2-vector, got shape {vec.shape}")
        if normalize:
            n = np.linalg.norm(vec)
            if n == 0:
                raise QubitMathError("cannot normalize the zero vector")
            vec = vec / n
        return cls(vec[0], vec[1])

    @property
    def vector(self) -> np.ndarray:
        return _frozen(np.array([self.alpha, self.beta], dtype=complex))

    def projector(self) -> np.ndarray:
        v = self.vector
        return _frozen(np.outer(v, v.conj()))

    def canonical(self) -> "PureState":
        """Return the representative whose first nonzero amplitude is real and >= 0."""
        lead = self.alpha if abs(self.alpha) > ATOL else self.beta
        phase = lead / abs(lead)
        a, b = self.alpha / phase, self.beta / phase
        if abs(self.alpha) > ATOL:
            a = complex(abs(self.alpha), 0.0)
        else:
            b = complex(abs(self.beta), 0.0)
        return PureState(a, b)

    def overlap(self, other: "PureState") -> float:
        """|<self|other>|^2, a phase-free comparison."""
        return float(abs(np.vdot(self.vector, other.vector)) ** 2)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return abs(a.alpha - b.alpha) <= 1e-10 and abs(a.beta - b.beta) <= 1e-10

    def __hash__(self):
        c = self.canonical()
        return hash((round(c.alpha.real, 9), round(c.alpha.imag, 9),
                     round(c.beta.real, 9), round(c.beta.imag, 9)))


T0 = PureState(1, 0)
T1 = PureState(0, 1)
PLUS_D = PureState(1 / np.sqrt(2), 1 / np.sqrt(2))
PLUS_R = PureState(1 / np.sqrt(2), 1j / np.sqrt(2))


class BellState(enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self]

    @property
    def pauli(self) -> str:
        """Pauli label of Bob's correction-free branch: the operator P with
        Bob's conditional state proportional to ``P|psi>``."""
        return _BELL_PAULI[self]


_s = 1 / np.sqrt(2)
_BELL_VECTORS = {
    BellState.PHI_PLUS: _frozen(np.array([_s, 0, 0, _s], dtype=complex)),
    BellState.PHI_MINUS: _frozen(np.array([_s, 0, 0, -_s], dtype=complex)),
    BellState.PSI_PLUS: _frozen(np.array([0, _s, _s, 0], dtype=complex)),
    BellState.PSI_MINUS: _frozen(np.array([0, _s, -_s, 0], dtype=complex)),
}
_BELL_PAULI = {
    BellState.PHI_PLUS: "I",
    BellState.PHI_MINUS: "Z",
    BellState.PSI_PLUS: "X",
    BellState.PSI_MINUS: "Y",
}
BELL_ORDER = (BellState.PHI_PLUS, BellState.PHI_MINUS, BellState.PSI_PLUS, BellState.PSI_MINUS)


def check_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Validate and return ``rho`` as a complex array.

    Raises
    ------
    QubitMathError
        If ``rho`` is not square of dimension 2 or 4 (or ``dim``), not
        Hermitian within 1e-12, not unit-trace within 1e-12, or has an
        eigenvalue below ``-PSD_SLACK``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise QubitMathError(f"expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise QubitMathError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T)) > ATOL:
        raise QubitMathError("matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > ATOL:
        raise QubitMathError(f"trace is {tr!r}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -PSD_SLACK:
        raise QubitMathError("matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho, dim: int | None = None) -> bool:
    try:
        check_density_matrix(rho, dim)
    except QubitMathError:
        return False
    return True


def check_unitary(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise QubitMathError(f"expected a 2x2 operator, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - I2)) > ATOL:
        raise QubitMathError("operator is not unitary")
    return u


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit density matrices."""
    a = check_density_matrix(a, 2)
    b = check_density_matrix(b, 2)
    return _frozen(np.kron(a, b))


def apply_unitary(u, state):
    """Apply a 2x2 unitary to a :class:`PureState` or a 2x2 density matrix."""
    u = check_unitary(u)
    if isinstance(state, PureState):
        return PureState.from_vector(u @ state.vector)
    rho = check_density_matrix(state, 2)
    return _frozen(u @ rho @ u.conj().T)


def fidelity_pure(target: PureState, rho) -> float:
    """<target|rho|target> for a single-qubit density matrix."""
    rho = check_density_matrix(rho, 2)
    v = target.vector
    f = np.vdot(v, rho @ v)
    return float(min(1.0, max(0.0, f.real)))


def partial_trace(rho4, keep: str = "first") -> np.ndarray:
    """Reduce a two-qubit density matrix to one qubit.

    ``keep`` is ``"first"`` or ``"second"``.
    """
    rho4 = check_density_matrix(rho4, 4)
    t = rho4.reshape(2, 2, 2, 2)
    if keep == "first":
        out = np.einsum("ajbj->ab", t)
    elif keep == "second":
        out = np.einsum("jajb->ab", t)
    else:
        raise QubitMathError(f"keep must be 'first' or 'second', got {keep!r}")
    return _frozen(out)


@dataclass(frozen=True)
class BellBranch:
    bell: BellState
    conditional: PureState
    probability: float


def bell_decompose(psi: PureState) -> list[BellBranch]:
    """Project ``|psi>_in (x) |PhiPlus>_si`` onto the Bell basis of (in, s).

    Returns one branch per Bell state in the fixed order, with Bob's (idler)
    conditional state in canonical phase and its Born probability.
    """
    epr = BellState.PHI_PLUS.vector
    joint = np.kron(psi.vector, epr).reshape(4, 2)  # rows: (in, s), cols: idler
    branches = []
    for bell in BELL_ORDER:
        bob = bell.vector.conj() @ joint
        p = float(np.vdot(bob, bob).real)
        cond = PureState.from_vector(bob, normalize=True).canonical()
        branches.append(BellBranch(bell, cond, p))
    return branches


def density_from_bloch(r) -> np.ndarray:
    """(I + r . sigma) / 2 without any PSD check."""
    r = np.asarray(r, dtype=float)
    return (I2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z) / 2


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def haar_random_states(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random qubit vectors as an (n, 2) complex array."""
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_random_state(rng: np.random.Generator) -> PureState:
    return PureState.from_vector(haar_random_states(1, rng)[0], normalize=True)
