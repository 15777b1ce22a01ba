import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleportsim.qubit_math import (
    BELL_ORDER,
    I2,
    PAULIS,
    PLUS_D,
    PLUS_R,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    T0,
    T1,
    BellState,
    PureState,
    QubitMathError,
    apply_unitary,
    bell_decompose,
    check_density_matrix,
    fidelity_pure,
    haar_random_state,
    haar_random_states,
    is_density_matrix,
    partial_trace,
    tensor,
)

finite = st.floats(-1, 1, allow_nan=False)


@st.composite
def pure_states(draw):
    v = np.array([complex(draw(finite), draw(finite)), complex(draw(finite), draw(finite))])
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1, 0], dtype=complex)
    return PureState.from_vector(v, normalize=True)


def random_density(rng, dim=2):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestPauli:
    def test_unitary_and_hermitian(self):
        for p in PAULIS.values():
            np.testing.assert_allclose(p @ p.conj().T, I2, atol=1e-15)
            np.testing.assert_allclose(p, p.conj().T, atol=1e-15)

    def test_xz_anticommute(self):
        np.testing.assert_allclose(SIGMA_X @ SIGMA_Z, -SIGMA_Z @ SIGMA_X, atol=1e-15)

    def test_read_only(self):
        with pytest.raises(ValueError):
            SIGMA_X[0, 0] = 5


class TestPureState:
    def test_normalization_enforced(self):
        with pytest.raises(QubitMathError):
            PureState(1, 1)

    def test_canonical_form(self):
        s = PureState(1j / np.sqrt(2), -1 / np.sqrt(2)).canonical()
        assert s.alpha.imag == 0 and s.alpha.real > 0
        assert s == PureState(1 / np.sqrt(2), 1j / np.sqrt(2))

    def test_canonical_leading_zero(self):
        s = PureState(0, -1j).canonical()
        assert s.alpha == 0 and s.beta == 1

    @given(pure_states(), st.floats(0, 2 * np.pi))
    def test_equality_ignores_global_phase(self, psi, phase):
        shifted = PureState.from_vector(np.exp(1j * phase) * psi.vector)
        assert psi == shifted

    @given(pure_states(), pure_states(), pure_states())
    def test_equivalence_relation(self, a, b, c):
        assert a == a
        assert (a == b) == (b == a)
        if a == b and b == c:
            assert a == c


class TestTensor:
    def test_maximally_mixed(self):
        np.testing.assert_allclose(tensor(I2 / 2, I2 / 2), np.eye(4) / 4)

    def test_product_of_projectors(self):
        expected = np.zeros((4, 4))
        expected[1, 1] = 1  # |t0 t1>
        np.testing.assert_allclose(tensor(T0.projector(), T1.projector()), expected)

    def test_trace_multiplies(self):
        rng = np.random.default_rng(1)
        rho, sigma = random_density(rng), random_density(rng)
        out = tensor(rho, sigma)
        # oracle: explicit multiply-and-sum over the diagonal
        tr = sum(rho[i, i] * sigma[j, j] for i in range(2) for j in range(2))
        assert abs(np.trace(out) - tr) < 1e-12
        assert abs(np.trace(out) - 1) < 1e-12
        check_density_matrix(out)

    def test_dimension_mismatch(self):
        with pytest.raises(QubitMathError):
            tensor(np.eye(4) / 4, I2 / 2)


class TestApplyUnitary:
    def test_sigma_y_on_t0(self):
        assert apply_unitary(SIGMA_Y, T0) == T1

    def test_sigma_z_on_d(self):
        assert apply_unitary(SIGMA_Z, PLUS_D) == PureState(1 / np.sqrt(2), -1 / np.sqrt(2))

    def test_sigma_x_on_r(self):
        # sigma_x (1, i)/sqrt2 = (i, 1)/sqrt2 = i (1, -i)/sqrt2
        out = apply_unitary(SIGMA_X, PLUS_R).canonical()
        np.testing.assert_allclose(out.vector, np.array([1, -1j]) / np.sqrt(2), atol=1e-12)

    def test_density_conjugation(self):
        rho = apply_unitary(SIGMA_Y, PLUS_D.projector())
        np.testing.assert_allclose(rho, apply_unitary(SIGMA_Y, PLUS_D).projector(), atol=1e-12)

    def test_non_unitary_rejected(self):
        with pytest.raises(QubitMathError):
            apply_unitary(np.array([[1, 1], [0, 1]]), T0)

    @given(pure_states())
    def test_sigma_y_involution(self, psi):
        assert apply_unitary(SIGMA_Y, apply_unitary(SIGMA_Y, psi)) == psi


class TestFidelity:
    def test_self_fidelity(self):
        assert fidelity_pure(PLUS_R, PLUS_R.projector()) == pytest.approx(1, abs=1e-12)

    def test_mixed(self):
        assert fidelity_pure(T0, I2 / 2) == pytest.approx(0.5, abs=1e-12)

    def test_white_noise_closed_form(self):
        v = 0.917
        rho = v * PLUS_D.projector() + (1 - v) * I2 / 2
        assert fidelity_pure(PLUS_D, rho) == pytest.approx(v + (1 - v) / 2, abs=1e-12)
        assert fidelity_pure(PLUS_D, rho) == pytest.approx(0.9585, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(QubitMathError):
            fidelity_pure(T0, np.eye(4) / 4)


class TestPartialTrace:
    def test_bell_state_reduces_to_mixed(self):
        v = BellState.PHI_PLUS.vector
        rho = np.outer(v, v.conj())
        for keep in ("first", "second"):
            np.testing.assert_allclose(partial_trace(rho, keep), I2 / 2, atol=1e-12)

    def test_product_state(self):
        rng = np.random.default_rng(2)
        rho, sigma = random_density(rng), random_density(rng)
        np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), "first"), rho, atol=1e-12)
        np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), "second"), sigma, atol=1e-12)

    def test_output_is_valid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            out = partial_trace(random_density(rng, 4), "second")
            assert abs(np.trace(out) - 1) < 1e-12
            check_density_matrix(out, 2)

    def test_bad_keep(self):
        with pytest.raises(QubitMathError):
            partial_trace(np.eye(4) / 4, "both")


class TestBellStates:
    def test_orthonormal(self):
        m = np.array([b.vector for b in BELL_ORDER])
        np.testing.assert_allclose(m.conj() @ m.T, np.eye(4), atol=1e-15)

    def test_phi_plus(self):
        np.testing.assert_allclose(BellState.PHI_PLUS.vector, np.array([1, 0, 0, 1]) / np.sqrt(2))


def brute_force_bell(psi: PureState):
    """Project the full 8-dim state with explicit (4-dim projector) x I and trace out."""
    full = np.kron(psi.vector, BellState.PHI_PLUS.vector)
    rho = np.outer(full, full.conj())
    out = {}
    for bell in BELL_ORDER:
        proj = np.kron(np.outer(bell.vector, bell.vector.conj()), np.eye(2))
        post = proj @ rho @ proj
        bob = np.zeros((2, 2), dtype=complex)
        for k in range(4):
            bob += post[2 * k:2 * k + 2, 2 * k:2 * k + 2]
        out[bell] = bob  # unnormalized: trace is the Born probability
    return out


class TestBellDecompose:
    def test_probabilities_quarter(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            branches = bell_decompose(haar_random_state(rng))
            probs = [b.probability for b in branches]
            assert sum(probs) == pytest.approx(1, abs=1e-12)
            np.testing.assert_allclose(probs, 0.25, atol=1e-12)

    def test_t0_psi_minus(self):
        br = {b.bell: b for b in bell_decompose(T0)}
        assert br[BellState.PSI_MINUS].conditional == T1
        assert br[BellState.PHI_PLUS].conditional == T0

    def test_conditional_paulis(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            psi = haar_random_state(rng)
            for b in bell_decompose(psi):
                assert b.conditional == apply_unitary(PAULIS[b.bell.pauli], psi)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            psi = haar_random_state(rng)
            oracle = brute_force_bell(psi)
            for b in bell_decompose(psi):
                ours = b.probability * b.conditional.projector()
                np.testing.assert_allclose(ours, oracle[b.bell], atol=1e-10)

    def test_canonical_phase(self):
        for b in bell_decompose(PLUS_R):
            assert b.conditional.alpha.imag == 0 and b.conditional.alpha.real >= 0


def test_haar_states_normalized():
    psi = haar_random_states(500, np.random.default_rng(7))
    np.testing.assert_allclose(np.linalg.norm(psi, axis=1), 1, atol=1e-12)


def test_check_density_rejects():
    assert not is_density_matrix(np.array([[1, 0], [0, 1]]))
    assert not is_density_matrix(np.array([[1.5, 0], [0, -0.5]]))
    assert not is_density_matrix(np.array([[0.5, 0.5j], [0.5j, 0.5]]))
    assert is_density_matrix(I2 / 2)
