"""Batch Monte Carlo kernels with a numba path and a pure-numpy path.

Every kernel consumes uniforms drawn beforehand by the caller, so both
backends make identical decisions for identical inputs. The backend is chosen
once at import: numba when importable, unless ``TELEPORTSIM_DISABLE_NUMBA`` is
set to a truthy value.

Outcome codes: 0 = not heralded, 1 = PsiMinus, 2 = PsiPlus.
Bell indices follow PhiPlus, PhiMinus, PsiPlus, PsiMinus.
Measurement bases: 0 = Z, 1 = X, 2 = Y.
"""

from __future__ import annotations

import os

import numpy as np

FAIL, PSI_MINUS, PSI_PLUS = 0, 1, 2

_disabled = os.environ.get("TELEPORTSIM_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _disabled else "numpy"


# --------------------------------------------------------------------------
# numpy path

def _teleport_batch_numpy(alpha, beta, u_bell, u_bsm, u_err, with_ff, visibility, unitary_fidelity):
    n = alpha.shape[0]
    # Bob's unnormalized conditional vectors (P_k psi) / 2 for k = I, Z, X, Y
    cond = np.empty((4, n, 2), dtype=np.complex128)
    cond[0, :, 0], cond[0, :, 1] = alpha, beta
    cond[1, :, 0], cond[1, :, 1] = alpha, -beta
    cond[2, :, 0], cond[2, :, 1] = beta, alpha
    cond[3, :, 0], cond[3, :, 1] = -1j * beta, 1j * alpha
    cond *= 0.5
    probs = np.sum(np.abs(cond) ** 2, axis=2)  # (4, n)
    cum = np.cumsum(probs, axis=0)
    bell = np.minimum(np.sum(u_bell[None, :] >= cum[:3], axis=0), 3).astype(np.int8)

    outcome = np.zeros(n, dtype=np.int8)
    outcome[bell == 3] = PSI_MINUS
    outcome[(bell == 2) & (u_bsm < 0.5)] = PSI_PLUS
    success = outcome == PSI_MINUS
    if with_ff:
        success |= outcome == PSI_PLUS

    idx = np.arange(n)
    v = cond[bell.astype(np.intp), idx]
    v /= np.sqrt(probs[bell.astype(np.intp), idx])[:, None]
    plus = success & (outcome == PSI_PLUS)
    v[plus, 1] = -v[plus, 1]  # sigma_z correction
    rho = v[:, :, None] * v[:, None, :].conj()
    rho = visibility * rho
    rho[:, 0, 0] += (1.0 - visibility) / 2
    rho[:, 1, 1] += (1.0 - visibility) / 2
    dephased = plus & (u_err >= unitary_fidelity)
    rho[dephased, 0, 1] = 0.0
    rho[dephased, 1, 0] = 0.0
    rho[~success] = 0.0
    return bell, outcome, success, rho


def _measure_batch_numpy(rho, basis, u):
    p_z = rho[:, 0, 0].real
    p_x = 0.5 + rho[:, 0, 1].real
    p_y = 0.5 + rho[:, 1, 0].imag
    p_plus = np.where(basis == 0, p_z, np.where(basis == 1, p_x, p_y))
    return u < p_plus


def _classical_fidelity_numpy(alpha, beta, u):
    # inputs are normalized, so |beta|^2 = 1 - |alpha|^2
    p0 = alpha.real**2 + alpha.imag**2
    return np.where(u < p0, p0, 1.0 - p0)


def _fidelity_batch_numpy(vec, rho):
    return np.einsum("ni,nij,nj->n", vec.conj(), rho, vec).real


# --------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)

    @_jit
    def _teleport_batch_numba(alpha, beta, u_bell, u_bsm, u_err, with_ff, visibility, unitary_fidelity):
        n = alpha.shape[0]
        bell = np.zeros(n, dtype=np.int8)
        outcome = np.zeros(n, dtype=np.int8)
        success = np.zeros(n, dtype=np.bool_)
        rho = np.zeros((n, 2, 2), dtype=np.complex128)
        cond = np.empty((4, 2), dtype=np.complex128)
        probs = np.empty(4)
        for t in range(n):
            a, b = alpha[t], beta[t]
            cond[0, 0], cond[0, 1] = a, b
            cond[1, 0], cond[1, 1] = a, -b
            cond[2, 0], cond[2, 1] = b, a
            cond[3, 0], cond[3, 1] = -1j * b, 1j * a
            for k in range(4):
                cond[k, 0] *= 0.5
                cond[k, 1] *= 0.5
                probs[k] = abs(cond[k, 0]) ** 2 + abs(cond[k, 1]) ** 2
            k = 0
            acc = probs[0]
            while k < 3 and u_bell[t] >= acc:
                k += 1
                acc += probs[k]
            bell[t] = k
            if k == 3:
                outcome[t] = PSI_MINUS
            elif k == 2 and u_bsm[t] < 0.5:
                outcome[t] = PSI_PLUS
            ok = outcome[t] == PSI_MINUS or (with_ff and outcome[t] == PSI_PLUS)
            success[t] = ok
            if not ok:
                continue
            norm = np.sqrt(probs[k])
            v0 = cond[k, 0] / norm
            v1 = cond[k, 1] / norm
            if outcome[t] == PSI_PLUS:
                v1 = -v1
            noise = (1.0 - visibility) / 2
            rho[t, 0, 0] = visibility * (v0 * np.conj(v0)) + noise
            rho[t, 0, 1] = visibility * (v0 * np.conj(v1))
            rho[t, 1, 0] = visibility * (v1 * np.conj(v0))
            rho[t, 1, 1] = visibility * (v1 * np.conj(v1)) + noise
            if outcome[t] == PSI_PLUS and u_err[t] >= unitary_fidelity:
                rho[t, 0, 1] = 0.0
                rho[t, 1, 0] = 0.0
        return bell, outcome, success, rho

    @_jit
    def _measure_batch_numba(rho, basis, u):
        n = rho.shape[0]
        out = np.empty(n, dtype=np.bool_)
        for t in range(n):
            if basis[t] == 0:
                p = rho[t, 0, 0].real
            elif basis[t] == 1:
                p = 0.5 + rho[t, 0, 1].real
            else:
                p = 0.5 + rho[t, 1, 0].imag
            out[t] = u[t] < p
        return out

    @_jit
    def _classical_fidelity_numba(alpha, beta, u):
        n = alpha.shape[0]
        out = np.empty(n)
        for t in range(n):
            a = alpha[t]
            p0 = a.real * a.real + a.imag * a.imag
            out[t] = p0 if u[t] < p0 else 1.0 - p0
        return out

    @_jit
    def _fidelity_batch_numba(vec, rho):
        n = vec.shape[0]
        out = np.empty(n)
        for t in range(n):
            acc = 0.0j
            for i in range(2):
                for j in range(2):
                    acc += np.conj(vec[t, i]) * rho[t, i, j] * vec[t, j]
            out[t] = acc.real
        return out


IMPLEMENTATIONS = {
    "numpy": {
        "teleport_batch": _teleport_batch_numpy,
        "measure_batch": _measure_batch_numpy,
        "classical_fidelity": _classical_fidelity_numpy,
        "fidelity_batch": _fidelity_batch_numpy,
    },
}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "teleport_batch": _teleport_batch_numba,
        "measure_batch": _measure_batch_numba,
        "classical_fidelity": _classical_fidelity_numba,
        "fidelity_batch": _fidelity_batch_numba,
    }


def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _as_f(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def teleport_batch(alpha, beta, u_bell, u_bsm, u_err, with_ff, visibility, unitary_fidelity, backend=None):
    """Run a batch of teleportation trials.

    Returns ``(bell_index, outcome_code, success, bob_rho)``; ``bob_rho`` is
    zero for unsuccessful trials.
    """
    impl = IMPLEMENTATIONS[backend or BACKEND]["teleport_batch"]
    return impl(_as_c(alpha), _as_c(beta), _as_f(u_bell), _as_f(u_bsm), _as_f(u_err),
                bool(with_ff), float(visibility), float(unitary_fidelity))


def measure_batch(rho, basis, u, backend=None):
    """Single-shot projective measurements; True means the ``+`` outcome."""
    impl = IMPLEMENTATIONS[backend or BACKEND]["measure_batch"]
    return impl(_as_c(rho), np.ascontiguousarray(basis, dtype=np.int8), _as_f(u))


def classical_fidelity(alpha, beta, u, backend=None):
    """Per-trial fidelity of the time-bin measure-and-prepare strategy."""
    impl = IMPLEMENTATIONS[backend or BACKEND]["classical_fidelity"]
    return impl(_as_c(alpha), _as_c(beta), _as_f(u))


def fidelity_batch(vec, rho, backend=None):
    impl = IMPLEMENTATIONS[backend or BACKEND]["fidelity_batch"]
    return impl(_as_c(vec), _as_c(rho))
