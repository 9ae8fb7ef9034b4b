"""Hot state-vector kernels, numba and pure-numpy flavours.

Amplitude arrays are 1-D complex128 of length ``2**nq``. Qubit ``q`` is bit
``nq - 1 - q`` of the basis index, so qubit 0 is the most significant bit.
Every kernel returns a fresh array and leaves its input untouched.

Both flavours consume the same pre-drawn uniforms, so a seeded run gives the
same outcomes whichever backend is active.
"""
import numpy as np

from ._backend import njit, requested_backend


def _offsets(nq, targets):
    shifts = nq - 1 - np.asarray(targets, dtype=np.int64)
    k = shifts.size
    offs = np.zeros(1 << k, dtype=np.int64)
    for j in range(1 << k):
        o = 0
        for t in range(k):
            if (j >> (k - 1 - t)) & 1:
                o |= 1 << int(shifts[t])
        offs[j] = o
    return offs


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _apply_gate_nb(state, offsets, mask, mat):
    dim = offsets.size
    out = np.empty_like(state)
    tmp = np.empty(dim, dtype=np.complex128)
    for base in range(state.size):
        if base & mask:
            continue
        for j in range(dim):
            tmp[j] = state[base | offsets[j]]
        for i in range(dim):
            acc = 0j
            for j in range(dim):
                acc += mat[i, j] * tmp[j]
            out[base | offsets[i]] = acc
    return out


@njit(cache=True)
def _prob_one_nb(state, bit):
    p = 0.0
    for i in range(state.size):
        if (i >> bit) & 1:
            a = state[i]
            p += a.real * a.real + a.imag * a.imag
    return p


@njit(cache=True)
def _project_nb(state, bit, value, scale):
    out = np.zeros_like(state)
    for i in range(state.size):
        if ((i >> bit) & 1) == value:
            out[i] = state[i] * scale
    return out


@njit(cache=True)
def _measure_bases_nb(state, nq, qubits, xbasis, uniforms):
    s = 1.0 / np.sqrt(2.0)
    psi = state.copy()
    outcomes = np.zeros(qubits.size, dtype=np.int64)
    for t in range(qubits.size):
        bit = nq - 1 - qubits[t]
        step = 1 << bit
        if xbasis[t]:
            for i in range(psi.size):
                if not (i >> bit) & 1:
                    a = psi[i]
                    b = psi[i + step]
                    psi[i] = s * (a + b)
                    psi[i + step] = s * (a - b)
        p1 = 0.0
        for i in range(psi.size):
            if (i >> bit) & 1:
                a = psi[i]
                p1 += a.real * a.real + a.imag * a.imag
        p1 = min(max(p1, 0.0), 1.0)
        v = 1 if uniforms[t] < p1 else 0
        outcomes[t] = v
        norm = np.sqrt(p1 if v else 1.0 - p1)
        for i in range(psi.size):
            if ((i >> bit) & 1) == v:
                psi[i] = psi[i] / norm
            else:
                psi[i] = 0.0
        if xbasis[t]:
            for i in range(psi.size):
                if not (i >> bit) & 1:
                    a = psi[i]
                    b = psi[i + step]
                    psi[i] = s * (a + b)
                    psi[i + step] = s * (a - b)
    return outcomes, psi


# ---------------------------------------------------------------- numpy path


def _apply_gate_np(state, nq, targets, mat):
    k = len(targets)
    psi = state.reshape((2,) * nq)
    m = mat.reshape((2,) * (2 * k))
    psi = np.tensordot(m, psi, axes=(list(range(k, 2 * k)), list(targets)))
    psi = np.moveaxis(psi, list(range(k)), list(targets))
    return np.ascontiguousarray(psi).reshape(-1)


def _prob_one_np(state, nq, q):
    v = state.reshape(1 << q, 2, -1)[:, 1, :]
    return float(np.vdot(v, v).real)


def _project_np(state, nq, q, value, scale):
    out = np.zeros_like(state)
    src = state.reshape(1 << q, 2, -1)
    out.reshape(1 << q, 2, -1)[:, value, :] = src[:, value, :] * scale
    return out


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def _measure_bases_np(state, nq, qubits, xbasis, uniforms):
    psi = state.copy()
    outcomes = np.zeros(len(qubits), dtype=np.int64)
    for t, q in enumerate(qubits):
        view = psi.reshape(1 << int(q), 2, -1)
        if xbasis[t]:
            a, b = view[:, 0, :].copy(), view[:, 1, :].copy()
            view[:, 0, :] = (a + b) * _H[0, 0]
            view[:, 1, :] = (a - b) * _H[0, 0]
        p1 = min(max(float(np.vdot(view[:, 1, :], view[:, 1, :]).real), 0.0), 1.0)
        v = 1 if uniforms[t] < p1 else 0
        outcomes[t] = v
        view[:, v, :] /= np.sqrt(p1 if v else 1.0 - p1)
        view[:, 1 - v, :] = 0.0
        if xbasis[t]:
            a, b = view[:, 0, :].copy(), view[:, 1, :].copy()
            view[:, 0, :] = (a + b) * _H[0, 0]
            view[:, 1, :] = (a - b) * _H[0, 0]
    return outcomes, psi


# ---------------------------------------------------------------- dispatch


def apply_gate(state, nq, targets, mat, backend=None):
    """Apply ``mat`` (2^k x 2^k) to the ordered ``targets`` of ``state``."""
    targets = np.asarray(targets, dtype=np.int64)
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    if (backend or requested_backend()) == "numba":
        mask = 0
        for t in targets:
            mask |= 1 << int(nq - 1 - t)
        return _apply_gate_nb(state, _offsets(nq, targets), mask, mat)
    return _apply_gate_np(state, nq, [int(t) for t in targets], mat)


def prob_one(state, nq, q, backend=None):
    """Probability that qubit ``q`` reads 1."""
    if (backend or requested_backend()) == "numba":
        return float(_prob_one_nb(state, nq - 1 - q))
    return _prob_one_np(state, nq, q)


def project(state, nq, q, value, prob, backend=None):
    """Collapse qubit ``q`` onto ``value`` given that branch's probability."""
    scale = 1.0 / np.sqrt(prob)
    if (backend or requested_backend()) == "numba":
        return _project_nb(state, nq - 1 - q, value, scale)
    return _project_np(state, nq, q, value, scale)


def measure_bases(state, nq, qubits, xbasis, uniforms, backend=None):
    """Measure ``qubits`` in turn, each in Z or (where ``xbasis``) X basis.

    Outcome 0 means |0> or |+>. The post-measurement state keeps the
    measured qubits in the observed basis states.
    """
    qubits = np.asarray(qubits, dtype=np.int64)
    xbasis = np.asarray(xbasis, dtype=np.bool_)
    uniforms = np.asarray(uniforms, dtype=np.float64)
    if (backend or requested_backend()) == "numba":
        return _measure_bases_nb(state, nq, qubits, xbasis, uniforms)
    return _measure_bases_np(state, nq, qubits, xbasis, uniforms)


# ---------------------------------------------------------------- sessions


@njit(cache=True)
def _session_nb(state, nq, offsets, mask, mat, qubits, xbasis, expected, uniforms):
    psi = state
    rounds = uniforms.shape[0]
    for r in range(rounds):
        psi = _apply_gate_nb(psi, offsets, mask, mat)
        got, psi = _measure_bases_nb(psi, nq, qubits, xbasis, uniforms[r])
        for t in range(qubits.size):
            if got[t] != expected[t]:
                return r + 1, True, psi
    return rounds, False, psi


def _session_np(state, nq, targets, mat, qubits, xbasis, expected, uniforms):
    psi = state
    for r in range(uniforms.shape[0]):
        psi = _apply_gate_np(psi, nq, list(targets), mat)
        got, psi = _measure_bases_np(psi, nq, qubits, xbasis, uniforms[r])
        if np.any(got != expected):
            return r + 1, True, psi
    return uniforms.shape[0], False, psi


def verify_session(state, nq, targets, mat, qubits, xbasis, expected, uniforms, backend=None):
    """Alternate ``mat`` on ``targets`` with a basis check of ``qubits``.

    Each of the ``len(uniforms)`` rounds applies the unitary, then measures
    ``qubits`` in their bases and compares with ``expected``. Stops at the
    first mismatch. Returns ``(rounds_run, rejected, state)``.
    """
    targets = np.asarray(targets, dtype=np.int64)
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    qubits = np.asarray(qubits, dtype=np.int64)
    xbasis = np.asarray(xbasis, dtype=np.bool_)
    expected = np.asarray(expected, dtype=np.int64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    if (backend or requested_backend()) == "numba":
        mask = 0
        for t in targets:
            mask |= 1 << int(nq - 1 - t)
        r, rej, psi = _session_nb(state, nq, _offsets(nq, targets), mask, mat, qubits, xbasis, expected, uniforms)
        return int(r), bool(rej), psi
    return _session_np(state, nq, [int(t) for t in targets], mat, qubits, xbasis, expected, uniforms)


@njit(cache=True)
def _product_nb(kets):
    n = kets.shape[0]
    out = np.empty(1 << n, dtype=np.complex128)
    for i in range(out.size):
        a = 1.0 + 0j
        for q in range(n):
            a *= kets[q, (i >> (n - 1 - q)) & 1]
        out[i] = a
    return out


def _product_np(kets):
    out = np.ones(1, dtype=np.complex128)
    for k in kets:
        out = np.multiply.outer(out, k).reshape(-1)
    return out


def product_state(kets, backend=None):
    """Amplitudes of the product of single-qubit states ``kets`` (shape (n, 2))."""
    kets = np.ascontiguousarray(kets, dtype=np.complex128)
    if (backend or requested_backend()) == "numba":
        return _product_nb(kets)
    return _product_np(kets)
