"""Dense state-vector and density-matrix simulator.

Conventions used throughout the package:

* qubit 0 is the most significant bit of a basis index, so ``|q0 q1 ... >``
  reads left to right like the binary expansion of the index;
* trace distance is ``0.5 * sum(|eigenvalues of (rho - sigma)|)``;
* fidelity is ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared), which is
  ``|<psi|phi>|`` for pure inputs.

Values are immutable; every operation returns a new object.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

MAX_QUBITS = 20
NORM_TOL = 1e-10
UNITARY_TOL = 1e-9
EIG_CLIP = 1e-10


class CapacityError(ValueError):
    """Raised when a register would exceed ``MAX_QUBITS``."""


class DimensionError(ValueError):
    """Raised on mismatched sizes, bad targets or malformed operators."""


class InvalidStateError(ValueError):
    """Raised when amplitudes or matrices violate their invariants."""


class UnionBoundPreconditionWarning(UserWarning):
    """A measurement passed to ``sequential_gentle`` is not epsilon-gentle."""


def _check_qubits(n):
    if n < 1:
        raise DimensionError(f"qubit count must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit dense cap")


def _log2(dim):
    n = int(dim).bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


# ------------------------------------------------------------------ types


@dataclass(frozen=True, eq=False)
class PureState:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        _check_qubits(self.n)
        amps = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.n:
            raise DimensionError(f"{amps.size} amplitudes for {self.n} qubits")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm^2 is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def _trusted(cls, n, amps):
        # Internal fast path: caller guarantees shape and normalization.
        obj = object.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "amps", amps)
        return obj

    @classmethod
    def from_amplitudes(cls, amps, normalize=False):
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(_log2(amps.size), amps)

    @classmethod
    def basis(cls, index, n):
        """Computational basis state; ``index`` may be an int or a 0/1 string."""
        if isinstance(index, str):
            n = len(index)
            index = int(index, 2)
        _check_qubits(n)
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls._trusted(n, amps)

    @property
    def dim(self):
        return 1 << self.n

    def probabilities(self):
        return np.abs(self.amps) ** 2

    def __repr__(self):
        return f"PureState(n={self.n})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    mat: np.ndarray

    def __post_init__(self):
        _check_qubits(self.n)
        mat = np.asarray(self.mat, dtype=np.complex128)
        d = 1 << self.n
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} for {self.n} qubits")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > NORM_TOL:
            raise InvalidStateError(f"trace is {np.trace(mat).real!r}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -NORM_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def _trusted(cls, n, mat):
        obj = object.__new__(cls)
        mat.setflags(write=False)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "mat", mat)
        return obj

    @classmethod
    def from_matrix(cls, mat):
        mat = np.asarray(mat, dtype=np.complex128)
        return cls(_log2(mat.shape[0]), mat)

    @property
    def dim(self):
        return 1 << self.n

    def __repr__(self):
        return f"DensityMatrix(n={self.n})"


@dataclass(frozen=True, eq=False)
class Unitary:
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"unitary must be square, got shape {mat.shape}")
        _log2(mat.shape[0])
        err = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if err > UNITARY_TOL:
            raise InvalidStateError(f"matrix is not unitary (error {err:.3g})")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self):
        return self.mat.shape[0]

    @property
    def n(self):
        return _log2(self.dim)

    @property
    def dagger(self):
        return Unitary(self.mat.conj().T)

    def __matmul__(self, other):
        return Unitary(self.mat @ other.mat)


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple

    def __post_init__(self):
        els = tuple(np.asarray(e, dtype=np.complex128) for e in self.elements)
        if not els:
            raise DimensionError("a POVM needs at least one element")
        d = els[0].shape[0]
        for e in els:
            if e.shape != (d, d):
                raise DimensionError("POVM elements must share one square shape")
            if np.max(np.abs(e - e.conj().T)) > UNITARY_TOL:
                raise InvalidStateError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -UNITARY_TOL:
                raise InvalidStateError("POVM element is not PSD")
        if np.max(np.abs(sum(els) - np.eye(d))) > UNITARY_TOL:
            raise InvalidStateError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self):
        return self.elements[0].shape[0]


@dataclass(frozen=True, eq=False)
class Superoperator:
    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus)
        if not ks:
            raise DimensionError("a superoperator needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise DimensionError("Kraus operators must share one shape")
        total = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(total - np.eye(shape[1]))) > UNITARY_TOL:
            raise InvalidStateError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self):
        return self.kraus[0].shape[1]

    @property
    def dim_out(self):
        return self.kraus[0].shape[0]


@dataclass(frozen=True, eq=False)
class GentleMeasurement:
    """Two-outcome measurement: append ancillas in |0>, apply ``u``, project.

    ``pi0`` acts on system-then-ancilla qubits; ``pi1 = I - pi0``.
    """

    ancilla_qubits: int
    u: Unitary
    pi0: np.ndarray

    def __post_init__(self):
        pi0 = np.asarray(self.pi0, dtype=np.complex128)
        if pi0.shape != (self.u.dim, self.u.dim):
            raise DimensionError("projector and unitary act on different spaces")
        if np.max(np.abs(pi0 - pi0.conj().T)) > UNITARY_TOL:
            raise InvalidStateError("pi0 is not Hermitian")
        if np.max(np.abs(pi0 @ pi0 - pi0)) > UNITARY_TOL:
            raise InvalidStateError("pi0 is not idempotent")
        object.__setattr__(self, "pi0", pi0)

    @property
    def system_qubits(self):
        return self.u.n - self.ancilla_qubits


# ------------------------------------------------------------------ gates

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


def rotation(theta):
    """Real rotation by ``theta`` counterclockwise: |0> -> cos|0> + sin|1>."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def controlled(mat):
    """Controlled version of ``mat`` with the control as the first qubit."""
    d = mat.shape[0]
    out = np.eye(2 * d, dtype=np.complex128)
    out[d:, d:] = mat
    return out


def kron_all(mats):
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def hadamard_all(n):
    return kron_all([H] * n)


# ------------------------------------------------------------------ constructors

_KET1 = {
    "0": np.array([1, 0], dtype=np.complex128),
    "1": np.array([0, 1], dtype=np.complex128),
    "+": np.array([1, 1], dtype=np.complex128) / np.sqrt(2.0),
    "-": np.array([1, -1], dtype=np.complex128) / np.sqrt(2.0),
}


def ket(label: str) -> PureState:
    """Product state from a string over ``0 1 + -``, qubit 0 first."""
    if not label or any(c not in _KET1 for c in label):
        raise InvalidStateError(f"bad product-state label {label!r}")
    _check_qubits(len(label))
    amps = np.ones(1, dtype=np.complex128)
    for c in label:
        amps = np.kron(amps, _KET1[c])
    return PureState._trusted(len(label), amps)


def random_state(n, rng) -> PureState:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return PureState._trusted(n, v / np.linalg.norm(v))


def random_unitary(dim, rng) -> np.ndarray:
    """Haar-random unitary matrix via QR with the phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(n, rng, rank=None) -> DensityMatrix:
    d = 1 << n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix._trusted(n, m / np.trace(m).real)


def bell_pair() -> PureState:
    return PureState._trusted(2, np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2))


# ------------------------------------------------------------------ linear algebra


def hermitian_eig(mat):
    """Eigendecomposition with eigenvalues in [-EIG_CLIP, 0) clipped to 0."""
    mat = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(mat)
    w = np.where((w < 0) & (w >= -EIG_CLIP), 0.0, w)
    return w, v


def psd_sqrt(mat):
    w, v = hermitian_eig(mat)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# ------------------------------------------------------------------ operations


def tensor(a: PureState, b: PureState) -> PureState:
    n = a.n + b.n
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit dense cap")
    return PureState._trusted(n, np.kron(a.amps, b.amps))


def _check_targets(n, targets):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate target qubit in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise DimensionError(f"target {t} out of range for {n} qubits")
    return targets


def apply_matrix(s: PureState, mat, targets) -> PureState:
    """Apply a unitary matrix without re-validating it (internal hot path)."""
    targets = _check_targets(s.n, targets)
    if mat.shape != (1 << len(targets), 1 << len(targets)):
        raise DimensionError(f"{mat.shape} operator on {len(targets)} targets")
    return PureState._trusted(s.n, kernels.apply_gate(s.amps, s.n, targets, mat))


def apply_unitary(s: PureState, u: Unitary, targets: Sequence[int]) -> PureState:
    """Apply ``u`` to the ordered ``targets``; the first target is u's top qubit."""
    targets = _check_targets(s.n, targets)
    if u.dim != 1 << len(targets):
        raise DimensionError(f"unitary of dim {u.dim} on {len(targets)} targets")
    return PureState._trusted(s.n, kernels.apply_gate(s.amps, s.n, targets, u.mat))


def inner_product(a: PureState, b: PureState) -> complex:
    if a.n != b.n:
        raise DimensionError(f"inner product of {a.n}- and {b.n}-qubit states")
    return complex(np.vdot(a.amps, b.amps))


def to_density(s: PureState) -> DensityMatrix:
    return DensityMatrix._trusted(s.n, np.outer(s.amps, s.amps.conj()))


def mix(parts) -> DensityMatrix:
    """Convex combination of ``(probability, DensityMatrix or PureState)`` pairs."""
    parts = [(float(p), r if isinstance(r, DensityMatrix) else to_density(r)) for p, r in parts]
    if not parts:
        raise InvalidStateError("empty mixture")
    probs = np.array([p for p, _ in parts])
    if probs.min() < 0 or abs(probs.sum() - 1.0) > NORM_TOL:
        raise InvalidStateError(f"mixture weights {probs} are not a distribution")
    n = parts[0][1].n
    if any(r.n != n for _, r in parts):
        raise DimensionError("mixture components have different sizes")
    return DensityMatrix._trusted(n, sum(p * r.mat for p, r in parts))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on ``keep`` (kept qubits stay in increasing order)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise DimensionError("cannot keep an empty set of qubits")
    _check_targets(rho.n, keep)
    n = rho.n
    traced = [q for q in range(n) if q not in keep]
    t = rho.mat.reshape((2,) * (2 * n))
    order = keep + traced
    t = t.transpose(order + [n + q for q in order])
    dk, dt = 1 << len(keep), 1 << len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix._trusted(len(keep), np.einsum("ajbj->ab", t))


def reduced_state(s: PureState, keep) -> DensityMatrix:
    """Partial trace of a pure state without forming the full density matrix."""
    keep = sorted(set(int(k) for k in keep))
    _check_targets(s.n, keep)
    traced = [q for q in range(s.n) if q not in keep]
    psi = s.amps.reshape((2,) * s.n).transpose(keep + traced)
    psi = psi.reshape(1 << len(keep), -1)
    return DensityMatrix._trusted(len(keep), psi @ psi.conj().T)


def measure(s: PureState, targets, rng) -> tuple:
    """Measure ``targets`` in the computational basis, one after another.

    Returns the outcome bits (in target order) and the collapsed state.
    """
    targets = _check_targets(s.n, targets)
    u = rng.random(len(targets))
    bits, amps = kernels.measure_bases(s.amps, s.n, targets, np.zeros(len(targets), dtype=bool), u)
    return tuple(int(b) for b in bits), PureState._trusted(s.n, amps)


def measure_bases(s: PureState, targets, xbasis, rng) -> tuple:
    """Measure each target in Z or, where ``xbasis`` is set, in the X basis."""
    targets = _check_targets(s.n, targets)
    u = rng.random(len(targets))
    bits, amps = kernels.measure_bases(s.amps, s.n, targets, xbasis, u)
    return tuple(int(b) for b in bits), PureState._trusted(s.n, amps)


def measure_function(s: PureState, labels, rng) -> tuple:
    """Measure the value of a classical function computed into a register.

    ``labels[x]`` is the function value on basis state ``x``. Measuring the
    value register and uncomputing it leaves the input register collapsed
    onto the preimage of the observed value.
    """
    labels = np.asarray(labels)
    if labels.shape[0] != s.dim:
        raise DimensionError(f"{labels.shape[0]} labels for {s.dim} basis states")
    probs = s.probabilities()
    values, inverse = np.unique(labels, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    weights = np.bincount(inverse, weights=probs, minlength=len(values))
    k = int(np.searchsorted(np.cumsum(weights), rng.random() * weights.sum(), side="right"))
    k = min(k, len(values) - 1)
    amps = np.where(inverse == k, s.amps, 0.0)
    amps = amps / np.sqrt(weights[k])
    return values[k], PureState._trusted(s.n, amps)


def povm_probabilities(rho: DensityMatrix, p: Povm) -> np.ndarray:
    if p.dim != rho.dim:
        raise DimensionError(f"POVM of dim {p.dim} on a {rho.dim}-dim state")
    probs = np.array([np.trace(e @ rho.mat).real for e in p.elements])
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > UNITARY_TOL:
        raise InvalidStateError(f"POVM probabilities sum to {total!r}")
    return probs / total


def povm_measure(rho: DensityMatrix, p: Povm, rng) -> int:
    probs = povm_probabilities(rho, p)
    k = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    return min(k, len(probs) - 1)


def apply_superoperator(rho: DensityMatrix, s: Superoperator) -> DensityMatrix:
    if s.dim_in != rho.dim:
        raise DimensionError(f"channel input dim {s.dim_in} vs state dim {rho.dim}")
    out = sum(k @ rho.mat @ k.conj().T for k in s.kraus)
    return DensityMatrix._trusted(_log2(s.dim_out), out)


def purify(rho: DensityMatrix) -> PureState:
    """Purification on 2n qubits; tracing out the second half returns rho."""
    w, v = hermitian_eig(rho.mat)
    w = np.clip(w, 0.0, None)
    # sum_i sqrt(p_i) |v_i>|i>
    amps = (v * np.sqrt(w)).reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureState._trusted(2 * rho.n, amps)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.dim != b.dim:
        raise DimensionError(f"trace distance of {a.dim}- and {b.dim}-dim states")
    w, _ = hermitian_eig(a.mat - b.mat)
    return float(min(max(0.5 * np.abs(w).sum(), 0.0), 1.0))


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.dim != b.dim:
        raise DimensionError(f"fidelity of {a.dim}- and {b.dim}-dim states")
    ra = psd_sqrt(a.mat)
    w, _ = hermitian_eig(ra @ b.mat @ ra)
    return float(min(max(np.sqrt(np.clip(w, 0.0, None)).sum(), 0.0), 1.0))


def _gentle_parts(rho, m):
    if m.system_qubits != rho.n:
        raise DimensionError(
            f"measurement acts on {m.system_qubits} system qubits, state has {rho.n}"
        )
    anc = np.zeros((1 << m.ancilla_qubits,) * 2, dtype=np.complex128)
    anc[0, 0] = 1.0
    u = m.u.mat
    omega = u @ np.kron(rho.mat, anc) @ u.conj().T
    pi1 = np.eye(u.shape[0]) - m.pi0
    p0 = float(np.trace(m.pi0 @ omega).real)
    dephased = m.pi0 @ omega @ m.pi0 + pi1 @ omega @ pi1
    back = u.conj().T @ dephased @ u
    full = DensityMatrix._trusted(m.u.n, (back + back.conj().T) / 2)
    return p0, partial_trace(full, range(rho.n)) if m.ancilla_qubits else full


def gentle_measure(rho: DensityMatrix, m: GentleMeasurement) -> tuple:
    """Outcome-0 probability and the state after measuring then undoing ``u``."""
    return _gentle_parts(rho, m)


def sequential_gentle(rho: DensityMatrix, ms, epsilon=None) -> DensityMatrix:
    """Apply the dephase-and-undo maps of ``ms`` in order.

    With ``epsilon`` given, every measurement is first checked against the
    original state; those with ``p0 < 1 - epsilon`` are reported through an
    ``UnionBoundPreconditionWarning``.
    """
    if epsilon is not None:
        for i, m in enumerate(ms):
            p0, _ = _gentle_parts(rho, m)
            if p0 < 1.0 - epsilon - 1e-12:
                warnings.warn(
                    f"measurement {i} has p0={p0:.6g} < 1-epsilon on the input state",
                    UnionBoundPreconditionWarning,
                    stacklevel=2,
                )
    out = rho
    for m in ms:
        _, out = _gentle_parts(out, m)
    return out


def overlap_test(a: PureState, b: PureState, rng) -> str:
    """Hadamard test on (|0>|a> + |1>|b>)/sqrt2; 'plus' w.p. (1 + Re<a|b>)/2."""
    if a.n != b.n:
        raise DimensionError(f"overlap test of {a.n}- and {b.n}-qubit states")
    if a.n + 1 > MAX_QUBITS:
        raise CapacityError("overlap test needs one control qubit beyond the cap")
    amps = np.concatenate([a.amps, b.amps]) / np.sqrt(2.0)
    s = PureState._trusted(a.n + 1, amps)
    s = apply_matrix(s, H, [0])
    (bit,), _ = measure(s, [0], rng)
    return "plus" if bit == 0 else "minus"
