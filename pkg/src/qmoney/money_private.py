"""Private-key quantum money: Wiesner's scheme, BBBW, and the attacks on them.

A banknote is a serial number plus a register of qubits inside a joint
state vector. Keeping the joint vector lets counterfeits be entangled
across notes and lets attackers hang control qubits off a note.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from . import core, kernels
from .core import PureState

Z0, Z1, XPLUS, XMINUS = 0, 1, 2, 3
SYMBOLS = "01+-"

_KETS = np.array(
    [[1, 0], [0, 1], [1, 1], [1, -1]], dtype=np.complex128
) / np.array([1, 1, math.sqrt(2), math.sqrt(2)])[:, None]


class UnknownSerial(KeyError):
    pass


class SerialSpaceExhausted(RuntimeError):
    pass


class QueryBudgetExceeded(RuntimeError):
    pass


# ------------------------------------------------------------------ notes


@dataclass(frozen=True)
class BasisString:
    """Classical description of a note: one BB84 state per qubit."""

    choices: tuple

    def __post_init__(self):
        ch = tuple(int(c) for c in self.choices)
        if any(c not in (0, 1, 2, 3) for c in ch):
            raise ValueError(f"choices must lie in 0..3, got {ch}")
        object.__setattr__(self, "choices", ch)

    @property
    def n(self):
        return len(self.choices)

    @classmethod
    def random(cls, n, rng):
        return cls(tuple(rng.integers(0, 4, n).tolist()))

    @classmethod
    def from_str(cls, text):
        try:
            return cls(tuple(SYMBOLS.index(c) for c in text.strip()))
        except ValueError:
            raise ValueError(f"basis string must use the symbols {SYMBOLS!r}: {text!r}") from None

    def __str__(self):
        return "".join(SYMBOLS[c] for c in self.choices)

    @property
    def xbasis(self):
        return np.array([c >= 2 for c in self.choices], dtype=bool)

    @property
    def values(self):
        """Expected measurement outcome per qubit (0 for |0>, |+>)."""
        return np.array([c & 1 for c in self.choices], dtype=np.int64)

    def state(self) -> PureState:
        return PureState._trusted(self.n, kernels.product_state(_KETS[list(self.choices)]))


@dataclass(frozen=True, eq=False)
class Banknote:
    """Serial plus the qubits ``qubits`` of the joint state ``state``."""

    serial: int
    state: PureState
    qubits: tuple = None

    def __post_init__(self):
        if self.qubits is None:
            qubits = tuple(range(self.state.n))
        else:
            qubits = tuple(int(q) for q in self.qubits)
            core._check_targets(self.state.n, qubits)
        object.__setattr__(self, "qubits", qubits)

    @property
    def n(self):
        return len(self.qubits)

    def with_state(self, state: PureState) -> "Banknote":
        return Banknote(self.serial, state, self.qubits)

    def standalone(self) -> bool:
        return self.qubits == tuple(range(self.state.n))

    def to_json(self) -> str:
        if not self.standalone():
            raise ValueError("only notes that own their whole state vector serialize")
        amps = [[float(a.real), float(a.imag)] for a in self.state.amps]
        return json.dumps({"serial": format(self.serial, "x"), "n": self.n, "amplitudes": amps})

    @classmethod
    def from_json(cls, text: str) -> "Banknote":
        d = json.loads(text)
        amps = np.array([complex(re, im) for re, im in d["amplitudes"]])
        state = PureState(int(d["n"]), amps)
        return cls(int(d["serial"], 16), state)


# ------------------------------------------------------------------ banks

NAIVE = "naive_return"
STRICT = "strict"


@dataclass(eq=False)
class _BankBase:
    n: int
    mode: str = NAIVE
    rng: np.random.Generator = None
    serial_bits: int = 32
    failure_log: dict = field(default_factory=dict)
    verifications: int = 0

    def __post_init__(self):
        if self.mode not in (NAIVE, STRICT):
            raise ValueError(f"mode must be {NAIVE!r} or {STRICT!r}")
        if self.rng is None:
            from .rng import make_rng

            self.rng = make_rng()

    def _description(self, serial) -> BasisString:
        raise NotImplementedError

    def _measure(self, note: Banknote, rng):
        desc = self._description(note.serial)
        if desc.n != note.n:
            return False, note.state
        u = rng.random(note.n)
        got, amps = kernels.measure_bases(note.state.amps, note.state.n, note.qubits, desc.xbasis, u)
        return bool(np.array_equal(got, desc.values)), PureState._trusted(note.state.n, amps)

    def _verify(self, note: Banknote, rng):
        self.verifications += 1
        ok, post = self._measure(note, rng)
        if not ok and self.mode == STRICT:
            self.failure_log[note.serial] = self.failure_log.get(note.serial, 0) + 1
        return ok, post

    def verify(self, note: Banknote, rng):
        """Measure every qubit in its recorded basis.

        Returns ``(accepted, note_after)``. A naive bank hands the measured
        note back either way; a strict bank keeps a rejected note (``None``
        is returned) and logs the failure against its serial.
        """
        ok, post = self._verify(note, rng)
        if not ok and self.mode == STRICT:
            return False, None
        return ok, note.with_state(post)

    def verify_session(self, note: Banknote, targets, mat, rounds: int, rng):
        """Repeated submission with a customer-side unitary before each check.

        The customer applies ``mat`` to qubits ``targets`` of the joint state
        (which may include qubits outside the note), then submits the note;
        this repeats ``rounds`` times or until a check fails. Counts as
        ``rounds_run`` verifications. Returns ``(rounds_run, rejected,
        note_after)``; under the strict mode a rejected note is ``None``.
        """
        desc = self._description(note.serial)
        u = rng.random((rounds, note.n))
        r, rejected, amps = kernels.verify_session(
            note.state.amps, note.state.n, targets, mat, note.qubits, desc.xbasis, desc.values, u
        )
        self.verifications += r
        post = note.with_state(PureState._trusted(note.state.n, amps))
        if rejected and self.mode == STRICT:
            self.failure_log[note.serial] = self.failure_log.get(note.serial, 0) + 1
            return r, True, None
        return r, rejected, post

    @property
    def failures(self):
        return sum(self.failure_log.values())

    def _fresh_serial(self, taken):
        if len(taken) >= 1 << self.serial_bits:
            raise SerialSpaceExhausted(f"all {1 << self.serial_bits} serials are in use")
        while True:
            s = int(self.rng.integers(0, 1 << self.serial_bits, dtype=np.uint64))
            if s not in taken:
                return s


@dataclass(eq=False)
class WiesnerBank(_BankBase):
    """Stores a uniformly random BasisString per serial."""

    table: dict = field(default_factory=dict)

    def _description(self, serial):
        try:
            return self.table[serial]
        except KeyError:
            raise UnknownSerial(serial) from None

    def mint(self) -> Banknote:
        serial = self._fresh_serial(self.table)
        desc = BasisString.random(self.n, self.rng)
        self.table[serial] = desc
        return Banknote(serial, desc.state())


def wiesner_mint(bank: WiesnerBank) -> Banknote:
    return bank.mint()


def wiesner_verify(bank: WiesnerBank, note: Banknote, rng):
    return bank.verify(note, rng)


# ------------------------------------------------------------------ BBBW


@dataclass(frozen=True)
class PrfKey:
    key: int

    def __post_init__(self):
        if not 0 <= self.key < 1 << 128:
            raise ValueError("PRF keys are 128-bit values")

    @classmethod
    def random(cls, rng):
        hi, lo = (int(v) for v in rng.integers(0, 1 << 64, size=2, dtype=np.uint64))
        return cls(hi << 64 | lo)


class PrfContract(Protocol):
    def eval(self, key: PrfKey, serial: int, n: int) -> BasisString: ...


class SeededPrf:
    """Keyed pseudorandom BasisStrings from a seeded PCG64 stream.

    Not a cryptographic PRF: it only stands in for one, so BBBW banks can be
    exercised without a real primitive. Swap in any object with the same
    ``eval`` signature.
    """

    def eval(self, key: PrfKey, serial: int, n: int) -> BasisString:
        words = [(key.key >> (32 * i)) & 0xFFFFFFFF for i in range(4)]
        words += [(serial >> (32 * i)) & 0xFFFFFFFF for i in range(max(1, (serial.bit_length() + 31) // 32))]
        g = np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))
        return BasisString(tuple(g.integers(0, 4, n).tolist()))


@dataclass
class TablePrf:
    """A lookup table posing as a PRF; ignores the key."""

    table: dict

    def eval(self, key, serial, n):
        try:
            return self.table[serial]
        except KeyError:
            raise UnknownSerial(serial) from None


@dataclass(eq=False)
class BbbwBank(_BankBase):
    """Stores only a key; descriptions are recomputed as ``prf.eval(key, serial)``."""

    key: PrfKey = None
    prf: PrfContract = field(default_factory=SeededPrf)
    issued: set = field(default_factory=set)

    def __post_init__(self):
        super().__post_init__()
        if self.key is None:
            self.key = PrfKey.random(self.rng)

    def _description(self, serial):
        return self.prf.eval(self.key, serial, self.n)

    def mint(self, serial=None) -> Banknote:
        if serial is None:
            serial = self._fresh_serial(self.issued)
        self.issued.add(serial)
        return Banknote(serial, self._description(serial).state())


def bbbw_mint(bank: BbbwBank, serial=None) -> Banknote:
    return bank.mint(serial)


def bbbw_verify(bank: BbbwBank, note: Banknote, rng):
    return bank.verify(note, rng)


def count(bank, notes, rng) -> int:
    """Verify ``notes`` in order and return how many pass.

    Notes that live in the same joint state see each other's collapse: the
    state after one verification is the state the next one is checked on.
    """
    current = {}
    accepted = 0
    for note in notes:
        key = id(note.state)
        state = current.get(key, note.state)
        ok, post = bank._verify(note.with_state(state), rng)
        accepted += ok
        current[key] = post
    return accepted


# ------------------------------------------------------------------ counterfeiters


def naive_counterfeit(note: Banknote, rng):
    """Measure every qubit in Z and hand out two copies of the outcome."""
    bits, _ = core.measure(note.state, note.qubits, rng)
    idx = int("".join(map(str, bits)), 2) if bits else 0
    return (
        Banknote(note.serial, PureState.basis(idx, note.n)),
        Banknote(note.serial, PureState.basis(idx, note.n)),
    )


_BB84 = [_KETS[c] for c in range(4)]


def _objective_matrix():
    # C = 1/4 sum_theta conj(|theta><theta|) (x) |theta theta><theta theta|
    c = np.zeros((8, 8), dtype=np.complex128)
    for k in _BB84:
        kk = np.kron(k, k)
        c += np.kron(np.outer(k, k.conj()).conj(), np.outer(kk, kk.conj()))
    return c / 4


_C = _objective_matrix()


def _tr_out(j):
    return np.trace(j.reshape(2, 4, 2, 4), axis1=1, axis2=3)


def _psd_clip(j):
    w, v = np.linalg.eigh((j + j.conj().T) / 2)
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def _affine(j):
    return j - np.kron(_tr_out(j) - np.eye(2), np.eye(4)) / 4


def _feasible(j):
    # Congruence by T^{-1/2} (x) I keeps J PSD and makes Tr_out J = I exactly.
    t = _tr_out(j)
    w, v = np.linalg.eigh((t + t.conj().T) / 2)
    if w.min() <= 1e-14:
        return None
    s = np.kron((v / np.sqrt(w)) @ v.conj().T, np.eye(4))
    j = s @ j @ s.conj().T
    return (j + j.conj().T) / 2


def _project(j, sweeps=200, tol=1e-12):
    """Dykstra alternation between the PSD cone and {Tr_out J = I}."""
    p = np.zeros_like(j)
    q = np.zeros_like(j)
    x = j
    for _ in range(sweeps):
        y = _psd_clip(x + p)
        p = x + p - y
        x_new = _affine(y + q)
        q = y + q - x_new
        if np.abs(x_new - x).max() < tol:
            x = x_new
            break
        x = x_new
    return _feasible(_psd_clip(x))


@dataclass(frozen=True, eq=False)
class CloneChannel:
    """One qubit in, two qubits out, as an 8x8 Choi matrix (input factor first)."""

    choi: np.ndarray

    def residuals(self):
        j = self.choi
        w = np.linalg.eigvalsh((j + j.conj().T) / 2)
        return float(max(-w.min(), 0.0)), float(np.abs(_tr_out(j) - np.eye(2)).max())

    def kraus(self):
        w, v = np.linalg.eigh((self.choi + self.choi.conj().T) / 2)
        ops = []
        for lam, vec in zip(w, v.T):
            if lam > 1e-12:
                # vec[i * 4 + o] = K[o, i] / sqrt(lam)
                ops.append(np.sqrt(lam) * vec.reshape(2, 4).T)
        return ops

    def apply(self, rho):
        return sum(k @ rho @ k.conj().T for k in self.kraus())

    @classmethod
    def from_kraus(cls, ops):
        j = np.zeros((8, 8), dtype=np.complex128)
        for k in ops:
            vec = np.asarray(k, dtype=np.complex128).T.reshape(-1)
            j += np.outer(vec, vec.conj())
        return cls(j)


def clone_objective(j) -> float:
    """Average over the BB84 states of the chance both output qubits pass."""
    j = j.choi if isinstance(j, CloneChannel) else j
    return float(np.trace(j @ _C).real)


def constant_channel(out_index=0) -> CloneChannel:
    """Discards the input and emits the basis state ``out_index`` of two qubits."""
    e = np.zeros((4, 4))
    e[out_index, out_index] = 1
    return CloneChannel(np.kron(np.eye(2), e).astype(np.complex128))


def keep_and_mix_channel() -> CloneChannel:
    """Keeps the input as the first output and appends a maximally mixed qubit."""
    ops = []
    for b in range(2):
        k = np.zeros((4, 2), dtype=np.complex128)
        for i in range(2):
            k[2 * i + b, i] = 1 / math.sqrt(2)
        ops.append(k)
    return CloneChannel.from_kraus(ops)


@dataclass
class CloneOptimization:
    value: float
    channel: CloneChannel
    history: list
    converged: bool


def optimize_clone_channel(iters=400, rng=None, step=1.0, tol=1e-9) -> CloneOptimization:
    """Projected gradient ascent of ``clone_objective`` over Choi matrices.

    The objective is linear, so its gradient is the fixed matrix C. A step
    is kept only if it raises the value; otherwise the step size halves.
    Starts from a random feasible point when ``rng`` is given, else from the
    maximally mixed channel.
    """
    if rng is not None:
        g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        j = _feasible(g @ g.conj().T)
    else:
        j = np.eye(8, dtype=np.complex128) / 4
    val = clone_objective(j)
    history = [val]
    converged = False
    for _ in range(iters):
        cand = _project(j + step * _C)
        cv = clone_objective(cand) if cand is not None else -np.inf
        if cv > val:
            gain = cv - val
            j, val = cand, cv
            history.append(val)
            if gain < tol:
                converged = True
                break
        else:
            step /= 2
            if step < 1e-12:
                converged = True
                break
    return CloneOptimization(val, CloneChannel(j), history, converged)


def optimal_counterfeit(note: Banknote, ch: CloneChannel, rng):
    """Run ``ch`` on every note qubit; the two outputs go to two notes.

    Simulated by Kraus trajectories: each qubit gains a fresh partner, one
    Kraus branch is sampled with its Born weight, and the joint state is
    renormalised. Output notes share that joint state, so correlations
    between them survive.
    """
    ops = ch.kraus()
    # Each Kraus operator K (4x2) as a 4x4 acting on (qubit, fresh |0>).
    mats = []
    for k in ops:
        m = np.zeros((4, 4), dtype=np.complex128)
        m[:, 0], m[:, 2] = k[:, 0], k[:, 1]
        mats.append(m)
    s = note.state
    base = s.n
    amps = np.kron(s.amps, np.eye(1, 1 << note.n, 0, dtype=np.complex128).reshape(-1))
    nq = base + note.n
    core._check_qubits(nq)
    for i, q in enumerate(note.qubits):
        r = rng.random()
        acc = 0.0
        for m in mats:
            out = kernels.apply_gate(amps, nq, [q, base + i], m)
            p = float(np.vdot(out, out).real)
            acc += p
            if r < acc:
                break
        amps = out / math.sqrt(p)
    joint = PureState._trusted(nq, amps)
    return (
        Banknote(note.serial, joint, note.qubits),
        Banknote(note.serial, joint, tuple(range(base, nq))),
    )


# ------------------------------------------------------------------ interactive attacks


def adaptive_budget(n):
    return 64 * n * math.ceil(math.log2(n + 1))


def adaptive_attack(bank, note: Banknote, rng, budget=None):
    """Learn a note's BasisString from a bank that returns notes after checking.

    For qubit i the attacker sets the real qubit aside and submits the note
    with a candidate BB84 state in its place. The true state always passes,
    so every rejection rules its candidate out; submissions cycle through the
    survivors until one remains. The set-aside qubit goes back at the end,
    and because the other qubits are only ever measured in their own basis
    the note comes back unchanged.

    Returns ``(BasisString, restored_note, queries)``.
    """
    if bank.mode != NAIVE:
        raise ValueError("the adaptive attack needs a bank that returns rejected notes")
    budget = adaptive_budget(note.n) if budget is None else budget
    queries = 0
    learned = []
    current = note
    for i, q in enumerate(note.qubits):
        alive = [0, 1, 2, 3]
        while len(alive) > 1:
            for c in list(alive):
                if queries >= budget:
                    raise QueryBudgetExceeded(f"spent {queries} queries at qubit {i}")
                # Park the real qubit in a fresh slot and put the candidate in its place.
                joint = core.tensor(current.state, PureState._trusted(1, _KETS[c].copy()))
                slot = joint.n - 1
                joint = core.apply_matrix(joint, _SWAP, [q, slot])
                ok, back = bank.verify(Banknote(note.serial, joint, current.qubits), rng)
                queries += 1
                # Swap back and drop the (now classical or measured) candidate.
                amps = core.apply_matrix(back.state, _SWAP, [q, slot]).amps
                current = current.with_state(_drop_last(amps, joint.n))
                if not ok:
                    alive.remove(c)
                if len(alive) == 1:
                    break
        learned.append(alive[0])
    return BasisString(tuple(learned)), current, queries


_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)


def _drop_last(amps, nq):
    # The last qubit is unentangled with the rest; read it off and remove it.
    m = amps.reshape(-1, 2)
    col = int(np.argmax(np.linalg.norm(m, axis=0)))
    ref = m[:, col]
    ref = ref / np.linalg.norm(ref)
    return PureState._trusted(nq - 1, ref.copy())


def _reflection_about(c):
    k = _KETS[c]
    return 2 * np.outer(k, k.conj()) - np.eye(2)


def bomb_attack(bank, note: Banknote, epsilon: float, rng):
    """Learn a note from a strict bank with Elitzur-Vaidman style probes.

    Per qubit and candidate theta, a control qubit starts at |0>; each round
    rotates it by the per-round angle, applies the controlled reflection
    ``2|theta><theta| - I`` onto the money qubit, and submits the note. The
    control reaches |1> only when the money qubit is |theta>. Candidates are
    tried in the order +, 0, -, and 1 is inferred when none fires.

    Returns ``(BasisString or None, caught, verifications)``. On a catch the
    bank keeps the note and the remaining positions stay unknown (``None``).
    """
    from .algorithms import bomb_rounds

    if not 0 < epsilon <= 0.05:
        raise ValueError("epsilon must lie in (0, 0.05]")
    rounds, angle = bomb_rounds(epsilon)
    rot = core.rotation(angle)
    start = bank.verifications
    learned = []
    current = note
    for q in current.qubits:
        found = None
        for c in (XPLUS, Z0, XMINUS):
            joint = core.tensor(current.state, PureState.basis(0, 1))
            ctrl = joint.n - 1
            cref = np.kron(np.diag([1.0, 0.0]), np.eye(2)) + np.kron(np.diag([0.0, 1.0]), _reflection_about(c))
            step = cref @ np.kron(rot, np.eye(2))
            _, rejected, back = bank.verify_session(
                Banknote(note.serial, joint, current.qubits), [ctrl, q], step, rounds, rng
            )
            if rejected and back is None:
                return None, True, bank.verifications - start
            (bit,), after = core.measure(back.state, [ctrl], rng)
            current = current.with_state(_drop_last(after.amps, after.n))
            if bit == 1:
                found = c
                break
        learned.append(Z1 if found is None else found)
    return BasisString(tuple(learned)), False, bank.verifications - start


# ------------------------------------------------------------------ batched experiments

from ._backend import njit, requested_backend  # noqa: E402


def _kraus_pads(ch: CloneChannel):
    mats = []
    for k in ch.kraus():
        m = np.zeros((4, 4), dtype=np.complex128)
        m[:, 0], m[:, 2] = k[:, 0], k[:, 1]
        mats.append(m)
    return np.array(mats)


@njit(cache=True)
def _trial_naive_nb(kets, choices, u_cf, u_ver):
    trials, n = choices.shape
    counts = np.zeros(trials, dtype=np.int64)
    qubits = np.arange(n)
    zeros = np.zeros(n, dtype=np.bool_)
    for t in range(trials):
        ks = np.empty((n, 2), dtype=np.complex128)
        xb = np.empty(n, dtype=np.bool_)
        ex = np.empty(n, dtype=np.int64)
        for i in range(n):
            c = choices[t, i]
            ks[i, 0] = kets[c, 0]
            ks[i, 1] = kets[c, 1]
            xb[i] = c >= 2
            ex[i] = c & 1
        psi = kernels._product_nb(ks)
        bits, _ = kernels._measure_bases_nb(psi, n, qubits, zeros, u_cf[t])
        idx = 0
        for i in range(n):
            idx = (idx << 1) | bits[i]
        for copy in range(2):
            note = np.zeros(1 << n, dtype=np.complex128)
            note[idx] = 1.0
            got, _ = kernels._measure_bases_nb(note, n, qubits, xb, u_ver[t, copy])
            ok = True
            for i in range(n):
                if got[i] != ex[i]:
                    ok = False
            if ok:
                counts[t] += 1
    return counts


@njit(cache=True)
def _trial_clone_nb(kets, choices, pads, u_cf, u_ver):
    trials, n = choices.shape
    nq = 2 * n
    counts = np.zeros(trials, dtype=np.int64)
    for t in range(trials):
        ks = np.empty((nq, 2), dtype=np.complex128)
        xb = np.empty(n, dtype=np.bool_)
        ex = np.empty(n, dtype=np.int64)
        for i in range(n):
            c = choices[t, i]
            ks[i, 0] = kets[c, 0]
            ks[i, 1] = kets[c, 1]
            ks[n + i, 0] = 1.0
            ks[n + i, 1] = 0.0
            xb[i] = c >= 2
            ex[i] = c & 1
        psi = kernels._product_nb(ks)
        for i in range(n):
            offs = np.zeros(4, dtype=np.int64)
            a, b = nq - 1 - i, nq - 1 - (n + i)
            offs[1] = 1 << b
            offs[2] = 1 << a
            offs[3] = (1 << a) | (1 << b)
            mask = offs[3]
            acc = 0.0
            for k in range(pads.shape[0]):
                out = kernels._apply_gate_nb(psi, offs, mask, pads[k])
                p = 0.0
                for j in range(out.size):
                    p += out[j].real * out[j].real + out[j].imag * out[j].imag
                acc += p
                if u_cf[t, i] < acc or k == pads.shape[0] - 1:
                    psi = out / np.sqrt(p)
                    break
        for copy in range(2):
            qubits = np.arange(n) + copy * n
            got, psi = kernels._measure_bases_nb(psi, nq, qubits, xb, u_ver[t, copy])
            ok = True
            for i in range(n):
                if got[i] != ex[i]:
                    ok = False
            if ok:
                counts[t] += 1
    return counts


def _trial_naive_np(kets, choices, u_cf, u_ver):
    trials, n = choices.shape
    counts = np.zeros(trials, dtype=np.int64)
    qubits = np.arange(n)
    for t in range(trials):
        c = choices[t]
        psi = kernels._product_np(kets[c])
        bits, _ = kernels._measure_bases_np(psi, n, qubits, np.zeros(n, bool), u_cf[t])
        idx = int("".join(map(str, bits)), 2)
        for copy in range(2):
            note = np.zeros(1 << n, dtype=np.complex128)
            note[idx] = 1.0
            got, _ = kernels._measure_bases_np(note, n, qubits, c >= 2, u_ver[t, copy])
            counts[t] += bool(np.array_equal(got, c & 1))
    return counts


def _trial_clone_np(kets, choices, pads, u_cf, u_ver):
    trials, n = choices.shape
    nq = 2 * n
    counts = np.zeros(trials, dtype=np.int64)
    zero = np.array([1, 0], dtype=np.complex128)
    for t in range(trials):
        c = choices[t]
        psi = kernels._product_np(np.vstack([kets[c], np.tile(zero, (n, 1))]))
        for i in range(n):
            acc = 0.0
            for k, m in enumerate(pads):
                out = kernels._apply_gate_np(psi, nq, [i, n + i], m)
                p = float(np.vdot(out, out).real)
                acc += p
                if u_cf[t, i] < acc or k == len(pads) - 1:
                    psi = out / np.sqrt(p)
                    break
        for copy in range(2):
            got, psi = kernels._measure_bases_np(psi, nq, np.arange(n) + copy * n, c >= 2, u_ver[t, copy])
            counts[t] += bool(np.array_equal(got, c & 1))
    return counts


def counterfeit_trials(n, trials, rng, attack="naive", channel: CloneChannel = None):
    """Mint, counterfeit and verify both copies ``trials`` times.

    Each trial draws a fresh uniform BasisString, runs the attack on the
    resulting note and verifies the two outputs in order on their joint
    state. Returns the number of accepted copies per trial (0, 1 or 2).

    This is the trial-batched form of ``mint`` / ``naive_counterfeit`` or
    ``optimal_counterfeit`` / ``count``, built from the same kernels.
    """
    if attack not in ("naive", "optimal"):
        raise ValueError(f"unknown attack {attack!r}")
    if attack == "optimal" and channel is None:
        raise ValueError("the optimal attack needs a CloneChannel")
    core._check_qubits(2 * n if attack == "optimal" else n)
    choices = rng.integers(0, 4, (trials, n))
    u_cf = rng.random((trials, n))
    u_ver = rng.random((trials, 2, n))
    nb = requested_backend() == "numba"
    if attack == "naive":
        return (_trial_naive_nb if nb else _trial_naive_np)(_KETS, choices, u_cf, u_ver)
    pads = _kraus_pads(channel)
    return (_trial_clone_nb if nb else _trial_clone_np)(_KETS, choices, pads, u_cf, u_ver)
