"""Oracle algorithms on top of the dense simulator.

Simon's algorithm, Grover search and amplitude amplification, recursive
state preparation, the orthogonal-superposition circuit, the
Elitzur-Vaidman bomb tester and the Harlow-Hayden decoding demo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core, f2, kernels
from ._backend import njit, requested_backend
from .core import H, X, PureState, Unitary


class OracleError(ValueError):
    """Malformed oracle, register overlap or violated promise."""


class SearchFailure(RuntimeError):
    """An iteration or round budget ran out."""


class RestorationStall(RuntimeError):
    """Amplitude amplification could not restore the measured state."""


# ------------------------------------------------------------------ oracles


@dataclass(eq=False)
class BooleanOracle:
    """Truth table ``{0,1}^n_in -> {0,1}^n_out`` with a query counter.

    The counter is mutable, so give every concurrent trial its own
    ``clone()``.
    """

    n_in: int
    n_out: int
    table: np.ndarray
    queries: int = 0

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64).reshape(-1)
        if table.size != 1 << self.n_in:
            raise OracleError(f"table has {table.size} rows, expected {1 << self.n_in}")
        if table.min() < 0 or table.max() >= 1 << self.n_out:
            raise OracleError(f"outputs do not fit in {self.n_out} bits")
        table.setflags(write=False)
        self.table = table

    @classmethod
    def from_function(cls, fn, n_in, n_out):
        return cls(n_in, n_out, np.array([fn(x) for x in range(1 << n_in)]))

    def __call__(self, x: int) -> int:
        """Classical query."""
        self.queries += 1
        return int(self.table[x])

    def clone(self) -> "BooleanOracle":
        return BooleanOracle(self.n_in, self.n_out, self.table, 0)

    def is_injective(self):
        return np.unique(self.table).size == self.table.size

    def marked(self):
        return np.flatnonzero(self.table)

    def to_text(self) -> str:
        return "".join(format(int(v), f"0{self.n_out}b") + "\n" for v in self.table)

    @classmethod
    def from_text(cls, text: str) -> "BooleanOracle":
        """Parse one binary output string per line, input 0 first."""
        rows = [line.strip() for line in text.splitlines() if line.strip()]
        if not rows:
            raise OracleError("empty truth table")
        n_out = len(rows[0])
        if any(len(r) != n_out or set(r) - {"0", "1"} for r in rows):
            raise OracleError("truth table rows must be equal-length 0/1 strings")
        n_in = len(rows).bit_length() - 1
        if 1 << n_in != len(rows):
            raise OracleError(f"{len(rows)} rows is not a power of two")
        return cls(n_in, n_out, np.array([int(r, 2) for r in rows]))


def _register_values(n, qubits):
    """Integer value of ``qubits`` (first = most significant) for every index."""
    idx = np.arange(1 << n, dtype=np.int64)
    val = np.zeros_like(idx)
    for q in qubits:
        val = (val << 1) | ((idx >> (n - 1 - q)) & 1)
    return val


def _check_registers(s, o, in_qubits, out_qubits):
    in_qubits, out_qubits = list(in_qubits), list(out_qubits)
    if set(in_qubits) & set(out_qubits):
        raise OracleError("input and output registers overlap")
    if len(in_qubits) != o.n_in or len(out_qubits) != o.n_out:
        raise OracleError("register widths do not match the oracle")
    core._check_targets(s.n, in_qubits + out_qubits)
    return in_qubits, out_qubits


def apply_xor_oracle(s: PureState, o: BooleanOracle, in_qubits, out_qubits) -> PureState:
    """|x, z, w> -> |x, z xor f(x), w>; counts one query."""
    in_qubits, out_qubits = _check_registers(s, o, in_qubits, out_qubits)
    fx = o.table[_register_values(s.n, in_qubits)]
    flip = np.zeros(1 << s.n, dtype=np.int64)
    for j, q in enumerate(out_qubits):
        bit = (fx >> (o.n_out - 1 - j)) & 1
        flip |= bit << (s.n - 1 - q)
    idx = np.arange(1 << s.n, dtype=np.int64)
    amps = np.empty_like(s.amps)
    amps[idx ^ flip] = s.amps
    o.queries += 1
    return PureState._trusted(s.n, amps)


def apply_phase_oracle(s: PureState, o: BooleanOracle, in_qubits, out_qubits=None) -> PureState:
    """|x, z, w> -> (-1)^(z . f(x)) |x, z, w>; counts one query.

    With no ``out_qubits`` the oracle must be single-bit and the phase is
    ``(-1)^f(x)``.
    """
    if out_qubits is None:
        if o.n_out != 1:
            raise OracleError("phase oracle without a z register needs n_out == 1")
        in_qubits = list(in_qubits)
        if len(in_qubits) != o.n_in:
            raise OracleError("register width does not match the oracle")
        core._check_targets(s.n, in_qubits)
        bits = o.table[_register_values(s.n, in_qubits)] & 1
    else:
        in_qubits, out_qubits = _check_registers(s, o, in_qubits, out_qubits)
        z = _register_values(s.n, out_qubits)
        fx = o.table[_register_values(s.n, in_qubits)]
        bits = np.array([bin(v).count("1") & 1 for v in (z & fx)], dtype=np.int64)
    o.queries += 1
    return PureState._trusted(s.n, np.where(bits == 1, -s.amps, s.amps))


def hadamard_layer(s: PureState, qubits) -> PureState:
    amps = s.amps
    for q in qubits:
        amps = kernels.apply_gate(amps, s.n, [q], H)
    return PureState._trusted(s.n, amps)


# ------------------------------------------------------------------ Simon


@dataclass(eq=False)
class SimonInstance:
    oracle: BooleanOracle
    secret: int | None = None

    def __post_init__(self):
        o = self.oracle
        if o.n_in != o.n_out:
            raise OracleError("Simon oracles map n bits to n bits")
        t = o.table
        if self.secret is None:
            if not o.is_injective():
                raise OracleError("one-to-one promise violated")
            return
        s = int(self.secret)
        if not 0 < s < 1 << o.n_in:
            raise OracleError("secret must be a nonzero n-bit string")
        x = np.arange(t.size)
        if np.any(t != t[x ^ s]) or np.unique(t).size != t.size // 2:
            raise OracleError("two-to-one promise violated for this secret")

    @property
    def n(self):
        return self.oracle.n_in

    @classmethod
    def two_to_one(cls, n, secret, rng):
        labels = rng.permutation(1 << n)
        table = np.empty(1 << n, dtype=np.int64)
        for x in range(1 << n):
            table[x] = labels[min(x, x ^ secret)]
        return cls(BooleanOracle(n, n, table), secret)

    @classmethod
    def one_to_one(cls, n, rng):
        return cls(BooleanOracle(n, n, rng.permutation(1 << n)), None)


@dataclass
class SimonResult:
    secret: int | None
    rounds: int
    samples: list
    quantum_queries: int
    classical_queries: int

    @property
    def one_to_one(self):
        return self.secret is None


def simon_round(inst: SimonInstance, rng) -> int:
    """One quantum round; returns the measured z (s.z = 0 in the two-to-one case)."""
    n = inst.n
    xs, ys = list(range(n)), list(range(n, 2 * n))
    s = PureState.basis(0, 2 * n)
    s = hadamard_layer(s, xs)
    s = apply_xor_oracle(s, inst.oracle, xs, ys)
    _, s = core.measure(s, ys, rng)
    s = hadamard_layer(s, xs)
    bits, _ = core.measure(s, xs, rng)
    return int("".join(map(str, bits)), 2)


def simon_run(inst: SimonInstance, rng, round_cap=None) -> SimonResult:
    """Sample z's until the orthogonal system leaves at most {0, c}.

    A final pair of classical queries f(0) == f(c) separates the two-to-one
    case from the one-to-one case.
    """
    n = inst.n
    if n > 10:
        raise OracleError("Simon simulation is limited to n <= 10")
    round_cap = 50 * n if round_cap is None else round_cap
    before = inst.oracle.queries
    samples = []
    while True:
        if len(samples) >= round_cap:
            raise SearchFailure(
                f"Simon sampling hit the {round_cap}-round cap "
                f"(rank reached {f2.row_reduce(samples, n).dim})"
            )
        samples.append(simon_round(inst, rng))
        sol = f2.solve_orthogonal(samples, n)
        if sol.dim <= 1:
            break
    quantum = inst.oracle.queries - before
    if sol.dim == 0:
        return SimonResult(None, len(samples), samples, quantum, 0)
    c = sol.basis[0]
    same = inst.oracle(0) == inst.oracle(c)
    return SimonResult(c if same else None, len(samples), samples, quantum, 2)


# ------------------------------------------------------------------ Grover


@dataclass
class GroverResult:
    index: int
    found: bool
    iterations: int
    queries: int


def grover_iterations(n_items, n_marked):
    return int(math.floor(math.pi / 4 * math.sqrt(n_items / n_marked)))


def grover_state(o: BooleanOracle, k: int) -> PureState:
    """Uniform superposition after ``k`` oracle-then-diffusion iterations."""
    if o.n_out != 1:
        raise OracleError("Grover needs a single-bit oracle")
    n = o.n_in
    s = PureState._trusted(n, np.full(1 << n, 1 / math.sqrt(1 << n), dtype=np.complex128))
    qs = list(range(n))
    for _ in range(k):
        s = apply_phase_oracle(s, o, qs)
        a = s.amps
        s = PureState._trusted(n, 2 * a.mean() - a)
    return s


def grover_search(o: BooleanOracle, rng, n_marked=None, budget=None) -> GroverResult:
    """Search for x with f(x) = 1.

    With ``n_marked`` known this is one run of ``floor(pi/4 sqrt(N/M))``
    iterations plus a classical check of the answer. Without it the
    exponentially growing random schedule of Boyer, Brassard, Hoyer and Tapp
    is used until ``budget`` iterations (default ``10 sqrt(N)``) are spent.
    """
    n_items = 1 << o.n_in
    before = o.queries
    if n_marked is not None:
        k = grover_iterations(n_items, n_marked)
        s = grover_state(o, k)
        bits, _ = core.measure(s, range(o.n_in), rng)
        x = int("".join(map(str, bits)), 2)
        return GroverResult(x, o(x) == 1, k, o.queries - before)
    budget = int(10 * math.sqrt(n_items)) if budget is None else budget
    m, spent = 1.0, 0
    while spent <= budget:
        k = int(rng.integers(0, max(1, int(math.ceil(m)))))
        s = grover_state(o, k)
        bits, _ = core.measure(s, range(o.n_in), rng)
        x = int("".join(map(str, bits)), 2)
        spent += k
        if o(x) == 1:
            return GroverResult(x, True, spent, o.queries - before)
        m = min(1.2 * m, math.sqrt(n_items))
    return GroverResult(x, False, spent, o.queries - before)


def reflection(v: PureState) -> Unitary:
    """I - 2|v><v|."""
    return Unitary(np.eye(v.dim, dtype=np.complex128) - 2 * np.outer(v.amps, v.amps.conj()))


def amplitude_amplify(start: PureState, reflect_v: Unitary, reflect_w: Unitary, k: int) -> PureState:
    """``k`` rounds of U_v U_w applied to ``start``."""
    if reflect_v.dim != start.dim or reflect_w.dim != start.dim:
        raise core.DimensionError("reflections and state have different dimensions")
    a = start.amps
    for _ in range(k):
        a = reflect_v.mat @ (reflect_w.mat @ a)
    return PureState._trusted(start.n, a / np.linalg.norm(a))


def _phase_step(x, v, w, phi_v, phi_w):
    # (I - (1 - e^{i phi_v})|v><v|)(I - (1 - e^{i phi_w})|w><w|) x
    x = x - (1 - np.exp(1j * phi_w)) * w * np.vdot(w, x)
    return x - (1 - np.exp(1j * phi_v)) * v * np.vdot(v, x)


def _matched_phases(x, v, w, grid=720):
    """Phases for one generalized step sending ``x`` onto ``w``, or None.

    Both reflections act inside span{w, v}. After the w-phase the second
    coordinate must vanish under the v-phase, which fixes
    ``alpha = 1 - e^{i phi_v}`` for each ``phi_w``; a solution exists where
    ``|alpha - 1| = 1``, found by bracketing on a grid and brentq.
    """
    from scipy.optimize import brentq

    e2 = v - w * np.vdot(w, v)
    nrm = np.linalg.norm(e2)
    if nrm < 1e-14:
        return None
    basis = np.stack([w, e2 / nrm])
    x1, x2 = basis.conj() @ x
    v1, v2 = basis.conj() @ v

    def alpha(pw):
        return x2 / (v2 * (np.conj(v1) * np.exp(1j * pw) * x1 + np.conj(v2) * x2))

    def g(pw):
        return np.abs(alpha(pw) - 1) - 1

    phis = np.linspace(-np.pi, np.pi, grid + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = g(phis)
    for k in range(grid):
        a, b = vals[k], vals[k + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b <= 0:
            pw = brentq(g, phis[k], phis[k + 1], xtol=1e-15)
            pv = float(np.angle(1 - alpha(pw)))
            return pv, pw
    return None


def measure_and_restore(s: PureState, projector, reflect_target: Unitary, rng, tol=1e-6):
    """Measure {P, I - P}, then amplitude-amplify back towards the target.

    ``reflect_target`` is ``I - 2|t><t|``. The post-measurement state is
    reflected about via ``P_b|t>``, i.e. "looks like the target and gave
    outcome b". Standard rounds bring the state within one step of ``|t>``
    and a final phase-matched round lands on it.

    The amplification count and the stopping test use the exactly known
    simulated state; this is a simulator privilege, a physical attacker
    would fix the count from the measured outcome statistics instead.

    Returns ``(outcome, restored_state, iterations)``; outcome 0 is ``P``.
    """
    P = np.asarray(projector, dtype=np.complex128)
    if P.shape != (s.dim, s.dim) or reflect_target.dim != s.dim:
        raise core.DimensionError("projector, reflection and state differ in size")
    a = s.amps
    pa = P @ a
    p0 = min(max(float(np.vdot(pa, pa).real), 0.0), 1.0)
    outcome = 0 if rng.random() < p0 else 1
    Pb = P if outcome == 0 else np.eye(s.dim) - P
    psi = Pb @ a
    psi = psi / np.linalg.norm(psi)

    proj_t = (np.eye(s.dim) - reflect_target.mat) / 2
    col = int(np.argmax(np.linalg.norm(proj_t, axis=0)))
    t = proj_t[:, col] / np.linalg.norm(proj_t[:, col])
    v = Pb @ t
    if np.linalg.norm(v) < 1e-12:
        raise RestorationStall("target has no weight on the observed outcome")
    v = v / np.linalg.norm(v)

    def fid(x):
        return abs(np.vdot(a, x)) ** 2

    x, iters = psi, 0
    overlap = min(abs(np.vdot(t, v)), 1.0)
    if fid(x) >= 1 - tol:
        return outcome, PureState._trusted(s.n, x), 0
    theta = math.asin(overlap)
    if theta < 1e-12:
        raise RestorationStall("post-measurement state is orthogonal to the target")
    cap = int(math.ceil(10 / theta))
    k0 = max(int(math.floor((math.pi / (2 * theta) - 1) / 2)), 0)
    while iters < cap:
        for _ in range(k0):
            x = _phase_step(x, v, t, np.pi, np.pi)
            iters += 1
        if fid(x) >= 1 - tol:
            break
        phases = _matched_phases(x, v, t)
        if phases is None:
            # Not yet within one generalized step; take a standard one.
            x = _phase_step(x, v, t, np.pi, np.pi)
        else:
            x = _phase_step(x, v, t, *phases)
        iters += 1
        if fid(x) >= 1 - tol:
            break
        k0 = 0
    else:
        raise RestorationStall(f"fidelity {fid(x):.3g} after {iters} iterations")
    if fid(x) < 1 - tol:
        raise RestorationStall(f"fidelity {fid(x):.3g} after {iters} iterations")
    # Global phase is unobservable; align it with the original for tidy output.
    ph = np.vdot(a, x)
    x = x * (abs(ph) / ph) if abs(ph) > 0 else x
    return outcome, PureState._trusted(s.n, x / np.linalg.norm(x)), iters


# ------------------------------------------------------------------ circuits


@dataclass(frozen=True, eq=False)
class Gate:
    """``mat`` on ``targets``, applied only where ``controls`` read ``control_values``."""

    mat: np.ndarray
    targets: tuple
    controls: tuple = ()
    control_values: tuple = ()

    def dagger(self):
        return Gate(self.mat.conj().T, self.targets, self.controls, self.control_values)

    def shifted(self, k, extra_controls=(), extra_values=()):
        return Gate(
            self.mat,
            tuple(t + k for t in self.targets),
            tuple(extra_controls) + tuple(c + k for c in self.controls),
            tuple(extra_values) + tuple(self.control_values),
        )


@dataclass(frozen=True, eq=False)
class PhaseGate:
    """Diagonal unitary over the whole register (length ``2**n`` phases)."""

    phases: np.ndarray
    controls: tuple = ()
    control_values: tuple = ()

    def dagger(self):
        return PhaseGate(self.phases.conj(), self.controls, self.control_values)

    def shifted(self, k, extra_controls=(), extra_values=()):
        n = int(self.phases.size).bit_length() - 1
        return _ShiftedPhase(self.phases, k, n, tuple(extra_controls), tuple(extra_values))


@dataclass(frozen=True, eq=False)
class _ShiftedPhase:
    phases: np.ndarray
    offset: int
    width: int
    controls: tuple = ()
    control_values: tuple = ()

    def dagger(self):
        return _ShiftedPhase(self.phases.conj(), self.offset, self.width, self.controls, self.control_values)

    def shifted(self, k, extra_controls=(), extra_values=()):
        return _ShiftedPhase(
            self.phases, self.offset + k, self.width,
            tuple(extra_controls) + self.controls, tuple(extra_values) + self.control_values,
        )


def _apply_one(amps, n, g):
    psi = amps.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    for c, v in zip(g.controls, g.control_values):
        idx[c] = int(v)
    free = [q for q in range(n) if q not in g.controls]
    sub = psi[tuple(idx)]
    m = len(free)
    if isinstance(g, (PhaseGate, _ShiftedPhase)):
        offset = 0 if isinstance(g, PhaseGate) else g.offset
        width = n if isinstance(g, PhaseGate) else g.width
        axes = [free.index(q) for q in range(offset, offset + width)]
        ph = g.phases.reshape((2,) * width)
        shape = [1] * m
        perm = np.argsort(axes)
        ph = ph.transpose(perm)
        for a in axes:
            shape[a] = 2
        sub = sub * ph.reshape(shape)
    else:
        axes = [free.index(t) for t in g.targets]
        k = len(axes)
        sub = np.tensordot(g.mat.reshape((2,) * (2 * k)), sub, axes=(list(range(k, 2 * k)), axes))
        sub = np.moveaxis(sub, list(range(k)), axes)
    psi[tuple(idx)] = sub
    return psi.reshape(-1)


def run_circuit(s: PureState, gates) -> PureState:
    amps = s.amps
    for g in gates:
        amps = _apply_one(amps, s.n, g)
    return PureState._trusted(s.n, amps)


def inverse(gates):
    return [g.dagger() for g in reversed(gates)]


def _branch_matrix(a, b):
    # Real reflection sending |0> to a|0> + b|1>; equals X when (a, b) = (0, 1).
    return np.array([[a, b], [b, -a]], dtype=np.complex128)


def prepare_state_recursive(target) -> list:
    """Gates taking |0^n> to ``target`` via conditional branch rotations.

    Level j splits every surviving prefix w into w0 and w1 with weights
    ``beta_w0 / beta_w`` and ``beta_w1 / beta_w`` (beta = square root of the
    prefix probability); a final diagonal pass supplies the phases
    ``alpha_x / |alpha_x|``. Zero-probability branches get no gate.
    """
    if isinstance(target, PureState):
        target = target.amps
    target = np.asarray(target, dtype=np.complex128).reshape(-1)
    n = core._log2(target.size)
    if n > 12:
        raise core.CapacityError("recursive preparation is limited to 12 qubits")
    if abs(np.vdot(target, target).real - 1) > core.NORM_TOL:
        raise core.InvalidStateError("target is not normalized")
    probs = np.abs(target) ** 2
    gates = []
    for j in range(n):
        # beta over prefixes of length j and j + 1
        beta_j = np.sqrt(probs.reshape(1 << j, -1).sum(axis=1))
        beta_next = np.sqrt(probs.reshape(1 << (j + 1), -1).sum(axis=1))
        for w in range(1 << j):
            if beta_j[w] < 1e-15:
                continue
            a, b = beta_next[2 * w] / beta_j[w], beta_next[2 * w + 1] / beta_j[w]
            if abs(b) < 1e-15:
                continue
            ctrl = tuple(range(j))
            vals = tuple((w >> (j - 1 - i)) & 1 for i in range(j))
            gates.append(Gate(_branch_matrix(a, b), (j,), ctrl, vals))
    mags = np.abs(target)
    phases = np.where(mags > 1e-15, target / np.where(mags > 1e-15, mags, 1.0), 1.0)
    if np.max(np.abs(phases - 1)) > 1e-15:
        gates.append(PhaseGate(phases))
    return gates


def superpose_orthogonal(c_psi, c_phi, alpha, beta, n) -> list:
    """Gates on n + 1 qubits mapping |0^(n+1)> to |0>(alpha|psi> + beta|phi>).

    Qubit 0 is the ancilla. The sequence prepares alpha|0>|psi> +
    beta|1>|phi>, undoes the psi circuit, clears the ancilla with an OR of
    the register (the phi branch has no |0^n> component by orthogonality) and
    re-applies the psi circuit.
    """
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-9:
        raise core.InvalidStateError("|alpha|^2 + |beta|^2 must be 1")
    zero = PureState.basis(0, n)
    psi, phi = run_circuit(zero, c_psi), run_circuit(zero, c_phi)
    if abs(core.inner_product(psi, phi)) > 1e-9:
        raise core.InvalidStateError("superpose_orthogonal needs orthogonal inputs")
    prep = np.array([[alpha, -beta.conjugate()], [beta, alpha.conjugate()]], dtype=np.complex128)
    gates = [Gate(prep, (0,))]
    gates += [g.shifted(1, (0,), (0,)) for g in c_psi]
    gates += [g.shifted(1, (0,), (1,)) for g in c_phi]
    gates += [g.shifted(1) for g in inverse(c_psi)]
    # OR flip: X on the ancilla, then undo it when the register is all zero.
    gates.append(Gate(X, (0,)))
    gates.append(Gate(X, (0,), tuple(range(1, n + 1)), (0,) * n))
    gates += [g.shifted(1) for g in c_psi]
    return gates


# ------------------------------------------------------------------ Elitzur-Vaidman


def bomb_rounds(epsilon):
    """Round count ceil(pi / 2 eps) and the per-round angle that sums to pi/2."""
    rounds = int(math.ceil(math.pi / (2 * epsilon) - 1e-12))
    return rounds, math.pi / (2 * rounds)


@njit(cache=True)
def _bomb_nb(angle, rounds, bomb, uniforms):
    trials = uniforms.shape[0]
    exploded = np.zeros(trials, dtype=np.bool_)
    final = np.zeros(trials, dtype=np.int64)
    c, s = np.cos(angle), np.sin(angle)
    for t in range(trials):
        a, b = 1.0, 0.0
        for r in range(rounds):
            a, b = c * a - s * b, s * a + c * b
            if bomb:
                if uniforms[t, r] < b * b:
                    exploded[t] = True
                    break
                a, b = 1.0, 0.0
        if not exploded[t]:
            final[t] = 1 if uniforms[t, rounds] < b * b else 0
    return exploded, final


def _bomb_np(angle, rounds, bomb, uniforms):
    trials = uniforms.shape[0]
    a, b = np.ones(trials), np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    c, s = math.cos(angle), math.sin(angle)
    for r in range(rounds):
        a, b = c * a - s * b, s * a + c * b
        if bomb:
            boom = alive & (uniforms[:, r] < b * b)
            alive &= ~boom
            a, b = np.ones(trials), np.zeros(trials)
    final = np.where(alive & (uniforms[:, rounds] < b * b), 1, 0)
    return ~alive, final


def ev_bomb_trials(package: str, epsilon: float, trials: int, rng, chunk=20000):
    """Run the bomb tester ``trials`` times; returns (exploded, verdicts) arrays.

    Verdict codes: 1 = "no bomb", 0 = "bomb", -1 = exploded.
    """
    if package not in ("bomb", "dud"):
        raise ValueError(f"package must be 'bomb' or 'dud', got {package!r}")
    if not 0 < epsilon <= 0.1:
        raise ValueError("epsilon must lie in (0, 0.1]")
    rounds, angle = bomb_rounds(epsilon)
    bomb = package == "bomb"
    exploded, verdicts = [], []
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        u = rng.random((m, rounds + 1))
        if requested_backend() == "numba":
            e, f = _bomb_nb(angle, rounds, bomb, u)
        else:
            e, f = _bomb_np(angle, rounds, bomb, u)
        exploded.append(e)
        verdicts.append(np.where(e, -1, f))
        done += m
    return np.concatenate(exploded), np.concatenate(verdicts)


def ev_bomb_test(package: str, epsilon: float, rng) -> tuple:
    """One run; returns (verdict, exploded) with verdict in {"bomb", "no bomb", None}."""
    exploded, verdict = ev_bomb_trials(package, epsilon, 1, rng)
    if exploded[0]:
        return None, True
    return ("no bomb" if verdict[0] == 1 else "bomb"), False


def bomb_explosion_probability(epsilon):
    """Exact explosion probability of the tester as implemented."""
    rounds, angle = bomb_rounds(epsilon)
    return 1.0 - math.cos(angle) ** (2 * rounds)


# ------------------------------------------------------------------ Harlow-Hayden


@dataclass
class HHReport:
    mode: str
    n: int
    bell_fidelity: float
    squared_fidelity: float
    exact_max_squared: float | None = None
    search_max_squared: float | None = None
    coherence_norm: float | None = None
    permutation_is_identity: bool | None = None
    extras: dict = field(default_factory=dict)


def hh_state(f: BooleanOracle, g: BooleanOracle) -> PureState:
    """(1/sqrt 2^(n+1)) sum_x |x,0>_R|0>_B|f(x)>_H + |x,1>_R|1>_B|g(x)>_H."""
    n, m = f.n_in, f.n_out
    if g.n_in != n or g.n_out != m:
        raise OracleError("f and g must have the same shape")
    nq = n + 2 + m
    core._check_qubits(nq)
    amps = np.zeros(1 << nq, dtype=np.complex128)
    amp = 1 / math.sqrt(1 << (n + 1))
    for x in range(1 << n):
        for b, h in ((0, int(f.table[x])), (1, int(g.table[x]))):
            # R = (x, b), B = b, H = h
            idx = (((x << 1 | b) << 1 | b) << m) | h
            amps[idx] = amp
    return PureState._trusted(nq, amps)


def _bell_overlap(sigma):
    b = core.bell_pair().amps
    return float(np.vdot(b, sigma @ b).real)


def _random_r_search(rho_rb, dR, samples, rng, batch=256):
    """Best Bell overlap on (R_last, B) over Haar-random unitaries on R."""
    t = rho_rb.reshape(dR, 2, dR, 2)
    bell = core.bell_pair().amps.reshape(2, 2)
    best, done = -1.0, 0
    while done < samples:
        k = min(batch, samples - done)
        z = (rng.normal(size=(k, dR, dR)) + 1j * rng.normal(size=(k, dR, dR))) / math.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=1, axis2=2)
        u = q * (d / np.abs(d))[:, None, :]
        # <Bell| Tr_{R minus last} (U x I) rho (U x I)^dagger |Bell>
        u = u.reshape(k, dR // 2, 2, dR)
        w = np.einsum("karj,rb->kajb", u.conj(), bell)
        w = w.reshape(k, dR // 2, dR * 2)
        m = t.reshape(dR * 2, dR * 2)
        vals = np.einsum("kai,ij,kaj->k", w.conj(), m, w).real
        best = max(best, float(vals.max()))
        done += k
    return best


def hh_decode_demo(f: BooleanOracle, g: BooleanOracle, mode: str, rng=None, samples=10000) -> HHReport:
    """Build the Set-Equality state and try to decode the Bell pair on (R_last, B).

    ``equal_ranges``: apply |x,1> -> |f^-1(g(x)),1> on R and report the
    Bell fidelity. ``disjoint_ranges``: report the best squared Bell
    fidelity any R-side unitary can reach, both exactly (from the spectrum
    of the B-diagonal blocks of rho_RB) and by random unitary search.
    """
    if mode not in ("equal_ranges", "disjoint_ranges"):
        raise ValueError(f"unknown mode {mode!r}")
    if not (f.is_injective() and g.is_injective()):
        raise OracleError("f and g must be injective")
    n, m = f.n_in, f.n_out
    if n > 5:
        raise OracleError("HH demo is limited to n <= 5")
    rf, rg = set(f.table.tolist()), set(g.table.tolist())
    state = hh_state(f, g)
    nq = state.n
    r_last, b_q = n, n + 1
    if mode == "equal_ranges":
        if rf != rg:
            raise OracleError("equal_ranges mode needs Range(f) == Range(g)")
        finv = {int(v): x for x, v in enumerate(f.table)}
        perm_r = np.arange(1 << (n + 1))
        for x in range(1 << n):
            perm_r[(x << 1) | 1] = (finv[int(g.table[x])] << 1) | 1
        identity = bool(np.all(perm_r == np.arange(perm_r.size)))
        idx = np.arange(1 << nq)
        r_val = idx >> (nq - n - 1)
        rest = idx & ((1 << (nq - n - 1)) - 1)
        new_idx = (perm_r[r_val] << (nq - n - 1)) | rest
        amps = np.zeros_like(state.amps)
        amps[new_idx] = state.amps
        decoded = PureState._trusted(nq, amps)
        sigma = core.reduced_state(decoded, [r_last, b_q]).mat
        sq = _bell_overlap(sigma)
        return HHReport(mode, n, math.sqrt(max(sq, 0.0)), sq, permutation_is_identity=identity)

    if rf & rg:
        raise OracleError("disjoint_ranges mode needs disjoint ranges")
    rho_rb = core.reduced_state(state, list(range(n + 2))).mat
    dR = 1 << (n + 1)
    blocks = rho_rb.reshape(dR, 2, dR, 2)
    r00, r11, r01 = blocks[:, 0, :, 0], blocks[:, 1, :, 1], blocks[:, 0, :, 1]
    coherence = float(np.abs(r01).max())
    w = np.linalg.eigvalsh((r00 - r11 + (r00 - r11).conj().T) / 2)
    exact = 0.5 * (np.trace(r11).real + np.sort(w)[::-1][: dR // 2].sum())
    sigma0 = core.reduced_state(state, [r_last, b_q]).mat
    sq0 = _bell_overlap(sigma0)
    search = None
    if rng is not None and samples:
        search = _random_r_search(rho_rb, dR, samples, rng)
    return HHReport(
        mode, n, math.sqrt(max(sq0, 0.0)), sq0,
        exact_max_squared=float(exact), search_max_squared=search, coherence_norm=coherence,
    )
