"""Hidden-subspace public-key money and its attacks.

A note is ``(d_S, |S>)`` with ``|S>`` the uniform superposition over a
random ``n/2``-dimensional subspace S of GF(2)^n. Anyone holding the
serial can query the membership oracles of S and its dual, which is all
verification needs. The polynomial instantiation replaces those oracles by
degree-3 polynomials vanishing on S (resp. the dual), optionally with a
fraction of random decoys mixed in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Protocol

import numpy as np

from . import algorithms, core, f2
from .algorithms import BooleanOracle
from .core import PureState
from .money_private import Banknote


class UnknownSerial(KeyError):
    pass


class AmbiguousClassification(RuntimeError):
    pass


# ------------------------------------------------------------------ keys and oracles


@dataclass(frozen=True)
class HsKey:
    n: int
    subspace: f2.SubspaceF2
    dual: f2.SubspaceF2
    serial: int

    def __post_init__(self):
        if self.n % 2 or self.subspace.n != self.n or self.subspace.dim != self.n // 2:
            raise ValueError("hidden subspaces have dimension n/2 in GF(2)^n, n even")
        if self.dual != f2.dual(self.subspace):
            raise ValueError("dual does not match the subspace")


def subspace_state(s: f2.SubspaceF2) -> PureState:
    amps = np.zeros(1 << s.n, dtype=np.complex128)
    amps[s.elements()] = 1.0 / math.sqrt(1 << s.dim)
    return PureState._trusted(s.n, amps)


def hs_keygen(n: int, rng, oracle: "HsOracle" = None) -> HsKey:
    """Random key; registered with ``oracle`` when one is given."""
    if n % 2 or not 2 <= n <= 16:
        raise core.CapacityError("hidden-subspace keys need even n in [2, 16]")
    s = f2.random_subspace(n, n // 2, rng)
    key = HsKey(n, s, f2.dual(s), int(rng.integers(0, 1 << 63)))
    if oracle is not None:
        oracle.register(key)
    return key


def hs_mint(key: HsKey) -> Banknote:
    return Banknote(key.serial, subspace_state(key.subspace))


@dataclass(eq=False)
class HsOracle:
    """Serial -> (chi_S, chi_dual), each a counting BooleanOracle.

    The registry stands in for the obfuscated description d_S: holding a
    serial gives membership queries and nothing else.
    """

    registry: dict = field(default_factory=dict)

    def register(self, key: HsKey):
        n = key.n
        self.registry[key.serial] = (
            BooleanOracle(n, 1, key.subspace.indicator().astype(np.int64)),
            BooleanOracle(n, 1, key.dual.indicator().astype(np.int64)),
        )
        return key.serial

    def _get(self, serial):
        try:
            return self.registry[serial]
        except KeyError:
            raise UnknownSerial(serial) from None

    def chi_s(self, serial) -> BooleanOracle:
        return self._get(serial)[0]

    def chi_dual(self, serial) -> BooleanOracle:
        return self._get(serial)[1]


def _membership_projection(amps, n, qubits, table):
    vals = algorithms._register_values(n, qubits)
    return np.where(table[vals] == 1, amps, 0.0)


def _hadamard(amps, n, qubits):
    return algorithms.hadamard_layer(PureState._trusted(n, amps), qubits).amps


def hs_accept_branch(oracle: HsOracle, serial, state: PureState, qubits=None):
    """Unnormalised accepting branch H P_dual H P_S |state> (one query each)."""
    chi, chi_d = oracle._get(serial)
    qubits = list(range(state.n)) if qubits is None else list(qubits)
    if len(qubits) != chi.n_in:
        raise core.DimensionError(f"{len(qubits)} qubits for an n={chi.n_in} key")
    a = _membership_projection(state.amps, state.n, qubits, chi.table)
    chi.queries += 1
    a = _hadamard(a, state.n, qubits)
    a = _membership_projection(a, state.n, qubits, chi_d.table)
    chi_d.queries += 1
    return _hadamard(a, state.n, qubits)


def hs_acceptance_probability(oracle: HsOracle, serial, state: PureState, qubits=None) -> float:
    b = hs_accept_branch(oracle, serial, state, qubits)
    return float(np.vdot(b, b).real)


def hs_verify(oracle: HsOracle, serial, state: PureState, rng, qubits=None):
    """Check chi_S, Hadamard, check chi_dual, Hadamard.

    Both checks are measurements; the note passes when both read 1.
    Exactly one query to each oracle is made whatever the outcome. Returns
    ``(accepted, post_state)``.
    """
    chi, chi_d = oracle._get(serial)
    qubits = list(range(state.n)) if qubits is None else list(qubits)
    if len(qubits) != chi.n_in:
        raise core.DimensionError(f"{len(qubits)} qubits for an n={chi.n_in} key")
    n = state.n
    ok = True
    a = state.amps
    for o, frame in ((chi, False), (chi_d, True)):
        if frame:
            a = _hadamard(a, n, qubits)
        labels = o.table[algorithms._register_values(n, qubits)]
        o.queries += 1
        val, post = core.measure_function(PureState._trusted(n, a), labels, rng)
        ok &= int(val) == 1
        a = post.amps
        if frame:
            a = _hadamard(a, n, qubits)
    return ok, PureState._trusted(n, a)


# ------------------------------------------------------------------ Grover forger


@dataclass
class GroverForgeResult:
    note: Banknote
    queries: int
    searches: int
    search_queries: list


def grover_forge(oracle: HsOracle, serial, rng, max_searches=None) -> GroverForgeResult:
    """Forge a note from the membership oracle alone.

    Each round Grover-searches for an element of S outside the span found
    so far (one chi_S query per oracle call, the span test being classical)
    with the exact marked count ``2^(n/2) - 2^j``, checks the answer with one
    more query, and stops once ``n/2`` independent elements are known.
    """
    chi = oracle.chi_s(serial)
    n = chi.n_in
    d = n // 2
    max_searches = 20 * n if max_searches is None else max_searches
    start = chi.queries
    found = f2.row_reduce([], n)
    per_search = []
    while found.dim < d:
        if len(per_search) >= max_searches:
            raise algorithms.SearchFailure(f"basis incomplete after {max_searches} searches")
        outside = chi.table.astype(bool) & ~found.indicator()
        derived = BooleanOracle(n, 1, outside.astype(np.int64))
        res = algorithms.grover_search(derived, rng, n_marked=(1 << d) - (1 << found.dim))
        chi.queries += derived.queries
        per_search.append(derived.queries)
        if res.found:
            found = f2.row_reduce(list(found.basis) + [res.index], n)
    note = Banknote(serial, subspace_state(found))
    return GroverForgeResult(note, chi.queries - start, len(per_search), per_search)


# ------------------------------------------------------------------ polynomials


@dataclass(frozen=True)
class Poly3F2:
    """Polynomial over GF(2) with monomials of degree at most 3.

    Each monomial is a frozenset of variable indices; the empty set is the
    constant 1. Variable ``i`` is coordinate ``i`` (bit ``n - 1 - i``).
    """

    n: int
    monomials: frozenset

    def __post_init__(self):
        mons = frozenset(frozenset(int(v) for v in m) for m in self.monomials)
        for m in mons:
            if len(m) > 3 or any(not 0 <= v < self.n for v in m):
                raise ValueError(f"bad monomial {sorted(m)} for n={self.n}")
        object.__setattr__(self, "monomials", mons)

    @property
    def degree(self):
        return max((len(m) for m in self.monomials), default=0)

    def __call__(self, x: int) -> int:
        total = 0
        for m in self.monomials:
            total ^= all((x >> (self.n - 1 - v)) & 1 for v in m)
        return total

    def evaluate_all(self) -> np.ndarray:
        idx = np.arange(1 << self.n, dtype=np.int64)
        cols = [(idx >> (self.n - 1 - v)) & 1 for v in range(self.n)]
        out = np.zeros(1 << self.n, dtype=np.int64)
        for m in self.monomials:
            term = np.ones_like(idx)
            for v in m:
                term &= cols[v]
            out ^= term
        return out

    def __str__(self):
        if not self.monomials:
            return "0"
        parts = sorted(tuple(sorted(m)) for m in self.monomials)
        parts.sort(key=lambda t: (len(t), t))
        return "+".join("*".join(map(str, t)) if t else "1" for t in parts)

    @classmethod
    def from_str(cls, text: str, n: int) -> "Poly3F2":
        text = text.strip()
        mons = set()
        if text and text != "0":
            for part in text.split("+"):
                part = part.strip()
                m = frozenset() if part == "1" else frozenset(int(v) for v in part.split("*"))
                mons ^= {m}
        return cls(n, frozenset(mons))

    def compose(self, rows) -> "Poly3F2":
        """p(Lx) where ``rows[j]`` is the bitmask of coordinates in (Lx)_j."""
        out = set()
        for m in self.monomials:
            terms = {frozenset()}
            for j in m:
                lin = [frozenset([i]) for i in range(self.n) if (rows[j] >> (self.n - 1 - i)) & 1]
                nxt = set()
                for t in terms:
                    for l in lin:
                        nxt ^= {t | l}
                terms = nxt
            out ^= terms
        return Poly3F2(self.n, frozenset(out))


def _all_monomials(n, allowed=None):
    mons = [frozenset()]
    for d in (1, 2, 3):
        mons += [frozenset(c) for c in combinations(range(n), d)]
    if allowed is not None:
        mons = [m for m in mons if m & allowed]
    return mons


def random_poly(n, rng, allowed=None) -> Poly3F2:
    """Each permitted monomial present with probability 1/2."""
    mons = _all_monomials(n, allowed)
    keep = rng.random(len(mons)) < 0.5
    return Poly3F2(n, frozenset(m for m, k in zip(mons, keep) if k))


def _row_form(cols, n):
    # Row j of the matrix whose i-th column is cols[i], as a coordinate bitmask.
    rows = []
    for j in range(n):
        r = 0
        for i, c in enumerate(cols):
            if (c >> (n - 1 - j)) & 1:
                r |= 1 << (n - 1 - i)
        rows.append(r)
    return rows


def vanishing_polys(s: f2.SubspaceF2, count, rng) -> list:
    """Random degree-3 polynomials vanishing on ``s``.

    Sampled on the canonical subspace spanned by the first ``dim`` unit
    vectors (every monomial touches a later coordinate) and pulled back
    along a linear map carrying ``s`` onto it.
    """
    n = s.n
    to_s = f2.complete_basis(s)
    to_canon = _row_form(f2.invert(to_s, n), n)
    later = frozenset(range(s.dim, n))
    return [random_poly(n, rng, later).compose(to_canon) for _ in range(count)]


def common_zeros(polys, n) -> np.ndarray:
    mask = np.ones(1 << n, dtype=bool)
    for p in polys:
        mask &= p.evaluate_all() == 0
    return mask


@dataclass
class PolyInstance:
    n: int
    ps: list
    qs: list
    noisy_p: frozenset = frozenset()
    noisy_q: frozenset = frozenset()

    def to_text(self):
        return "\n".join(map(str, self.ps)) + "\n\n" + "\n".join(map(str, self.qs)) + "\n"


def polys_generate(key: HsKey, m: int, noise_rate: float, rng) -> PolyInstance:
    """``m`` p's for S and ``m`` q's for the dual, ``floor(noise_rate m)`` of each random.

    Genuine families are redrawn until their common zero set is exactly the
    target subspace; each decoy is redrawn until it vanishes on between a
    quarter and three quarters of that subspace.
    """
    n = key.n
    if m < n:
        raise ValueError(f"m={m} is too small to pin down S (need m >= n={n})")
    if not 0 <= noise_rate < 0.5:
        raise ValueError("noise_rate must lie in [0, 0.5)")
    n_noisy = int(math.floor(noise_rate * m))

    def family(sub):
        target = sub.indicator()
        while True:
            good = vanishing_polys(sub, m - n_noisy, rng)
            if np.array_equal(common_zeros(good, n), target):
                break
        noisy = []
        while len(noisy) < n_noisy:
            p = random_poly(n, rng)
            frac = np.mean(p.evaluate_all()[target] == 0)
            if 0.25 <= frac <= 0.75:
                noisy.append(p)
        slots = rng.permutation(m)
        out = [None] * m
        for i, p in zip(slots[:n_noisy], noisy):
            out[i] = p
        for i, p in zip(slots[n_noisy:], good):
            out[i] = p
        return out, frozenset(int(i) for i in slots[:n_noisy])

    ps, noisy_p = family(key.subspace)
    qs, noisy_q = family(key.dual)
    return PolyInstance(n, ps, qs, noisy_p, noisy_q)


# ------------------------------------------------------------------ security reduction


def simulator_cloner(state: PureState, copies: int) -> list:
    """Scaffolding for the reduction: returns exact copies of the input.

    No physical process does this. It stands in for the hypothetical
    counterfeiter whose existence the reduction assumes.
    """
    return [state] * copies


@dataclass
class SecReductionResult:
    successes: int
    trials: int
    bases: list

    @property
    def rate(self):
        return self.successes / self.trials


def sec_reduction_forge(inst: PolyInstance, cloner: Callable, rng, trials=1) -> SecReductionResult:
    """Find S from the public polynomials plus a cloner.

    Prepare the uniform superposition, measure the values of all p's and
    keep runs where every value is 0, which leaves exactly ``|S>``. The
    cloner turns it into ``2n`` copies, each is measured, and the outcomes
    are row-reduced.
    """
    if inst.noisy_p or inst.noisy_q:
        raise ValueError("the reduction needs a noiseless instance")
    if cloner is None:
        raise ValueError("no cloner supplied")
    n = inst.n
    labels = np.stack([p.evaluate_all() for p in inst.ps], axis=1)
    plus = PureState._trusted(n, np.full(1 << n, 1 / math.sqrt(1 << n), dtype=np.complex128))
    successes, bases = 0, []
    for _ in range(trials):
        val, post = core.measure_function(plus, labels, rng)
        if np.any(val):
            continue
        successes += 1
        samples = []
        for copy in cloner(post, 2 * n):
            bits, _ = core.measure(copy, range(n), rng)
            samples.append(int("".join(map(str, bits)), 2))
        bases.append(f2.row_reduce(samples, n))
    return SecReductionResult(successes, trials, bases)


# ------------------------------------------------------------------ noisy attack


@dataclass
class NoisyAttackResult:
    genuine_p: list
    genuine_q: list
    basis: f2.SubspaceF2 | None
    restore_iterations: int
    min_fidelity: float


def _majority(polys, active, n):
    if not active:
        return np.ones(1 << n, dtype=bool)
    zeros = np.stack([polys[i].evaluate_all() == 0 for i in active])
    return zeros.sum(axis=0) * 2 > len(active)


def _fixed_projector(pass_s, pass_d, n):
    """Projector onto the states the majority-vote check leaves unchanged.

    The check is the membership filter for S, Hadamard, the filter for the
    dual, Hadamard. With exact filters its fixed space is spanned by |S>
    alone; decoys that slip through a vote can enlarge it.
    """
    hn = core.hadamard_all(n)
    ps, pd = np.diag(pass_s.astype(float)), np.diag(pass_d.astype(float))
    op = ps @ hn @ pd @ hn @ ps
    w, v = np.linalg.eigh((op + op.T) / 2)
    fixed = v[:, w > 1 - 1e-9]
    return fixed @ fixed.conj().T


def _target_reflection(proj, state: PureState):
    """I - 2|t><t| with t the component of ``state`` inside the fixed space."""
    t = proj @ state.amps
    weight = float(np.vdot(t, t).real)
    if weight < 0.5:
        raise AmbiguousClassification(f"note keeps only {weight:.3g} of its weight in the fixed space")
    t = t / math.sqrt(weight)
    return algorithms.Unitary(np.eye(t.size) - 2 * np.outer(t, t.conj()))


def noisy_poly_attack(inst: PolyInstance, note: Banknote, rng, rounds=25, truth: PureState = None) -> NoisyAttackResult:
    """Sort genuine from random polynomials using a single note.

    Every polynomial is evaluated on the note ``rounds`` times (the q's in
    the Hadamard frame). After each measurement the note is pulled back
    with ``measure_and_restore``, reflecting about the state fixed by the
    strict-majority membership of the polynomials not yet ruled out (the
    target is the note's own component in that check's fixed space). A
    polynomial that ever reads 1 is random; one that always reads 0 is
    kept. S is then the common zero set of the kept p's.

    ``truth`` (the legitimate state) is only used to report the lowest
    fidelity seen across restorations.
    """
    n = inst.n
    if not note.standalone() or note.n != n:
        raise ValueError("the attack needs a standalone n-qubit note")
    state = note.state
    hn = core.hadamard_all(n)
    vals_p = [p.evaluate_all() for p in inst.ps]
    vals_q = [q.evaluate_all() for q in inst.qs]
    alive_p, alive_q = set(range(len(inst.ps))), set(range(len(inst.qs)))
    iterations = 0
    min_fid = 1.0

    cache = {}

    def reflect(current):
        key = (frozenset(alive_p), frozenset(alive_q))
        if key not in cache:
            cache[key] = _fixed_projector(
                _majority(inst.ps, sorted(alive_p), n), _majority(inst.qs, sorted(alive_q), n), n
            )
        return _target_reflection(cache[key], current)

    for family, vals, alive, frame in (("p", vals_p, alive_p, False), ("q", vals_q, alive_q, True)):
        for i in range(len(vals)):
            zero = np.diag((vals[i] == 0).astype(float))
            proj = hn @ zero @ hn if frame else zero
            for _ in range(rounds):
                outcome, state, its = algorithms.measure_and_restore(state, proj, reflect(state), rng)
                iterations += its
                if truth is not None:
                    min_fid = min(min_fid, abs(core.inner_product(truth, state)) ** 2)
                if outcome == 1:
                    alive.discard(i)
                    break
    keep_p = sorted(alive_p)
    zeros = common_zeros([inst.ps[i] for i in keep_p], n)
    pts = np.flatnonzero(zeros)
    basis = f2.row_reduce([int(x) for x in pts], n)
    if basis.dim != n // 2 or (1 << basis.dim) != pts.size:
        basis = None
    return NoisyAttackResult(keep_p, sorted(alive_q), basis, iterations, min_fid)


# ------------------------------------------------------------------ full scheme


class Signer(Protocol):
    def sign(self, message: bytes) -> bytes: ...

    def verify(self, message: bytes, signature: bytes) -> bool: ...


class Ed25519Signer:
    """Ed25519 from ``cryptography``; verification needs only the public half."""

    def __init__(self, private_key=None, public_key=None):
        from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

        if private_key is None and public_key is None:
            private_key = Ed25519PrivateKey.generate()
        self._sk = private_key
        self._pk = public_key if public_key is not None else private_key.public_key()

    @classmethod
    def from_seed(cls, seed: bytes):
        from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

        return cls(Ed25519PrivateKey.from_private_bytes(seed))

    def public(self) -> "Ed25519Signer":
        return Ed25519Signer(public_key=self._pk)

    def sign(self, message: bytes) -> bytes:
        if self._sk is None:
            raise PermissionError("this signer holds only a public key")
        return self._sk.sign(message)

    def verify(self, message: bytes, signature: bytes) -> bool:
        from cryptography.exceptions import InvalidSignature

        try:
            self._pk.verify(signature, message)
            return True
        except InvalidSignature:
            return False


def _serial_bytes(serial: int) -> bytes:
    return int(serial).to_bytes(8, "big")


@dataclass(frozen=True, eq=False)
class SignedNote:
    serial: int
    signature: bytes
    note: Banknote


def full_scheme_mint(signer: Signer, key: HsKey) -> SignedNote:
    return SignedNote(key.serial, signer.sign(_serial_bytes(key.serial)), hs_mint(key))


def full_scheme_verify(signer: Signer, oracle: HsOracle, signed: SignedNote, rng):
    """Signature first; only a valid signature lets the quantum check run.

    Returns ``(accepted, note_after)``; a bad signature hands the note back
    untouched.
    """
    if not signer.verify(_serial_bytes(signed.serial), signed.signature):
        return False, signed.note
    ok, post = hs_verify(oracle, signed.serial, signed.note.state, rng, signed.note.qubits)
    return ok, signed.note.with_state(post)
