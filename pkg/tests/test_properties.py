"""Randomised invariants (hypothesis)."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qmoney import core, f2
from qmoney import money_private as mp
from qmoney.rng import make_rng

seeds = st.integers(0, 2**32 - 1)
FAST = settings(max_examples=60, deadline=None)


@FAST
@given(seeds, st.integers(1, 5))
def test_unitaries_preserve_norm(seed, n):
    rng = make_rng(seed)
    s = core.random_state(n, rng)
    k = int(rng.integers(1, n + 1))
    targets = rng.permutation(n)[:k].tolist()
    out = core.apply_matrix(s, core.random_unitary(1 << k, rng), targets)
    assert abs(np.vdot(out.amps, out.amps).real - 1) < 1e-10


@FAST
@given(seeds)
def test_no_signalling(seed):
    rng = make_rng(seed)
    s = core.random_state(3, rng)
    out = core.apply_matrix(s, core.random_unitary(4, rng), [0, 1])
    assert np.allclose(core.reduced_state(s, [2]).mat, core.reduced_state(out, [2]).mat, atol=1e-10)


@FAST
@given(seeds, st.integers(1, 3))
def test_fidelity_trace_distance_sandwich(seed, n):
    rng = make_rng(seed)
    a, b = core.random_density(n, rng), core.random_density(n, rng)
    d, fid = core.trace_distance(a, b), core.fidelity(a, b)
    assert 1 - fid <= d + 1e-9
    assert d <= math.sqrt(max(1 - fid**2, 0)) + 1e-9


@FAST
@given(seeds)
def test_trace_distance_contracts_under_channels(seed):
    rng = make_rng(seed)
    a, b = core.random_density(2, rng), core.random_density(2, rng)
    ch = core.Superoperator(np.split(core.random_unitary(8, rng)[:, :4], 2, axis=0))
    assert core.trace_distance(core.apply_superoperator(a, ch), core.apply_superoperator(b, ch)) <= core.trace_distance(a, b) + 1e-9


@FAST
@given(seeds)
def test_partial_trace_keeps_trace_and_psd(seed):
    rng = make_rng(seed)
    rho = core.random_density(3, rng)
    red = core.partial_trace(rho, [1]).mat
    assert abs(np.trace(red) - 1) < 1e-10
    assert np.linalg.eigvalsh(red).min() > -1e-10


@FAST
@given(seeds, st.integers(1, 8))
def test_dual_dimensions_and_involution(seed, n):
    rng = make_rng(seed)
    s = f2.random_subspace(n, int(rng.integers(0, n + 1)), rng)
    d = f2.dual(s)
    assert s.dim + d.dim == n and f2.dual(d) == s
    for x in s.basis:
        for y in d.basis:
            assert f2.dot(x, y) == 0


@FAST
@given(seeds, st.integers(1, 8))
def test_row_reduce_is_canonical(seed, n):
    rng = make_rng(seed)
    vecs = [int(v) for v in rng.integers(0, 1 << n, size=int(rng.integers(0, 6)))]
    a = f2.row_reduce(vecs, n)
    b = f2.row_reduce(list(rng.permutation(vecs).tolist()) + [vecs[0] ^ vecs[-1]] if vecs else [], n)
    assert a == b


@FAST
@given(seeds, st.integers(1, 6))
def test_honest_wiesner_notes_pass(seed, n):
    rng = make_rng(seed)
    bank = mp.WiesnerBank(n, rng=rng)
    note = bank.mint()
    assert bank.verify(note, rng)[0]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_clone_objective_bounded_on_random_channels(seed):
    rng = make_rng(seed)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    j = mp._feasible(g @ g.conj().T)
    psd, tr = mp.CloneChannel(j).residuals()
    assert psd < 1e-9 and tr < 1e-9
    assert mp.clone_objective(j) <= 0.75 + 1e-9
