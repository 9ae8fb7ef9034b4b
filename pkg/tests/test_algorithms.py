import math

import numpy as np
import pytest

from qmoney import algorithms as alg
from qmoney import core, f2


def test_oracle_counts_and_text_round_trip():
    o = alg.BooleanOracle.from_function(lambda x: x % 3 == 0, 3, 1)
    assert o(3) == 1 and o(4) == 0 and o.queries == 2
    back = alg.BooleanOracle.from_text(o.to_text())
    assert np.array_equal(back.table, o.table) and back.queries == 0
    with pytest.raises(alg.OracleError):
        alg.BooleanOracle(2, 1, [0, 1, 2, 0])


def test_xor_oracle_is_self_inverse(rng):
    o = alg.BooleanOracle(2, 2, [3, 1, 0, 2])
    s = core.random_state(4, rng)
    t = alg.apply_xor_oracle(alg.apply_xor_oracle(s, o, [0, 1], [2, 3]), o, [0, 1], [2, 3])
    assert np.allclose(t.amps, s.amps)
    assert o.queries == 2


def test_phase_oracle_signs():
    o = alg.BooleanOracle(2, 1, [0, 1, 1, 0])
    s = core.PureState.from_amplitudes([0.5] * 4)
    assert np.allclose(alg.apply_phase_oracle(s, o, [0, 1]).amps, [0.5, -0.5, -0.5, 0.5])


def test_simon_recovers_secret(rng):
    inst = alg.SimonInstance.two_to_one(3, 0b110, rng)
    res = alg.simon_run(inst, rng)
    assert res.secret == 0b110
    assert all(f2.dot(z, 0b110) == 0 for z in res.samples)
    assert res.quantum_queries == res.rounds


def test_simon_one_to_one(rng):
    res = alg.simon_run(alg.SimonInstance.one_to_one(4, rng), rng)
    assert res.secret is None


def test_simon_promise_checked():
    with pytest.raises(alg.OracleError):
        alg.SimonInstance(alg.BooleanOracle(2, 2, [0, 1, 2, 3]), 0b01)


def test_simon_round_cap(rng):
    inst = alg.SimonInstance.two_to_one(4, 0b1010, rng)
    with pytest.raises(alg.SearchFailure):
        alg.simon_run(inst, rng, round_cap=1)


def test_grover_n4_one_iteration_exact():
    for marked in range(4):
        table = np.zeros(4, dtype=np.int64)
        table[marked] = 1
        s = alg.grover_state(alg.BooleanOracle(2, 1, table), 1)
        assert abs(s.probabilities()[marked] - 1) < 1e-9


def test_grover_success_formula():
    for n in range(1, 7):
        N = 1 << n
        for m in (1, 2, 3):
            if m > N:
                continue
            o = alg.BooleanOracle(n, 1, (np.arange(N) < m).astype(np.int64))
            theta = math.asin(math.sqrt(m / N))
            for k in range(4):
                p = alg.grover_state(o, k).probabilities()[:m].sum()
                assert abs(p - math.sin((2 * k + 1) * theta) ** 2) < 1e-9


def test_grover_search_unknown_count(rng):
    table = np.zeros(64, dtype=np.int64)
    table[[5, 40]] = 1
    res = alg.grover_search(alg.BooleanOracle(6, 1, table), rng)
    assert res.found and res.index in (5, 40)


def test_amplitude_amplify_matches_grover():
    o = alg.BooleanOracle(3, 1, [0, 0, 1, 0, 0, 0, 0, 0])
    plus = core.PureState.from_amplitudes(np.full(8, 1 / math.sqrt(8)))
    rw = core.Unitary(np.diag(1 - 2 * o.table.astype(float)))
    rv = alg.reflection(plus)
    out = alg.amplitude_amplify(plus, rv, rw, 2)
    ref = alg.grover_state(o.clone(), 2)
    assert abs(abs(core.inner_product(out, ref)) - 1) < 1e-12


def test_measure_and_restore_returns_close(rng):
    s = core.random_state(3, rng)
    proj = np.diag([1.0, 0, 1, 0, 1, 0, 1, 0])
    outcome, back, iters = alg.measure_and_restore(s, proj, alg.reflection(s), rng)
    assert abs(core.inner_product(s, back)) ** 2 >= 1 - 1e-6
    assert outcome in (0, 1)


def test_prepare_state_recursive(rng):
    for n in (1, 2, 3, 4):
        target = core.random_state(n, rng)
        gates = alg.prepare_state_recursive(target.amps)
        out = alg.run_circuit(core.PureState.basis(0, n), gates)
        assert abs(abs(core.inner_product(out, target)) - 1) < 1e-9
        back = alg.run_circuit(out, alg.inverse(gates))
        assert abs(back.amps[0]) ** 2 > 1 - 1e-9


def test_superpose_orthogonal(rng):
    n = 2
    psi = core.PureState.basis(1, n)
    phi = core.PureState.basis(2, n)
    c_psi = alg.prepare_state_recursive(psi.amps)
    c_phi = alg.prepare_state_recursive(phi.amps)
    a, b = 0.6, 0.8j
    gates = alg.superpose_orthogonal(c_psi, c_phi, a, b, n)
    out = alg.run_circuit(core.PureState.basis(0, n + 1), gates)
    want = np.zeros(8, dtype=complex)
    want[1], want[2] = a, b  # ancilla (qubit 0) back at |0>
    assert abs(abs(np.vdot(want, out.amps)) - 1) < 1e-9


def test_bomb_rounds():
    assert alg.bomb_rounds(0.01) == (158, math.pi / 316)


def test_bomb_explosion_probability_frozen():
    # 1 - cos(pi/316)^(2*158), computed independently
    assert abs(alg.bomb_explosion_probability(0.01) - 0.015495411249) < 1e-9


def test_dud_always_no_bomb(rng):
    exploded, verdicts = alg.ev_bomb_trials("dud", 0.05, 500, rng)
    assert not exploded.any() and np.all(verdicts == 1)


def test_bomb_survivors_say_bomb(rng):
    exploded, verdicts = alg.ev_bomb_trials("bomb", 0.05, 5000, rng)
    assert np.all(verdicts[~exploded] == 0)
    assert np.all(verdicts[exploded] == -1)


def test_ev_bomb_test_single(rng):
    assert alg.ev_bomb_test("dud", 0.05, rng) == ("no bomb", False)


def _perms(n, rng, disjoint):
    perm = rng.permutation(1 << n)
    f = alg.BooleanOracle(n, n + 1, perm)
    g = alg.BooleanOracle(n, n + 1, perm + (1 << n) if disjoint else rng.permutation(perm))
    return f, g


def test_hh_equal_ranges_decodes(rng):
    f, g = _perms(3, rng, False)
    rep = alg.hh_decode_demo(f, g, "equal_ranges")
    assert abs(rep.bell_fidelity - 1) < 1e-9


def test_hh_disjoint_ranges_bound(rng):
    f, g = _perms(2, rng, True)
    rep = alg.hh_decode_demo(f, g, "disjoint_ranges", rng, samples=500)
    assert abs(rep.exact_max_squared - 0.5) < 1e-9
    assert rep.search_max_squared <= 0.5 + 1e-9
    assert rep.coherence_norm < 1e-12


def test_hh_mode_checks(rng):
    f, g = _perms(2, rng, True)
    with pytest.raises(alg.OracleError):
        alg.hh_decode_demo(f, g, "equal_ranges")
