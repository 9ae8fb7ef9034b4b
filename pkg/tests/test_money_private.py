import math

import numpy as np
import pytest

from qmoney import core
from qmoney import money_private as mp
from qmoney.rng import make_rng


def _bank(n, mode=mp.NAIVE, seed=3):
    return mp.WiesnerBank(n, mode, make_rng(seed))


def test_basis_string_text_and_state():
    b = mp.BasisString.from_str("0+-1")
    assert str(b) == "0+-1"
    assert b.xbasis.tolist() == [False, True, True, False]
    assert b.values.tolist() == [0, 0, 1, 1]
    want = core.kron_all([np.eye(2)[:, [0]], np.array([[1], [1]]) / math.sqrt(2),
                          np.array([[1], [-1]]) / math.sqrt(2), np.eye(2)[:, [1]]]).reshape(-1)
    assert np.allclose(b.state().amps, want)
    with pytest.raises(ValueError):
        mp.BasisString.from_str("0x")


def test_banknote_json_round_trip(rng):
    note = mp.Banknote(0xABC, core.random_state(2, rng))
    back = mp.Banknote.from_json(note.to_json())
    assert back.serial == 0xABC and np.allclose(back.state.amps, note.state.amps)


def test_honest_notes_always_pass(rng):
    bank = _bank(6)
    for _ in range(50):
        note = bank.mint()
        ok, after = bank.verify(note, rng)
        assert ok
        assert abs(core.inner_product(note.state, after.state)) > 1 - 1e-12


def test_unknown_serial(rng):
    bank = _bank(2)
    note = bank.mint()
    with pytest.raises(mp.UnknownSerial):
        bank.verify(mp.Banknote(note.serial + 1, note.state), rng)


def test_strict_bank_keeps_rejected_notes(rng):
    bank = _bank(1, mp.STRICT)
    note = bank.mint()
    desc = bank.table[note.serial]
    wrong = mp.BasisString(((desc.choices[0] ^ 1),)).state()
    ok, back = bank.verify(note.with_state(wrong), rng)
    assert not ok and back is None and bank.failures == 1


def test_naive_bank_logs_nothing(rng):
    bank = _bank(1)
    note = bank.mint()
    wrong = mp.BasisString(((bank.table[note.serial].choices[0] ^ 1),)).state()
    ok, back = bank.verify(note.with_state(wrong), rng)
    assert not ok and back is not None and bank.failures == 0


def test_serial_space_exhausted():
    bank = mp.WiesnerBank(1, rng=make_rng(0), serial_bits=1)
    bank.mint(), bank.mint()
    with pytest.raises(mp.SerialSpaceExhausted):
        bank.mint()


def _naive_value_oracle():
    # Independent: measure |theta> in Z, both copies |b> pass w.p. |<theta|b>|^4.
    kets = [np.array([1, 0]), np.array([0, 1]), np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)]
    return np.mean([sum(abs(k[b]) ** 2 * abs(k[b]) ** 4 for b in range(2)) for k in kets])


def test_naive_value_oracle_is_five_eighths():
    assert math.isclose(_naive_value_oracle(), 5 / 8)


def test_naive_counterfeit_rate_per_note(rng):
    bank = _bank(1)
    hits = 0
    for _ in range(3000):
        a, b = mp.naive_counterfeit(bank.mint(), rng)
        hits += mp.count(bank, [a, b], rng) == 2
    assert abs(hits / 3000 - 5 / 8) < 4 * math.sqrt(0.25 / 3000)


def test_count_threads_shared_state(rng):
    # A Bell pair split into two notes: verification of one collapses the other.
    bank = _bank(1)
    note = bank.mint()
    bank.table[note.serial] = mp.BasisString((0,))
    bell = core.bell_pair()
    a = mp.Banknote(note.serial, bell, (0,))
    b = mp.Banknote(note.serial, bell, (1,))
    results = {mp.count(bank, [a, b], rng) for _ in range(100)}
    assert results == {0, 2}


def test_bbbw_plugin_equivalence():
    wb = mp.WiesnerBank(4, rng=make_rng(5))
    notes = [wb.mint() for _ in range(40)]
    bb = mp.BbbwBank(4, rng=make_rng(6), prf=mp.TablePrf(dict(wb.table)))
    r1, r2 = make_rng(9), make_rng(9)
    for note in notes:
        a, b = mp.naive_counterfeit(note, r1)
        c, d = mp.naive_counterfeit(note, r2)
        assert mp.count(wb, [a, b], r1) == mp.count(bb, [c, d], r2)


def test_bbbw_prf_deterministic(rng):
    bank = mp.BbbwBank(8, rng=rng)
    note = bank.mint()
    assert bank._description(note.serial) == mp.SeededPrf().eval(bank.key, note.serial, 8)
    assert bank.verify(note, rng)[0]


def test_clone_objective_reference_channels():
    assert math.isclose(mp.clone_objective(mp.constant_channel()), 0.375)
    assert math.isclose(mp.clone_objective(mp.keep_and_mix_channel()), 0.5)


def test_optimize_clone_channel():
    opt = mp.optimize_clone_channel(400)
    psd, tr = opt.channel.residuals()
    assert abs(opt.value - 0.75) < 1e-6
    assert psd < 1e-9 and tr < 1e-9
    assert all(b >= a for a, b in zip(opt.history, opt.history[1:]))


def test_optimize_from_random_start(rng):
    assert abs(mp.optimize_clone_channel(400, rng=rng).value - 0.75) < 1e-4


def test_clone_value_matches_sdp():
    cp = pytest.importorskip("cvxpy")
    j = cp.Variable((8, 8), hermitian=True)
    tr_out = sum(j[np.ix_(range(o, 8, 4), range(o, 8, 4))] for o in range(4))
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(j @ mp._C))), [j >> 0, tr_out == np.eye(2)])
    prob.solve()
    assert abs(prob.value - 0.75) < 1e-5
    assert abs(mp.optimize_clone_channel().value - prob.value) < 1e-5


def test_kraus_round_trip():
    ch = mp.optimize_clone_channel().channel
    back = mp.CloneChannel.from_kraus(ch.kraus())
    assert np.allclose(back.choi, ch.choi, atol=1e-10)


def test_optimal_counterfeit_single_note(rng):
    ch = mp.optimize_clone_channel().channel
    bank = _bank(1)
    hits = 0
    for _ in range(2000):
        a, b = mp.optimal_counterfeit(bank.mint(), ch, rng)
        hits += mp.count(bank, [a, b], rng) == 2
    assert abs(hits / 2000 - 0.75) < 4 * math.sqrt(0.1875 / 2000)


def test_counterfeit_trials_rates(rng):
    counts = mp.counterfeit_trials(2, 20000, rng)
    assert abs(np.mean(counts == 2) - (5 / 8) ** 2) < 4 * math.sqrt(0.4 * 0.6 / 20000)


def test_adaptive_attack_recovers_and_restores(rng):
    bank = _bank(4)
    note = bank.mint()
    bs, back, q = mp.adaptive_attack(bank, note, rng)
    assert bs == bank.table[note.serial]
    assert q <= mp.adaptive_budget(4)
    assert abs(core.inner_product(note.state, back.state)) ** 2 > 1 - 1e-12
    assert bank.failures == 0


def test_adaptive_attack_budget(rng):
    bank = _bank(4)
    with pytest.raises(mp.QueryBudgetExceeded):
        mp.adaptive_attack(bank, bank.mint(), rng, budget=3)


def test_adaptive_attack_needs_naive_bank(rng):
    bank = _bank(2, mp.STRICT)
    with pytest.raises(ValueError):
        mp.adaptive_attack(bank, bank.mint(), rng)


def test_bomb_attack_single_qubit(rng):
    right = caught = 0
    for r in range(60):
        bank = _bank(1, mp.STRICT, seed=100 + r)
        note = bank.mint()
        bs, c, ver = mp.bomb_attack(bank, note, 0.05, rng)
        caught += c
        right += bs == bank.table[note.serial]
        assert c or ver > 0
    assert caught <= 10 and right + caught == 60


def test_seeded_prf_avalanche(rng):
    prf, key = mp.SeededPrf(), mp.PrfKey.random(rng)
    fracs = []
    for _ in range(200):
        serial = int(rng.integers(0, 1 << 32))
        a = prf.eval(key, serial, 64).choices
        b = prf.eval(key, serial ^ (1 << int(rng.integers(0, 32))), 64).choices
        fracs.append(np.mean(np.array(a) != np.array(b)))
    assert np.mean(fracs) >= 0.3


def test_mint_serials_unique_in_small_space():
    # 200 draws from 2^8 serials would repeat almost surely; fresh-serial draw must not
    bank = mp.WiesnerBank(1, rng=make_rng(11), serial_bits=8)
    serials = [bank.mint().serial for _ in range(200)]
    assert len(set(serials)) == 200
