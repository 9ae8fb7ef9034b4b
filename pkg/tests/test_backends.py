"""numba kernels and their numpy fallbacks agree on identical inputs."""
import numpy as np
import pytest

import qmoney
from qmoney import algorithms, core, kernels, money_private
from qmoney.rng import make_rng


def _both(fn):
    out = {}
    for b in ("numba", "numpy"):
        prev = qmoney.set_backend(b)
        try:
            out[b] = fn()
        finally:
            qmoney.set_backend(prev)
    return out["numba"], out["numpy"]


def test_set_backend_validates():
    with pytest.raises(ValueError):
        qmoney.set_backend("fortran")


def test_apply_gate_parity():
    rng = make_rng(1)
    s = core.random_state(6, rng)
    u = core.random_unitary(8, rng)
    a, b = _both(lambda: kernels.apply_gate(s.amps, 6, [4, 0, 2], u))
    assert np.allclose(a, b, atol=1e-13)


def test_measure_bases_parity():
    rng = make_rng(2)
    s = core.random_state(5, rng)
    xb = rng.random(5) < 0.5
    u = rng.random(5)
    (ga, aa), (gb, ab) = _both(lambda: kernels.measure_bases(s.amps, 5, np.arange(5), xb, u))
    assert np.array_equal(ga, gb) and np.allclose(aa, ab, atol=1e-13)


def test_product_state_parity():
    kets = money_private._KETS[[0, 3, 2, 1]]
    a, b = _both(lambda: kernels.product_state(kets))
    assert np.allclose(a, b)


@pytest.mark.parametrize("attack", ["naive", "optimal"])
def test_counterfeit_trials_parity(attack):
    ch = money_private.optimize_clone_channel().channel if attack == "optimal" else None
    a, b = _both(lambda: money_private.counterfeit_trials(3, 2000, make_rng(4), attack, ch))
    assert np.array_equal(a, b)


def test_bomb_trials_parity():
    a, b = _both(lambda: algorithms.ev_bomb_trials("bomb", 0.02, 3000, make_rng(5)))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_bomb_attack_parity():
    def run():
        bank = money_private.WiesnerBank(2, money_private.STRICT, make_rng(6))
        note = bank.mint()
        bs, caught, v = money_private.bomb_attack(bank, note, 0.05, make_rng(7))
        return str(bs), caught, v

    assert _both(run)[0] == _both(run)[1]


def test_simon_parity():
    def run():
        rng = make_rng(8)
        inst = algorithms.SimonInstance.two_to_one(5, 0b10110, rng)
        return algorithms.simon_run(inst, rng).samples

    a, b = _both(run)
    assert a == b
