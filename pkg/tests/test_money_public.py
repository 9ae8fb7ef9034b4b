import math

import numpy as np
import pytest

from qmoney import core, f2
from qmoney import money_public as mpub
from qmoney.money_private import Banknote


def _setup(n, rng):
    oracle = mpub.HsOracle()
    return oracle, mpub.hs_keygen(n, rng, oracle)


def test_keygen_limits(rng):
    with pytest.raises(core.CapacityError):
        mpub.hs_keygen(3, rng)
    with pytest.raises(core.CapacityError):
        mpub.hs_keygen(18, rng)


def test_subspace_state_uniform(rng):
    _, key = _setup(4, rng)
    amps = mpub.hs_mint(key).state.amps
    assert np.allclose(amps[key.subspace.indicator()], 0.5)
    assert np.allclose(amps[~key.subspace.indicator()], 0)


def test_hadamard_maps_s_to_dual(rng):
    _, key = _setup(6, rng)
    h = core.hadamard_all(6) @ mpub.subspace_state(key.subspace).amps
    assert np.allclose(h, mpub.subspace_state(key.dual).amps)


def test_legit_note_accepted(rng):
    oracle, key = _setup(6, rng)
    note = mpub.hs_mint(key)
    assert abs(mpub.hs_acceptance_probability(oracle, key.serial, note.state) - 1) < 1e-9
    ok, post = mpub.hs_verify(oracle, key.serial, note.state, rng)
    assert ok and abs(core.inner_product(post, note.state)) > 1 - 1e-12
    assert oracle.chi_s(key.serial).queries == 2 and oracle.chi_dual(key.serial).queries == 2


def test_accepting_operator_is_projector_onto_s(rng):
    oracle, key = _setup(4, rng)
    sv = mpub.subspace_state(key.subspace).amps
    for _ in range(20):
        psi = core.random_state(4, rng)
        p = mpub.hs_acceptance_probability(oracle, key.serial, psi)
        assert abs(p - abs(np.vdot(sv, psi.amps)) ** 2) < 1e-9


def test_random_t_acceptance(rng):
    oracle, key = _setup(6, rng)
    for _ in range(20):
        t = f2.random_subspace(6, 3, rng)
        p = mpub.hs_acceptance_probability(oracle, key.serial, mpub.subspace_state(t))
        inter = np.count_nonzero(key.subspace.indicator() & t.indicator())
        assert abs(p - inter**2 / 64) < 1e-9


def test_hs_verify_statistics(rng):
    oracle, key = _setup(4, rng)
    t = f2.random_subspace(4, 2, rng)
    while t == key.subspace:
        t = f2.random_subspace(4, 2, rng)
    p = mpub.hs_acceptance_probability(oracle, key.serial, mpub.subspace_state(t))
    hits = sum(mpub.hs_verify(oracle, key.serial, mpub.subspace_state(t), rng)[0] for _ in range(2000))
    assert abs(hits / 2000 - p) < 4 * math.sqrt(max(p * (1 - p), 1e-3) / 2000)


def test_unknown_serial(rng):
    oracle, key = _setup(2, rng)
    with pytest.raises(mpub.UnknownSerial):
        mpub.hs_verify(oracle, key.serial + 1, mpub.hs_mint(key).state, rng)


def test_grover_forge_passes(rng):
    oracle, key = _setup(6, rng)
    res = mpub.grover_forge(oracle, key.serial, rng)
    assert abs(mpub.hs_acceptance_probability(oracle, key.serial, res.note.state) - 1) < 1e-9
    assert res.queries == sum(res.search_queries)


def test_poly_text_round_trip(rng):
    p = mpub.random_poly(5, rng)
    assert mpub.Poly3F2.from_str(str(p), 5) == p
    assert p.degree <= 3
    assert all(p(x) == v for x, v in enumerate(p.evaluate_all()))


def test_compose_matches_evaluation(rng):
    p = mpub.random_poly(4, rng)
    rows = [int(rng.integers(0, 16)) for _ in range(4)]
    q = p.compose(rows)
    for x in range(16):
        lx = 0
        for j, r in enumerate(rows):
            lx |= (bin(r & x).count("1") & 1) << (3 - j)
        assert q(x) == p(lx)


def test_vanishing_polys_vanish(rng):
    s = f2.random_subspace(6, 3, rng)
    for p in mpub.vanishing_polys(s, 10, rng):
        assert not p.evaluate_all()[s.indicator()].any()
        assert p.degree <= 3


def test_polys_generate_noiseless(rng):
    _, key = _setup(6, rng)
    inst = mpub.polys_generate(key, 12, 0.0, rng)
    assert np.array_equal(mpub.common_zeros(inst.ps, 6), key.subspace.indicator())
    assert np.array_equal(mpub.common_zeros(inst.qs, 6), key.dual.indicator())
    assert "\n\n" in inst.to_text()


def test_polys_generate_noisy_slots(rng):
    _, key = _setup(6, rng)
    inst = mpub.polys_generate(key, 8, 0.25, rng)
    assert len(inst.noisy_p) == 2 and len(inst.noisy_q) == 2
    good = [inst.ps[i] for i in range(8) if i not in inst.noisy_p]
    assert np.array_equal(mpub.common_zeros(good, 6), key.subspace.indicator())


def test_sec_reduction_small(rng):
    _, key = _setup(4, rng)
    inst = mpub.polys_generate(key, 8, 0.0, rng)
    res = mpub.sec_reduction_forge(inst, mpub.simulator_cloner, rng, trials=2000)
    assert abs(res.rate - 0.25) < 4 * math.sqrt(0.1875 / 2000)
    assert sum(b == key.subspace for b in res.bases) >= 0.95 * res.successes


def test_sec_reduction_needs_cloner(rng):
    _, key = _setup(4, rng)
    inst = mpub.polys_generate(key, 8, 0.0, rng)
    with pytest.raises(ValueError):
        mpub.sec_reduction_forge(inst, None, rng)


def test_noisy_attack_small(rng):
    _, key = _setup(4, rng)
    inst = mpub.polys_generate(key, 8, 0.25, rng)
    note = mpub.hs_mint(key)
    res = mpub.noisy_poly_attack(inst, note, rng, truth=note.state)
    assert res.genuine_p == sorted(set(range(8)) - inst.noisy_p)
    assert res.genuine_q == sorted(set(range(8)) - inst.noisy_q)
    assert res.basis == key.subspace
    assert res.min_fidelity >= 1 - 1e-4


def test_full_scheme(rng):
    signer = mpub.Ed25519Signer.from_seed(bytes(range(32)))
    oracle, key = _setup(4, rng)
    signed = mpub.full_scheme_mint(signer, key)
    ok, _ = mpub.full_scheme_verify(signer.public(), oracle, signed, rng)
    assert ok
    bad = mpub.SignedNote(signed.serial ^ 1, signed.signature, signed.note)
    ok, back = mpub.full_scheme_verify(signer.public(), oracle, bad, rng)
    assert not ok and back.state is signed.note.state
    with pytest.raises(PermissionError):
        signer.public().sign(b"x")


def test_full_scheme_forged_state_matches_mini_scheme(rng):
    signer = mpub.Ed25519Signer.from_seed(bytes(32))
    oracle, key = _setup(4, rng)
    t = f2.random_subspace(4, 2, rng)
    signed = mpub.full_scheme_mint(signer, key)
    forged = mpub.SignedNote(signed.serial, signed.signature, Banknote(key.serial, mpub.subspace_state(t)))
    p = mpub.hs_acceptance_probability(oracle, key.serial, forged.note.state)
    hits = sum(mpub.full_scheme_verify(signer, oracle, forged, rng)[0] for _ in range(2000))
    assert abs(hits / 2000 - p) < 4 * math.sqrt(max(p * (1 - p), 1e-3) / 2000)
