"""Seeded experiments behind the command-line front end.

Each function takes its parameters and a Generator and returns a list of
``Metric`` rows plus a flag saying whether every built-in check held.
Sampled rates carry their trial count and a 3-sigma interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algorithms, core, f2, money_private, money_public
from .rng import split


@dataclass(frozen=True)
class Metric:
    name: str
    value: float
    ci_low: float
    ci_high: float
    trials: int


def exact(name, value) -> Metric:
    v = float(value)
    return Metric(name, v, v, v, 0)


def rate(name, hits, trials) -> Metric:
    p = hits / trials
    half = 3 * math.sqrt(max(p * (1 - p), 0.0) / trials)
    return Metric(name, p, max(p - half, 0.0), min(p + half, 1.0), int(trials))


def mean(name, samples) -> Metric:
    x = np.asarray(samples, dtype=float)
    m = float(x.mean())
    half = 3 * float(x.std(ddof=1)) / math.sqrt(x.size) if x.size > 1 else 0.0
    return Metric(name, m, m - half, m + half, int(x.size))


# ------------------------------------------------------------------ checks


def selftest(rng, pairs=200):
    """Core invariants on random instances: norm, no-signalling, distance sandwich."""
    ok = True
    worst_norm = worst_sig = worst_sand = 0.0
    for r in split(rng, pairs):
        s = core.random_state(3, r)
        u = core.Unitary(core.random_unitary(4, r))
        t = core.apply_unitary(s, u, [0, 1])
        worst_norm = max(worst_norm, abs(np.vdot(t.amps, t.amps).real - 1))
        before = core.reduced_state(s, [2]).mat
        after = core.reduced_state(t, [2]).mat
        worst_sig = max(worst_sig, float(np.abs(before - after).max()))
        a, b = core.random_density(2, r), core.random_density(2, r)
        d, fid = core.trace_distance(a, b), core.fidelity(a, b)
        worst_sand = max(worst_sand, (1 - fid) - d, d - math.sqrt(max(1 - fid**2, 0.0)))
    ok &= worst_norm <= 1e-10 and worst_sig <= 1e-10 and worst_sand <= 1e-9
    alice = core.PureState.from_amplitudes([1, 1, -1, 0], normalize=True)
    pt = core.reduced_state(alice, [0]).mat
    pt_err = float(np.abs(pt - np.array([[2, -1], [-1, 1]]) / 3).max())
    ok &= pt_err <= 1e-12
    return [
        exact("max_norm_drift", worst_norm),
        exact("max_no_signalling_gap", worst_sig),
        exact("max_sandwich_violation", max(worst_sand, 0.0)),
        exact("partial_trace_example_error", pt_err),
    ], ok


def wiesner(n, trials, attack, rng, iters=400):
    metrics = []
    ch = None
    if attack == "optimal":
        opt = money_private.optimize_clone_channel(iters)
        ch = opt.channel
        metrics.append(exact("clone_value", opt.value))
    counts = money_private.counterfeit_trials(n, trials, rng, attack, ch)
    per_qubit = 5 / 8 if attack == "naive" else 0.75
    metrics.append(rate("both_pass", int((counts == 2).sum()), trials))
    metrics.append(exact("predicted_both_pass", per_qubit**n))
    return metrics, True


def bbbw(n, trials, rng):
    """Honest acceptance and naive-counterfeit success under a keyed bank."""
    bank = money_private.BbbwBank(n, rng=rng)
    honest = forged = 0
    for _ in range(trials):
        note = bank.mint()
        ok, _ = bank.verify(note, rng)
        honest += ok
        a, b = money_private.naive_counterfeit(note, rng)
        forged += money_private.count(bank, [a, b], rng) == 2
    ok = honest == trials
    return [
        rate("honest_accept", honest, trials),
        rate("naive_both_pass", forged, trials),
        exact("predicted_naive_both_pass", (5 / 8) ** n),
    ], ok


def bomb(package, epsilon, trials, rng):
    exploded, verdicts = algorithms.ev_bomb_trials(package, epsilon, trials, rng)
    metrics = [rate("explosion", int(exploded.sum()), trials)]
    if package == "dud":
        ok = not exploded.any() and bool(np.all(verdicts == 1))
        metrics.append(rate("verdict_no_bomb", int((verdicts == 1).sum()), trials))
    else:
        ok = bool(np.all(verdicts[~exploded] == 0))
        metrics.append(exact("predicted_explosion", algorithms.bomb_explosion_probability(epsilon)))
        rounds = math.ceil(math.pi / (2 * epsilon) - 1e-12)
        metrics.append(exact("nominal_explosion", 1 - math.cos(epsilon) ** (2 * rounds)))
    return metrics, ok


def attack(kind, n, epsilon, trials, rng):
    recovered = caught = 0
    queries = []
    for r in split(rng, trials):
        if kind == "adaptive":
            bank = money_private.WiesnerBank(n, money_private.NAIVE, r)
            note = bank.mint()
            bs, _, q = money_private.adaptive_attack(bank, note, r)
            c = bank.failures > 0
        else:
            bank = money_private.WiesnerBank(n, money_private.STRICT, r)
            note = bank.mint()
            bs, c, q = money_private.bomb_attack(bank, note, epsilon, r)
        recovered += bs == bank.table[note.serial]
        caught += bool(c)
        queries.append(q)
    return [
        rate("recovered", recovered, trials),
        rate("caught", caught, trials),
        mean("verifications", queries),
    ], True


def simon(n, trials, rng, table=None):
    rounds, hits, valid = [], 0, True
    for r in split(rng, trials):
        if table is not None:
            inst = algorithms.SimonInstance(table.clone(), _simon_secret(table))
            secret = inst.secret
        else:
            secret = int(r.integers(1, 1 << n))
            inst = algorithms.SimonInstance.two_to_one(n, secret, r)
        res = algorithms.simon_run(inst, r)
        hits += res.secret == secret
        rounds.append(res.rounds)
        if secret is not None:
            valid &= all(f2.dot(z, secret) == 0 for z in res.samples)
    return [rate("exact_recovery", hits, trials), exact("median_rounds", np.median(rounds))], valid


def _simon_secret(table):
    t = table.table
    for s in range(1, t.size):
        if np.all(t == t[np.arange(t.size) ^ s]):
            return s
    return None


def grover(n, marked, trials, rng):
    N = 1 << n
    o = algorithms.BooleanOracle(n, 1, (np.arange(N) < marked).astype(np.int64))
    k = algorithms.grover_iterations(N, marked)
    theta = math.asin(math.sqrt(marked / N))
    exact_p = float(algorithms.grover_state(o.clone(), k).probabilities()[:marked].sum())
    hits = 0
    for r in split(rng, trials):
        hits += algorithms.grover_search(o.clone(), r, n_marked=marked).found
    ok = abs(exact_p - math.sin((2 * k + 1) * theta) ** 2) <= 1e-9
    return [
        exact("iterations", k),
        exact("success_probability", exact_p),
        exact("predicted_success", math.sin((2 * k + 1) * theta) ** 2),
        rate("empirical_success", hits, trials),
    ], ok


def hs(n, trials, experiment, rng, m=8, noise_rate=0.25):
    oracle = money_public.HsOracle()
    if experiment == "verify":
        key = money_public.hs_keygen(n, rng, oracle)
        legit = money_public.hs_acceptance_probability(oracle, key.serial, money_public.hs_mint(key).state)
        worst = 0.0
        for r in split(rng, trials):
            t = f2.random_subspace(n, n // 2, r)
            p = money_public.hs_acceptance_probability(oracle, key.serial, money_public.subspace_state(t))
            inter = np.count_nonzero(key.subspace.indicator() & t.indicator())
            worst = max(worst, abs(p - inter**2 / (1 << n)))
        ok = abs(legit - 1) <= 1e-9 and worst <= 1e-9
        return [exact("legit_accept", legit), exact("max_random_t_error", worst)], ok
    if experiment == "forge":
        queries, passes = [], 0.0
        for r in split(rng, trials):
            o = money_public.HsOracle()
            key = money_public.hs_keygen(n, r, o)
            res = money_public.grover_forge(o, key.serial, r)
            queries.append(res.queries)
            passes += money_public.hs_acceptance_probability(o, key.serial, res.note.state)
        return [mean("chi_s_queries", queries), exact("mean_forged_accept", passes / trials)], True
    if experiment == "reduction":
        key = money_public.hs_keygen(n, rng, oracle)
        inst = money_public.polys_generate(key, 2 * n, 0.0, rng)
        res = money_public.sec_reduction_forge(inst, money_public.simulator_cloner, rng, trials)
        spans = sum(b == key.subspace for b in res.bases)
        return [
            rate("postselect_rate", res.successes, trials),
            exact("predicted_rate", 2.0 ** (-n / 2)),
            rate("basis_correct", spans, max(res.successes, 1)),
        ], True
    if experiment == "noisy":
        hits, min_fid = 0, 1.0
        for r in split(rng, trials):
            key = money_public.hs_keygen(n, r, oracle)
            inst = money_public.polys_generate(key, m, noise_rate, r)
            note = money_public.hs_mint(key)
            res = money_public.noisy_poly_attack(inst, note, r, truth=note.state)
            good_p = sorted(set(range(m)) - inst.noisy_p)
            good_q = sorted(set(range(m)) - inst.noisy_q)
            hits += res.genuine_p == good_p and res.genuine_q == good_q and res.basis == key.subspace
            min_fid = min(min_fid, res.min_fidelity)
        return [rate("full_recovery", hits, trials), exact("min_fidelity", min_fid)], min_fid >= 1 - 1e-4
    raise ValueError(f"unknown hs experiment {experiment!r}")


def hh(n, mode, rng, samples=10000):
    perm = rng.permutation(1 << n)
    f = algorithms.BooleanOracle(n, n + 1, perm)
    if mode == "equal_ranges":
        g = algorithms.BooleanOracle(n, n + 1, rng.permutation(perm))
    else:
        g = algorithms.BooleanOracle(n, n + 1, perm + (1 << n))
    rep = algorithms.hh_decode_demo(f, g, mode, rng, samples)
    if mode == "equal_ranges":
        return [exact("bell_fidelity", rep.bell_fidelity)], abs(rep.bell_fidelity - 1) <= 1e-9
    ok = rep.exact_max_squared <= 0.5 + 1e-9 and rep.search_max_squared <= 0.5 + 1e-9
    return [
        exact("squared_fidelity_undecoded", rep.squared_fidelity),
        exact("exact_max_squared_fidelity", rep.exact_max_squared),
        exact("search_max_squared_fidelity", rep.search_max_squared),
    ], ok


def clonopt(iters, n, trials, rng):
    opt = money_private.optimize_clone_channel(iters)
    psd, tr = opt.channel.residuals()
    metrics = [exact("value", opt.value), exact("psd_residual", psd), exact("trace_residual", tr)]
    if trials:
        counts = money_private.counterfeit_trials(n, trials, rng, "optimal", opt.channel)
        metrics.append(rate("both_pass", int((counts == 2).sum()), trials))
        metrics.append(exact("predicted_both_pass", opt.value**n))
    return metrics, psd <= 1e-8 and tr <= 1e-8
