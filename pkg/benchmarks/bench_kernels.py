"""Time the numba kernels against the pure-numpy fallback.

Runs each workload once per backend to warm up (and JIT-compile), then
takes the best of ``--repeats`` timed runs. Results are checked for
equality across backends and printed as JSON.

    python3 benchmarks/bench_kernels.py --repeats 3
"""
import argparse
import json
import time

import numpy as np

import qmoney
from qmoney import algorithms, core, kernels, money_private
from qmoney.rng import make_rng


def _gates(backend_seed):
    rng = make_rng(backend_seed)
    s = core.random_state(14, rng)
    u = core.random_unitary(4, rng)
    amps = s.amps
    for q in range(13):
        amps = kernels.apply_gate(amps, 14, [q, q + 1], u)
    return amps


def _measure(seed):
    rng = make_rng(seed)
    s = core.random_state(14, rng)
    out = []
    for _ in range(20):
        got, _ = kernels.measure_bases(s.amps, 14, np.arange(14), rng.random(14) < 0.5, rng.random(14))
        out.append(got)
    return np.array(out)


def _wiesner(seed):
    return money_private.counterfeit_trials(4, 20000, make_rng(seed), "naive")


def _bomb(seed):
    return algorithms.ev_bomb_trials("bomb", 0.01, 5000, make_rng(seed))[0]


WORKLOADS = {
    "apply_gate_14q": _gates,
    "measure_bases_14q": _measure,
    "wiesner_naive_n4": _wiesner,
    "ev_bomb_eps001": _bomb,
}


def bench(fn, repeats, seed):
    fn(seed)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(seed)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args()

    rows = {}
    for name, fn in WORKLOADS.items():
        times, outs = {}, {}
        for backend in ("numba", "numpy"):
            prev = qmoney.set_backend(backend)
            try:
                times[backend], outs[backend] = bench(fn, args.repeats, args.seed)
            finally:
                qmoney.set_backend(prev)
        rows[name] = {
            "numba_s": round(times["numba"], 6),
            "numpy_s": round(times["numpy"], 6),
            "speedup": round(times["numpy"] / times["numba"], 2),
            "outputs_match": bool(np.allclose(outs["numba"], outs["numpy"], atol=1e-12)),
        }
    print(json.dumps({"numba_available": qmoney._backend.HAS_NUMBA, "results": rows}, indent=2))


if __name__ == "__main__":
    main()
