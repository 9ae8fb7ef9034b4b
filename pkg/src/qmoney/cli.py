"""Command-line front end: ``qmoney <command> [options]``.

Every command maps to one function in ``qmoney.experiments``. Reports go
to stdout (or ``--output``) as JSON with sorted keys or as CSV with header
``metric,value,ci_low,ci_high,trials``. Numbers carry 12 significant
digits. Exit codes: 0 success, 1 usage error, 2 a built-in check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import __version__, experiments
from .algorithms import BooleanOracle
from .rng import SEED_ENV, default_seed, make_rng

COMMANDS = ("selftest", "wiesner", "bbbw", "bomb", "attack", "simon", "grover", "hs", "hh", "clonopt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _num(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


def _fmt(x):
    return f"{x:.12g}" if isinstance(x, float) else str(x)


def emit_report(report: dict, fmt: str) -> bytes:
    """Serialise a report; JSON keys are sorted so equal runs give equal bytes."""
    if fmt == "json":
        clean = dict(report)
        clean["metrics"] = [{k: _num(v) for k, v in m.items()} for m in report["metrics"]]
        return (json.dumps(clean, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "value", "ci_low", "ci_high", "trials"])
        for m in report["metrics"]:
            w.writerow([m["name"], _fmt(m["value"]), _fmt(m["ci_low"]), _fmt(m["ci_high"]), m["trials"]])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or built-in)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    p = _Parser(prog="qmoney", description="Quantum money experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("selftest", parents=[common], help="core invariant checks")

    s = sub.add_parser("wiesner", parents=[common], help="counterfeit Wiesner notes")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--trials", type=int, default=100000)
    s.add_argument("--attack", choices=("naive", "optimal"), default="naive")

    s = sub.add_parser("bbbw", parents=[common], help="keyed (BBBW) bank")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--trials", type=int, default=2000)

    s = sub.add_parser("bomb", parents=[common], help="Elitzur-Vaidman bomb tester")
    s.add_argument("--package", choices=("bomb", "dud"), default="bomb")
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--trials", type=int, default=100000)

    s = sub.add_parser("attack", parents=[common], help="interactive attacks on a Wiesner bank")
    s.add_argument("--kind", choices=("adaptive", "bomb"), default="adaptive")
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--trials", type=int, default=100)

    s = sub.add_parser("simon", parents=[common], help="Simon's algorithm")
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--table", default=None, help="truth table file (one binary output per line)")

    s = sub.add_parser("grover", parents=[common], help="Grover search")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--marked", type=int, default=1)
    s.add_argument("--trials", type=int, default=1000)

    s = sub.add_parser("hs", parents=[common], help="hidden-subspace money")
    s.add_argument("--experiment", choices=("verify", "forge", "reduction", "noisy"), default="verify")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--trials", type=int, default=100)

    s = sub.add_parser("hh", parents=[common], help="Harlow-Hayden decoding demo")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--mode", choices=("equal_ranges", "disjoint_ranges"), default="equal_ranges")
    s.add_argument("--samples", type=int, default=10000)

    s = sub.add_parser("clonopt", parents=[common], help="optimal cloning channel for BB84 states")
    s.add_argument("--iters", type=int, default=400)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--trials", type=int, default=0)
    return p


def _dispatch(args, rng):
    c = args.command
    if c == "selftest":
        return experiments.selftest(rng)
    if c == "wiesner":
        return experiments.wiesner(args.n, args.trials, args.attack, rng)
    if c == "bbbw":
        return experiments.bbbw(args.n, args.trials, rng)
    if c == "bomb":
        return experiments.bomb(args.package, args.epsilon, args.trials, rng)
    if c == "attack":
        return experiments.attack(args.kind, args.n, args.epsilon, args.trials, rng)
    if c == "simon":
        table = None
        if args.table:
            with open(args.table) as fh:
                table = BooleanOracle.from_text(fh.read())
        return experiments.simon(args.n, args.trials, rng, table)
    if c == "grover":
        return experiments.grover(args.n, args.marked, args.trials, rng)
    if c == "hs":
        return experiments.hs(args.n, args.trials, args.experiment, rng)
    if c == "hh":
        return experiments.hh(args.n, args.mode, rng, args.samples)
    if c == "clonopt":
        return experiments.clonopt(args.iters, args.n, args.trials, rng)
    raise UsageError(f"unknown command {c!r}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        floor = 0 if args.command == "clonopt" else 1
        if getattr(args, "trials", floor) < floor:
            parser.error(f"--trials must be at least {floor}")
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    seed = default_seed() if args.seed is None else args.seed
    rng = make_rng(seed)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "format", "timing")}
    config["seed"] = seed
    t0 = time.perf_counter()
    try:
        metrics, ok = _dispatch(args, rng)
    except (ValueError, OSError) as e:
        print(f"qmoney {args.command}: {e}", file=sys.stderr)
        return 1
    report = {
        "config": config,
        "metrics": [m.__dict__ for m in metrics],
        "version": __version__,
        "checks_passed": bool(ok),
    }
    if args.timing:
        report["wall_seconds"] = time.perf_counter() - t0
    data = emit_report(report, args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0 if ok else 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
