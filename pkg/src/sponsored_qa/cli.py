"""Command-line interface.

Exit codes: 0 success, 1 a checked property failed, 2 bad usage or invalid
input, 3 domain error (for example an infinite cross entropy).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import DomainError, ValidationError
from .game_analysis.counterexamples import default_jobs, epsilon_sweep
from .game_analysis.equilibrium import BidGrid, check_truthful_dominance, random_opponent_profiles
from .game_analysis.verification import run_verification
from .scenario_io import build_report, build_setup, load_scenario, write_report, write_sweep_csv

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
DEFAULT_SEED = 42


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _default_seed() -> int:
    env = os.environ.get("SQA_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return _seed(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise ValidationError(f"{env!r} is not a valid seed", field="SQA_SEED") from None


def _read_scenario(path: str):
    return build_setup(load_scenario(Path(path).read_text()))


def cmd_run(args) -> int:
    scenario = load_scenario(Path(args.scenario).read_text())
    setup, bids = build_setup(scenario)
    report = write_report(build_report(setup, bids, scenario=scenario))
    if args.report:
        Path(args.report).write_text(report)
        print(f"report written to {args.report}")
    else:
        sys.stdout.write(report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    res = epsilon_sweep(args.prop, args.eps_start, args.eps_end, args.steps, jobs=args.jobs)
    Path(args.out).write_text(write_sweep_csv(res.rows))
    print(f"{len(res.rows)} rows written to {args.out}")
    for c in res.crossovers:
        state = "holds" if c.holds_at_start else "fails"
        if c.root is None:
            print(f"{c.condition}: {state} at eps={args.eps_start:g}, no crossover in range")
        else:
            print(f"{c.condition}: {state} at eps={args.eps_start:g}, flips at eps*={c.root:.10f} "
                  f"(first grid point {c.grid_epsilon:.6g})")
    return EXIT_OK


def cmd_dominance(args) -> int:
    setup, _ = _read_scenario(args.scenario)
    ids = setup.ids if args.advertiser is None else (args.advertiser,)
    if args.advertiser is not None and args.advertiser not in setup.ids:
        print(f"sponsored-qa: error: unknown advertiser id {args.advertiser}; known ids {list(setup.ids)}",
              file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(args.seed)
    grid = BidGrid.around_values(setup, args.grid_points)
    passed = True
    for i in ids:
        rep = check_truthful_dominance(setup, i, grid, random_opponent_profiles(rng, setup, i, args.profiles))
        passed &= rep.passed
        print(f"advertiser {rep.advertiser}: profiles={rep.profiles_tested} deviations={rep.deviations_tested} "
              f"max_violation={rep.max_violation:.6g} {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    results = run_verification(args.seed, args.scenarios, args.dominance_scenarios)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.seconds:6.2f}s  {r.detail}")
    ok = all(r.passed for r in results)
    failed = [r.name for r in results if not r.passed]
    print(f"{'all checks passed' if ok else 'FAILED: ' + ', '.join(failed)} "
          f"(seed={args.seed}, {time.perf_counter() - t0:.2f}s)")
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sponsored-qa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    seed_kw = dict(type=_seed, default=None, help="RNG seed (default: $SQA_SEED or 42)")

    p = sub.add_parser("run", help="run the auction for one scenario file")
    p.add_argument("scenario")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", **seed_kw)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="exact epsilon sweep of a counterexample construction")
    p.add_argument("--prop", type=int, choices=(2, 3), required=True)
    p.add_argument("--eps-start", type=float, required=True)
    p.add_argument("--eps-end", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=_positive_int, default=default_jobs())
    p.add_argument("--seed", **seed_kw)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dominance", help="search for profitable deviations from truthful bidding")
    p.add_argument("scenario")
    p.add_argument("--advertiser", type=int, help="advertiser id (default: all)")
    p.add_argument("--grid-points", type=_positive_int, default=101)
    p.add_argument("--profiles", type=_positive_int, default=50)
    p.add_argument("--seed", **seed_kw)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("verify", help="run every property check and print a pass/fail table")
    p.add_argument("--scenarios", type=_positive_int, default=1000)
    p.add_argument("--dominance-scenarios", type=_positive_int, default=200)
    p.add_argument("--seed", **seed_kw)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except ValidationError as exc:
        print(f"sponsored-qa: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"sponsored-qa: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"sponsored-qa: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
