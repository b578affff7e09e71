"""The bundle of property checks behind ``sponsored-qa verify``."""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..auction import BidProfile, platform_value, run_auction
from .counterexamples import epsilon_sweep, verify_prop2, verify_prop3
from .equilibrium import BidGrid, check_nash, check_truthful_dominance, random_opponent_profiles
from .oracle import oracle_auction
from .scenarios import random_bids, random_scenario, scenario_stream

IDENTITY_TOL = 1e-9
COUNTEREXAMPLE_EPSILONS = (0.001, 0.01, 0.05)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, passed, detail, time.perf_counter() - t0)


def payment_identity(seed: int, count: int) -> tuple[bool, str]:
    """Under random bids the winner's PV at its payment equals the runner-up's PV."""
    worst_identity = worst_bound = -np.inf
    for rng in scenario_stream(seed, count):
        setup = random_scenario(rng).to_setup()
        bids = random_bids(rng, setup)
        out = run_auction(setup, bids)
        lhs = platform_value(out.user_utility[out.winner], out.payment)
        rhs = platform_value(out.user_utility[out.second], bids[out.second])
        worst_identity = max(worst_identity, abs(lhs - rhs))
        worst_bound = max(worst_bound, out.payment - bids[out.winner])
    ok = worst_identity <= IDENTITY_TOL and worst_bound <= IDENTITY_TOL
    return ok, f"{count} scenarios, max |dPV|={worst_identity:.3g}, max(payment-bid)={worst_bound:.3g}"


def surplus_identity(seed: int, count: int) -> tuple[bool, str]:
    """Truthful winner utility equals the social-welfare gap and is nonnegative."""
    worst_res, min_util = 0.0, np.inf
    for rng in scenario_stream(seed, count):
        setup = random_scenario(rng).to_setup()
        out = run_auction(setup, BidProfile.truthful(setup))
        u = out.utility[out.winner]
        worst_res = max(worst_res, abs(u - (out.social_welfare_winner - out.social_welfare_second)))
        min_util = min(min_util, u)
    ok = worst_res <= IDENTITY_TOL and min_util >= -IDENTITY_TOL
    return ok, f"{count} scenarios, max |residual|={worst_res:.3g}, min winner utility={min_util:.3g}"


def truthful_dominance(seed: int, count: int, profiles: int = 50, grid_points: int = 101) -> tuple[bool, str]:
    """No grid deviation beats bidding the value, for any advertiser, in any scenario."""
    worst, tested = -np.inf, 0
    for rng in scenario_stream(seed + 1, count):
        setup = random_scenario(rng).to_setup()
        grid = BidGrid.around_values(setup, grid_points)
        for i in setup.ids:
            opp = random_opponent_profiles(rng, setup, i, profiles)
            rep = check_truthful_dominance(setup, i, grid, opp)
            worst = max(worst, rep.max_violation)
            tested += rep.deviations_tested
    return worst <= IDENTITY_TOL, f"{count} scenarios, {tested} deviations, max gain={worst:.3g}"


def truthful_nash(seed: int, count: int, grid_points: int = 101) -> tuple[bool, str]:
    worst = -np.inf
    for rng in scenario_stream(seed + 2, count):
        setup = random_scenario(rng).to_setup()
        rep = check_nash(setup, BidProfile.truthful(setup), BidGrid.around_values(setup, grid_points))
        worst = max(worst, rep.worst_gain)
    return worst <= IDENTITY_TOL, f"{count} truthful profiles, max deviation gain={worst:.3g}"


def counterexample(which: int) -> tuple[bool, str]:
    check = verify_prop2 if which == 2 else verify_prop3
    results = [check(e) for e in COUNTEREXAMPLE_EPSILONS]
    ok = all(r.claim_holds for r in results)
    gap = "value_gap" if which == 2 else "utility_gap"
    detail = "; ".join(
        f"eps={r.epsilon:g}: {gap}={getattr(r, gap):.4f}, pv_gap={r.pv_gap:.4f}, winner={r.winner}"
        for r in results
    )
    return ok, detail


def oracle_differential(seed: int, count: int) -> tuple[bool, str]:
    """Engine and brute-force oracle agree on winner and payment."""
    mismatches, worst = 0, 0.0
    for rng in scenario_stream(seed + 3, count):
        raw = random_scenario(rng)
        setup = raw.to_setup()
        truthful = bool(rng.integers(0, 2))
        bids = BidProfile.truthful(setup) if truthful else random_bids(rng, setup)
        out = run_auction(setup, bids)
        ref = oracle_auction(
            setup.organic.vocab, raw.organic_counts, raw.ad_counts, raw.lambdas,
            None if truthful else [bids[i] for i in raw.ids], raw.ids, raw.mu,
        )
        if ref["winner"] != out.winner:
            mismatches += 1
        worst = max(worst, abs(ref["payment"] - out.payment))
    ok = mismatches == 0 and worst <= IDENTITY_TOL
    return ok, f"{count} scenarios, winner mismatches={mismatches}, max |dpayment|={worst:.3g}"


def prop3_sweep() -> tuple[bool, str]:
    """Winner is 2 for small epsilon; report where each condition first fails."""
    res = epsilon_sweep(3, 0.01, 0.49, 97)
    small_ok = all(r.winner == 2 for r in res.rows if r.epsilon <= 0.05)
    parts = []
    for c in res.crossovers:
        parts.append(f"{c.condition}: " + ("no crossover in [0.01, 0.49]" if c.root is None else f"eps*={c.root:.6f}"))
    return small_ok, "; ".join(parts)


def run_verification(seed: int = 42, scenarios: int = 1000, dominance_scenarios: int = 200) -> list[CheckResult]:
    return [
        _timed("payment_identity", lambda: payment_identity(seed, scenarios)),
        _timed("vcg_surplus_identity", lambda: surplus_identity(seed, scenarios)),
        _timed("truthful_dominance", lambda: truthful_dominance(seed, dominance_scenarios)),
        _timed("truthful_profile_is_nash", lambda: truthful_nash(seed, dominance_scenarios)),
        _timed("value_counterexample", lambda: counterexample(2)),
        _timed("utility_counterexample", lambda: counterexample(3)),
        _timed("utility_counterexample_sweep", prop3_sweep),
        _timed("oracle_differential", lambda: oracle_differential(seed, scenarios)),
    ]
