"""Verification of the auction's game-theoretic properties."""

from .counterexamples import (
    CounterexampleScenario,
    Crossover,
    CounterexampleCheck,
    SweepResult,
    SweepRow,
    build_prop2_scenario,
    build_prop3_scenario,
    epsilon_sweep,
    verify_prop2,
    verify_prop3,
)
from .equilibrium import (
    BidGrid,
    DominanceReport,
    NashReport,
    check_nash,
    check_truthful_dominance,
    profile_social_welfare,
    random_opponent_profiles,
    value_grid,
    vcg_surplus_identity,
)
from .oracle import oracle_auction, oracle_winner_bruteforce
from .scenarios import RawScenario, random_bids, random_scenario, scenario_stream

__all__ = [
    "BidGrid",
    "CounterexampleScenario",
    "Crossover",
    "DominanceReport",
    "NashReport",
    "CounterexampleCheck",
    "RawScenario",
    "SweepResult",
    "SweepRow",
    "build_prop2_scenario",
    "build_prop3_scenario",
    "check_nash",
    "check_truthful_dominance",
    "epsilon_sweep",
    "oracle_auction",
    "oracle_winner_bruteforce",
    "profile_social_welfare",
    "random_bids",
    "random_opponent_profiles",
    "random_scenario",
    "scenario_stream",
    "value_grid",
    "vcg_surplus_identity",
    "verify_prop2",
    "verify_prop3",
]
