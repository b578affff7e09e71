"""Two-token, two-advertiser constructions where the auction winner surprises.

In the ``"value"`` construction the winner does not have the highest value
(hence not the highest truthful bid). In the ``"utility"`` construction the
winner's sponsored answer is not the best one for the user. Both are
evaluated exactly here, without dropping small-epsilon terms, and can be
swept over epsilon to locate where each inequality stops holding.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from ..auction import Advertiser, AuctionSetup, BidProfile, run_auction
from ..errors import ValidationError
from ..text_lm import Document, Vocabulary

Which = Literal[2, 3]

VOCAB = Vocabulary(("a", "b"))


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in (0, 0.5), got {epsilon}", field="epsilon")
    return epsilon


def _which(which) -> int:
    which = int(which)
    if which not in (2, 3):
        raise ValidationError(f"construction must be 2 or 3, got {which}", field="prop")
    return which


@dataclass(frozen=True, eq=False)
class CounterexampleScenario:
    which: int
    epsilon: float
    setup: AuctionSetup


def _build(which: int, epsilon: float) -> CounterexampleScenario:
    e = _check_epsilon(epsilon)
    organic = Document(VOCAB, np.array([1.0 - e, e]))
    ad1 = Document(VOCAB, np.array([e, 1.0 - e]))
    ad2 = Document(VOCAB, np.array([0.5, 0.5]))
    lam1, lam2 = (e, 1.0 - e) if which == 2 else (1.0 - e, 0.5)
    setup = AuctionSetup.build(
        organic,
        [Advertiser(1, ad1, lam1), Advertiser(2, ad2, lam2)],
        question=Document(VOCAB, np.array([1.0, 1.0])),
    )
    return CounterexampleScenario(which, e, setup)


def build_prop2_scenario(epsilon: float) -> CounterexampleScenario:
    """Organic ``(1-e, e)``, ads ``(e, 1-e)`` and ``(0.5, 0.5)``, lambdas ``(e, 1-e)``."""
    return _build(2, epsilon)


def build_prop3_scenario(epsilon: float) -> CounterexampleScenario:
    """Same documents as :func:`build_prop2_scenario`, lambdas ``(1-e, 0.5)``."""
    return _build(3, epsilon)


def build_scenario(which: Which, epsilon: float) -> CounterexampleScenario:
    return _build(_which(which), epsilon)


@dataclass(frozen=True)
class CounterexampleCheck:
    """Exact margins of one construction under truthful bidding (all in nats)."""

    which: int
    epsilon: float
    shift_a: float
    value_gap: float  # v_1 - v_2
    utility_gap: float  # U_1 - U_2
    pv_gap: float  # PV_2 - PV_1
    winner: int
    payment: float

    @property
    def value_inequality(self) -> bool:
        return self.value_gap > 0

    @property
    def utility_inequality(self) -> bool:
        return self.utility_gap > 0

    @property
    def winner_is_2(self) -> bool:
        return self.winner == 2

    @property
    def claim_holds(self) -> bool:
        """Both the construction's inequality and the advertiser-2 win hold."""
        ineq = self.value_inequality if self.which == 2 else self.utility_inequality
        return ineq and self.winner_is_2


def evaluate(which: Which, epsilon: float) -> CounterexampleCheck:
    setup = build_scenario(which, epsilon).setup
    out = run_auction(setup, BidProfile.truthful(setup))
    v, u, pv = out.value, out.user_utility, out.platform_value
    return CounterexampleCheck(
        which=int(which),
        epsilon=float(epsilon),
        shift_a=setup.shift_a,
        value_gap=v[1] - v[2],
        utility_gap=u[1] - u[2],
        pv_gap=pv[2] - pv[1],
        winner=out.winner,
        payment=out.payment,
    )


def verify_prop2(epsilon: float) -> CounterexampleCheck:
    """Does advertiser 2 win although advertiser 1 values its answer more?"""
    return evaluate(2, epsilon)


def verify_prop3(epsilon: float) -> CounterexampleCheck:
    """Does advertiser 2 win although advertiser 1's answer serves the user better?"""
    return evaluate(3, epsilon)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    value_gap: float
    utility_gap: float
    pv_gap: float
    winner: int
    payment: float


@dataclass(frozen=True)
class Crossover:
    """Where a condition first changes truth value along the sweep.

    ``grid_epsilon`` is the first sweep point at which it differs from the
    first row, ``root`` the exact sign change of the underlying margin
    bracketed between that point and its predecessor.
    """

    condition: str
    holds_at_start: bool
    grid_epsilon: float | None
    root: float | None


@dataclass(frozen=True)
class SweepResult:
    which: int
    rows: tuple[SweepRow, ...]
    crossovers: tuple[Crossover, ...]

    def crossover(self, condition: str) -> Crossover:
        for c in self.crossovers:
            if c.condition == condition:
                return c
        raise KeyError(condition)


def _row(args: tuple[int, float]) -> SweepRow:
    which, eps = args
    c = evaluate(which, eps)
    return SweepRow(c.epsilon, c.value_gap, c.utility_gap, c.pv_gap, c.winner, c.payment)


_MARGINS = {
    "winner_is_2": lambda r: r.pv_gap,
    "value_inequality": lambda r: r.value_gap,
    "utility_inequality": lambda r: r.utility_gap,
}


def _crossover(which: int, rows: tuple[SweepRow, ...], condition: str) -> Crossover:
    margin = _MARGINS[condition]
    start = margin(rows[0]) > 0
    for prev, row in zip(rows, rows[1:]):
        if (margin(row) > 0) != start:
            f = lambda e: margin(_row((which, e)))  # noqa: E731
            lo, hi = prev.epsilon, row.epsilon
            root = lo if f(lo) == 0 else hi if f(hi) == 0 else brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)
            return Crossover(condition, start, row.epsilon, float(root))
    return Crossover(condition, start, None, None)


def epsilon_sweep(which: Which, eps_start: float, eps_end: float, steps: int, jobs: int = 1) -> SweepResult:
    """Evaluate a construction exactly at ``steps`` evenly spaced epsilons.

    ``jobs > 1`` spreads points over worker processes; rows always come back
    in epsilon order.
    """
    which = _which(which)
    _check_epsilon(eps_start)
    _check_epsilon(eps_end)
    if not eps_start < eps_end:
        raise ValidationError("eps_start must be smaller than eps_end", field="eps_start")
    if steps < 2:
        raise ValidationError(f"a sweep needs at least 2 steps, got {steps}", field="steps")
    tasks = [(which, float(e)) for e in np.linspace(eps_start, eps_end, steps)]
    jobs = max(1, min(jobs, steps))
    if jobs == 1:
        rows = tuple(map(_row, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = tuple(pool.map(_row, tasks, chunksize=math.ceil(steps / jobs)))
    conditions = ("winner_is_2", "value_inequality" if which == 2 else "utility_inequality")
    return SweepResult(which, rows, tuple(_crossover(which, rows, c) for c in conditions))


def default_jobs() -> int:
    return os.cpu_count() or 1
