"""Finite-search checks of truthfulness, Nash stability and the VCG surplus identity.

The claims being checked quantify over continuous bid spaces; here they are
probed on grids and random opponent profiles. A pass supports the claim, a
failure refutes it (and, given the theory, points to a bug).
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from ..auction import AuctionSetup, BidProfile, rank_batch, run_auction
from ..errors import ValidationError

VIOLATION_TOL = 1e-9


def profile_social_welfare(utilities: Sequence[float]) -> float:
    """Game-theoretic social welfare: the plain sum of player utilities."""
    if len(utilities) == 0:
        raise ValidationError("social welfare of an empty profile is undefined")
    return float(sum(utilities))


def value_grid(value: float, points: int) -> np.ndarray:
    """``points`` evenly spaced bids on ``[0, 2 * value]`` that include ``value`` exactly."""
    if points < 1:
        raise ValidationError(f"grid needs at least one point, got {points}")
    if points == 1:
        return np.array([value])
    grid = np.linspace(0.0, 2.0 * value, points)
    k = int(np.argmin(np.abs(grid - value)))
    if points % 2:
        grid[k] = value
    else:
        grid = np.insert(grid, int(np.searchsorted(grid, value)), value)
    return np.unique(grid)


@dataclass(frozen=True)
class BidGrid:
    """Candidate deviation bids per advertiser id."""

    grids: Mapping[int, np.ndarray]

    def __getitem__(self, advertiser_id: int) -> np.ndarray:
        return self.grids[advertiser_id]

    @classmethod
    def around_values(cls, setup: AuctionSetup, points: int = 101) -> BidGrid:
        return cls(MappingProxyType({i: value_grid(float(v), points) for i, v in zip(setup.ids, setup.values)}))


@dataclass(frozen=True)
class DominanceReport:
    advertiser: int
    profiles_tested: int
    deviations_tested: int
    max_violation: float
    worst_bid: float | None = None

    @property
    def passed(self) -> bool:
        return self.max_violation <= VIOLATION_TOL


def random_opponent_profiles(
    rng: np.random.Generator, setup: AuctionSetup, advertiser_id: int, count: int
) -> list[dict[int, float]]:
    """Opponent bids drawn uniformly on ``[0, 2 * value]``, excluding ``advertiser_id``."""
    others = [(i, float(v)) for i, v in zip(setup.ids, setup.values) if i != advertiser_id]
    draws = rng.uniform(0.0, 1.0, size=(count, len(others)))
    return [{i: 2.0 * v * u for (i, v), u in zip(others, row)} for row in draws]


def _utilities_of(setup: AuctionSetup, pos: int, bid_rows: np.ndarray) -> np.ndarray:
    winner, _, payment = rank_batch(setup.user_utilities, bid_rows)
    return np.where(winner == pos, setup.values[pos] - payment, 0.0)


def check_truthful_dominance(
    setup: AuctionSetup,
    advertiser_id: int,
    grid: BidGrid | np.ndarray,
    opponent_profiles: Sequence[Mapping[int, float]],
) -> DominanceReport:
    """Worst gain of any grid deviation over bidding the true value.

    For each opponent profile, the advertiser's utility at every grid bid is
    compared against its utility when bidding its value.
    """
    pos = setup.position(advertiser_id)
    value = float(setup.values[pos])
    bids = np.asarray(grid[advertiser_id] if isinstance(grid, BidGrid) else grid, dtype=np.float64)
    if bids.size == 0 or np.any(bids < 0):
        raise ValidationError("deviation grid must be nonempty and nonnegative")
    if not np.any(bids == value):
        raise ValidationError("deviation grid must contain the advertiser's value exactly")

    worst, worst_bid = -np.inf, None
    for opp in opponent_profiles:
        if advertiser_id in opp:
            raise ValidationError("opponent profiles must not include the tested advertiser")
        base = np.array([opp[i] if i != advertiser_id else value for i in setup.ids])
        rows = np.repeat(base[None, :], bids.size + 1, axis=0)
        rows[1:, pos] = bids
        u = _utilities_of(setup, pos, rows)
        gain = u[1:] - u[0]
        k = int(np.argmax(gain))
        if gain[k] > worst:
            worst, worst_bid = float(gain[k]), float(bids[k])
    return DominanceReport(
        advertiser=advertiser_id,
        profiles_tested=len(opponent_profiles),
        deviations_tested=len(opponent_profiles) * bids.size,
        max_violation=float(worst) if opponent_profiles else 0.0,
        worst_bid=worst_bid,
    )


@dataclass(frozen=True)
class NashReport:
    is_nash: bool
    worst_gain: float
    worst_player: int | None
    worst_bid: float | None


def check_nash(setup: AuctionSetup, profile: BidProfile, grid: BidGrid) -> NashReport:
    """Is any single-player grid deviation profitable by more than 1e-9?"""
    base = profile.as_array(setup)
    worst, who, at = -np.inf, None, None
    for pos, i in enumerate(setup.ids):
        bids = np.asarray(grid[i], dtype=np.float64)
        rows = np.repeat(base[None, :], bids.size + 1, axis=0)
        rows[1:, pos] = bids
        u = _utilities_of(setup, pos, rows)
        gain = u[1:] - u[0]
        k = int(np.argmax(gain))
        if gain[k] > worst:
            worst, who, at = float(gain[k]), i, float(bids[k])
    return NashReport(worst <= VIOLATION_TOL, worst, who, at)


def vcg_surplus_identity(setup: AuctionSetup) -> float:
    """Truthful winner utility minus the social-welfare gap to the runner-up.

    Zero up to rounding whenever everyone bids their value.
    """
    out = run_auction(setup, BidProfile.truthful(setup))
    return out.utility[out.winner] - (out.social_welfare_winner - out.social_welfare_second)
