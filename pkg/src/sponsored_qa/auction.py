"""Single-slot sponsored answer auction.

Each advertiser's ad is fused with the organic answer; the platform shows
the sponsored answer maximizing user utility plus bid and charges the
winner the least bid that would still have matched the runner-up.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import ValidationError
from .similarity import SimilarityContext, advertiser_value, shift_constant, user_utility
from .text_lm import (
    Document,
    SmoothingConfig,
    UnigramModel,
    _check_same_vocab,
    check_fusion_weight,
    induce_lm,
    mix_models,
)

# Platform values closer than this are ties, resolved toward the lowest id.
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Advertiser:
    id: int
    ad: Document
    lam: float

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)):
            raise ValidationError(f"advertiser id must be an integer, got {self.id!r}")
        object.__setattr__(self, "id", int(self.id))
        try:
            object.__setattr__(self, "lam", check_fusion_weight(self.lam))
        except ValidationError as exc:
            raise ValidationError(str(exc), field=f"advertiser {self.id}.lambda") from None


@dataclass(frozen=True, eq=False)
class AuctionSetup:
    """A question, its organic answer, the advertisers and everything derived from them.

    Advertisers are stored sorted by id, so position order is id order.
    Use :meth:`build` rather than the constructor.
    """

    question: Document | None
    organic: Document
    advertisers: tuple[Advertiser, ...]
    smoothing: SmoothingConfig
    organic_model: UnigramModel
    ad_models: tuple[UnigramModel, ...]
    sponsored_models: tuple[UnigramModel, ...]
    ctx: SimilarityContext
    values: np.ndarray
    user_utilities: np.ndarray

    @classmethod
    def build(
        cls,
        organic: Document,
        advertisers: Iterable[Advertiser],
        smoothing: SmoothingConfig | float = 0.0,
        question: Document | None = None,
    ) -> AuctionSetup:
        if not isinstance(smoothing, SmoothingConfig):
            smoothing = SmoothingConfig(smoothing)
        advertisers = tuple(sorted(advertisers, key=lambda a: a.id))
        if len(advertisers) < 2:
            raise ValidationError("an auction needs at least two advertisers", field="advertisers")
        ids = [a.id for a in advertisers]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"advertiser ids must be unique, got {ids}", field="advertisers")
        for a in advertisers:
            _check_same_vocab(organic.vocab, a.ad.vocab)

        organic_model = induce_lm(organic, smoothing)
        ad_models = tuple(induce_lm(a.ad, smoothing) for a in advertisers)
        labels = ["organic"] + [f"ad[{a.id}]" for a in advertisers]
        ctx = SimilarityContext(shift_constant((organic_model, *ad_models), labels), smoothing)
        sponsored = tuple(mix_models(organic_model, m, a.lam) for a, m in zip(advertisers, ad_models))
        values = np.array([advertiser_value(s, m, ctx) for s, m in zip(sponsored, ad_models)])
        utils = np.array([user_utility(s, organic_model, ctx) for s in sponsored])
        values.setflags(write=False)
        utils.setflags(write=False)
        return cls(question, organic, advertisers, smoothing, organic_model, ad_models,
                   sponsored, ctx, values, utils)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(a.id for a in self.advertisers)

    @property
    def n(self) -> int:
        return len(self.advertisers)

    @property
    def shift_a(self) -> float:
        return self.ctx.shift_a

    def position(self, advertiser_id: int) -> int:
        for k, a in enumerate(self.advertisers):
            if a.id == advertiser_id:
                return k
        raise ValidationError(f"unknown advertiser id {advertiser_id}; known ids are {list(self.ids)}")

    def value(self, advertiser_id: int) -> float:
        return float(self.values[self.position(advertiser_id)])

    def user_utility(self, advertiser_id: int) -> float:
        return float(self.user_utilities[self.position(advertiser_id)])


@dataclass(frozen=True)
class BidProfile:
    """One nonnegative bid per advertiser id."""

    bids: Mapping[int, float]

    def __post_init__(self):
        clean = {}
        for k, b in self.bids.items():
            b = float(b)
            if not (b >= 0 and math.isfinite(b)):
                raise ValidationError(f"bid must be finite and nonnegative, got {b}", field=f"bid[{k}]")
            clean[int(k)] = b
        object.__setattr__(self, "bids", MappingProxyType(clean))

    def __getitem__(self, advertiser_id: int) -> float:
        return self.bids[advertiser_id]

    def as_array(self, setup: AuctionSetup) -> np.ndarray:
        if set(self.bids) != set(setup.ids):
            raise ValidationError(
                f"bid profile covers ids {sorted(self.bids)} but setup has {list(setup.ids)}"
            )
        return np.array([self.bids[i] for i in setup.ids])

    def replace(self, advertiser_id: int, bid: float) -> BidProfile:
        return BidProfile({**self.bids, advertiser_id: bid})

    @classmethod
    def truthful(cls, setup: AuctionSetup) -> BidProfile:
        return cls(dict(zip(setup.ids, map(float, setup.values))))

    @classmethod
    def from_sequence(cls, setup: AuctionSetup, bids: Sequence[float]) -> BidProfile:
        if len(bids) != setup.n:
            raise ValidationError(f"expected {setup.n} bids, got {len(bids)}")
        return cls(dict(zip(setup.ids, bids)))


@dataclass(frozen=True)
class AuctionOutcome:
    winner: int
    second: int
    payment: float
    platform_value: Mapping[int, float]
    user_utility: Mapping[int, float]
    value: Mapping[int, float]
    utility: Mapping[int, float]
    bids: Mapping[int, float]
    social_welfare_winner: float
    social_welfare_second: float
    negative_payment_flag: bool
    payment_clamped: bool = False


def platform_value(user_util: float, bid: float) -> float:
    return user_util + bid


def rank_batch(user_utils: np.ndarray, bids: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Winner, runner-up and payment for many bid vectors at once.

    Args:
        user_utils: shape ``(n,)``, user utility of each sponsored answer.
        bids: shape ``(batch, n)`` or ``(n,)``.

    Returns:
        ``(winner_pos, second_pos, payment)`` arrays of length ``batch``.
        Positions index the advertiser order of ``user_utils``; ties within
        ``TIE_TOL`` go to the lowest position at both ranks.
    """
    bids = np.atleast_2d(np.asarray(bids, dtype=np.float64))
    pv = user_utils[None, :] + bids
    rows = np.arange(pv.shape[0])
    top = pv.max(axis=1, keepdims=True)
    winner = np.argmax(pv >= top - TIE_TOL, axis=1)
    rest = pv.copy()
    rest[rows, winner] = -np.inf
    top2 = rest.max(axis=1, keepdims=True)
    second = np.argmax(rest >= top2 - TIE_TOL, axis=1)
    payment = bids[rows, second] + user_utils[second] - user_utils[winner]
    return winner, second, payment


def select_winner(setup: AuctionSetup, bids: BidProfile) -> tuple[int, int]:
    """Ids of the platform-value maximizer and of the runner-up."""
    if setup.n < 2:
        raise ValidationError("an auction needs at least two advertisers")
    w, s, _ = rank_batch(setup.user_utilities, bids.as_array(setup))
    return setup.ids[int(w[0])], setup.ids[int(s[0])]


def winner_payment(setup: AuctionSetup, bids: BidProfile, winner: int, second: int) -> float:
    """Runner-up bid plus the runner-up's user utility minus the winner's.

    No term depends on the winner's own bid. The result can be negative when
    the winner's sponsored answer is far better for the user.
    """
    if winner == second:
        raise ValidationError("winner and runner-up must differ")
    wp, sp = setup.position(winner), setup.position(second)
    return bids[second] + float(setup.user_utilities[sp]) - float(setup.user_utilities[wp])


def social_welfare(setup: AuctionSetup, advertiser_id: int) -> float:
    """User utility plus advertiser value of showing this advertiser's answer."""
    k = setup.position(advertiser_id)
    return float(setup.user_utilities[k] + setup.values[k])


def run_auction(setup: AuctionSetup, bids: BidProfile, clamp_payment_at_zero: bool = False) -> AuctionOutcome:
    """Allocate, price and compute every advertiser's utility.

    ``clamp_payment_at_zero`` is for experimentation only; the verification
    suites always run with it off.
    """
    winner, second = select_winner(setup, bids)
    payment = winner_payment(setup, bids, winner, second)
    negative = payment < 0
    clamped = clamp_payment_at_zero and negative
    if clamped:
        payment = 0.0
    ids = setup.ids
    utils = setup.user_utilities
    pv = {i: platform_value(float(u), bids[i]) for i, u in zip(ids, utils)}
    values = {i: float(v) for i, v in zip(ids, setup.values)}
    utility = {i: 0.0 for i in ids}
    utility[winner] = values[winner] - payment
    return AuctionOutcome(
        winner=winner,
        second=second,
        payment=payment,
        platform_value=MappingProxyType(pv),
        user_utility=MappingProxyType({i: float(u) for i, u in zip(ids, utils)}),
        value=MappingProxyType(values),
        utility=MappingProxyType(utility),
        bids=bids.bids,
        social_welfare_winner=social_welfare(setup, winner),
        social_welfare_second=social_welfare(setup, second),
        negative_payment_flag=negative,
        payment_clamped=clamped,
    )


def advertiser_utility(setup: AuctionSetup, bids: BidProfile, advertiser_id: int) -> float:
    """Quasi-linear utility: value minus payment for the winner, zero otherwise."""
    setup.position(advertiser_id)
    return run_auction(setup, bids).utility[advertiser_id]
