"""Seeded random scenarios for property checks and differential tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..auction import Advertiser, AuctionSetup, BidProfile
from ..text_lm import Document, Vocabulary


@dataclass(frozen=True)
class RawScenario:
    """Plain-number description of a scenario, shared by the engine and the oracle."""

    tokens: tuple[str, ...]
    organic_counts: tuple[float, ...]
    ad_counts: tuple[tuple[float, ...], ...]
    lambdas: tuple[float, ...]
    ids: tuple[int, ...]
    mu: float = 0.0

    def to_setup(self) -> AuctionSetup:
        vocab = Vocabulary(self.tokens)
        advertisers = [
            Advertiser(i, Document(vocab, np.array(c)), lam)
            for i, c, lam in zip(self.ids, self.ad_counts, self.lambdas)
        ]
        return AuctionSetup.build(Document(vocab, np.array(self.organic_counts)), advertisers, self.mu)


def _full_support_counts(rng: np.random.Generator, size: int) -> tuple[float, ...]:
    # Dirichlet-multinomial draw, shifted by one so every token appears.
    k = int(rng.integers(5, 60))
    probs = rng.dirichlet(np.ones(size))
    return tuple(float(c) for c in 1 + rng.multinomial(k, probs))


def random_scenario(rng: np.random.Generator, mu: float = 0.0) -> RawScenario:
    """Vocabulary of 2-6 tokens, 2-4 advertisers, uniform lambdas, all-positive counts."""
    size = int(rng.integers(2, 7))
    n = int(rng.integers(2, 5))
    tokens = tuple(f"t{k}" for k in range(size))
    return RawScenario(
        tokens=tokens,
        organic_counts=_full_support_counts(rng, size),
        ad_counts=tuple(_full_support_counts(rng, size) for _ in range(n)),
        lambdas=tuple(float(x) for x in rng.uniform(0.0, 1.0, n)),
        ids=tuple(range(1, n + 1)),
        mu=mu,
    )


def random_bids(rng: np.random.Generator, setup: AuctionSetup) -> BidProfile:
    """Independent bids, each uniform on ``[0, 2 * value]``."""
    return BidProfile.from_sequence(setup, list(rng.uniform(0.0, 2.0 * setup.values)))


def scenario_stream(seed: int, count: int) -> list[np.random.Generator]:
    """One independent generator per scenario, so batches can be split across workers."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]
