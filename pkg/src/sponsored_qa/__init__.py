"""Simulation engine for single-slot auctions over fused sponsored answers."""

from .auction import (
    Advertiser,
    AuctionOutcome,
    AuctionSetup,
    BidProfile,
    advertiser_utility,
    platform_value,
    run_auction,
    select_winner,
    social_welfare,
    winner_payment,
)
from .errors import (
    DomainError,
    EmptyTextError,
    InfiniteCrossEntropyError,
    SponsoredQAError,
    ValidationError,
    VocabularyMismatchError,
)
from .similarity import (
    SimilarityContext,
    advertiser_value,
    cross_entropy,
    shift_constant,
    similarity,
    user_utility,
)
from .text_lm import (
    Document,
    SmoothingConfig,
    UnigramModel,
    Vocabulary,
    induce_lm,
    mean_document,
    mix_models,
    next_token_mixture,
    sample_document,
    tokenize,
)

__version__ = "0.1.0"
