"""Cross entropy and the shifted symmetric similarity built on it.

All logarithms are natural; every comparison the auction makes is
invariant to the log base, so nats are used throughout.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InfiniteCrossEntropyError, ValidationError
from .text_lm import SmoothingConfig, UnigramModel, _check_same_vocab


def cross_entropy(px: UnigramModel, py: UnigramModel) -> float:
    """``-sum_t px(t) * ln py(t)`` with ``0 * ln 0 = 0``.

    Returns ``math.inf`` when ``px`` puts mass on a token where ``py`` has none.
    """
    _check_same_vocab(px.vocab, py.vocab)
    support = px.probs > 0
    q = py.probs[support]
    if np.any(q == 0):
        return math.inf
    return float(-np.dot(px.probs[support], np.log(q)))


def cross_entropy_matrix(models: Sequence[UnigramModel]) -> np.ndarray:
    """Pairwise ``CE(models[i] || models[j])`` in a single vectorized pass."""
    for m in models[1:]:
        _check_same_vocab(models[0].vocab, m.vocab)
    p = np.stack([m.probs for m in models])
    with np.errstate(divide="ignore", invalid="ignore"):
        logq = np.log(p)
        terms = p[:, None, :] * logq[None, :, :]
    # 0 * ln(0) and 0 * ln(q) contribute nothing.
    terms = np.where(p[:, None, :] > 0, terms, 0.0)
    return -terms.sum(axis=2)


def shift_constant(base_models: Sequence[UnigramModel], labels: Sequence[str] | None = None) -> float:
    """Largest symmetric cross-entropy sum over ordered pairs of base models.

    Self-pairs are included, which is what makes the similarity of any
    mixture of base models against any base model nonnegative.
    """
    if len(base_models) == 0:
        raise ValidationError("shift constant needs at least one base model")
    ce = cross_entropy_matrix(base_models)
    if not np.all(np.isfinite(ce)):
        i, j = (int(x) for x in np.argwhere(~np.isfinite(ce))[0])
        names = list(labels) if labels is not None else [f"base[{k}]" for k in range(len(base_models))]
        raise InfiniteCrossEntropyError(names[i], names[j])
    sym = ce + ce.T
    return float(sym.max())


@dataclass(frozen=True)
class SimilarityContext:
    """Per-scenario similarity settings: the shift constant ``A`` and smoothing."""

    shift_a: float
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)
    log_base: str = field(default="e", init=False)

    def __post_init__(self):
        if not (self.shift_a >= 0 and math.isfinite(self.shift_a)):
            raise ValidationError(f"shift constant must be finite and nonnegative, got {self.shift_a}")

    @classmethod
    def for_base(cls, base_models: Sequence[UnigramModel], smoothing: SmoothingConfig | None = None,
                 labels: Sequence[str] | None = None) -> SimilarityContext:
        return cls(shift_constant(base_models, labels), smoothing or SmoothingConfig())


def similarity_terms(x: UnigramModel, y: UnigramModel, x_name: str = "x", y_name: str = "y") -> tuple[float, float]:
    """Both cross-entropy directions ``(CE(x||y), CE(y||x))``; raises if either is infinite."""
    xy = cross_entropy(x, y)
    if math.isinf(xy):
        raise InfiniteCrossEntropyError(x_name, y_name)
    yx = cross_entropy(y, x)
    if math.isinf(yx):
        raise InfiniteCrossEntropyError(y_name, x_name)
    return xy, yx


def similarity(x: UnigramModel, y: UnigramModel, ctx: SimilarityContext) -> float:
    """``2A - CE(x||y) - CE(y||x)``."""
    xy, yx = similarity_terms(x, y)
    # Summing the CE terms first keeps the result exactly symmetric.
    return 2.0 * ctx.shift_a - (xy + yx)


def advertiser_value(sponsored: UnigramModel, ad: UnigramModel, ctx: SimilarityContext) -> float:
    """Value an advertiser derives from a sponsored answer: its similarity to the ad."""
    xy, yx = similarity_terms(sponsored, ad, "sponsored", "ad")
    return 2.0 * ctx.shift_a - (xy + yx)


def user_utility(sponsored: UnigramModel, organic: UnigramModel, ctx: SimilarityContext) -> float:
    """User utility of a sponsored answer: its similarity to the organic answer.

    The question influences this only through the organic answer.
    """
    xy, yx = similarity_terms(sponsored, organic, "sponsored", "organic")
    return 2.0 * ctx.shift_a - (xy + yx)
