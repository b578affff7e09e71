"""Token counting, unigram language models and their linear mixtures."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTextError, ValidationError, VocabularyMismatchError

# Construction-time slack for probability normalization; the tighter 1e-12
# guarantee is asserted by the test suite on realistic model sizes.
_NORMALIZATION_TOL = 1e-9


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of distinct tokens; token ids are positions."""

    tokens: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        if not tokens:
            raise ValidationError("vocabulary must contain at least one token")
        index = {tok: i for i, tok in enumerate(tokens)}
        if len(index) != len(tokens):
            raise ValidationError("vocabulary tokens must be unique")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def extend(self, tokens: Iterable[str]) -> Vocabulary:
        """Return a vocabulary with unseen ``tokens`` appended in first-seen order."""
        new = list(self.tokens)
        seen = set(new)
        for tok in tokens:
            if tok not in seen:
                seen.add(tok)
                new.append(tok)
        if len(new) == len(self.tokens):
            return self
        return Vocabulary(tuple(new))

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> Vocabulary:
        return cls(tuple(dict.fromkeys(tokens)))


def _check_same_vocab(a: Vocabulary, b: Vocabulary) -> None:
    if a is not b and a.tokens != b.tokens:
        raise VocabularyMismatchError(
            f"vocabularies differ: {len(a)} tokens vs {len(b)} tokens"
        )


@dataclass(frozen=True, eq=False)
class Document:
    """Bag of (possibly fractional) token counts over a vocabulary."""

    vocab: Vocabulary
    counts: np.ndarray

    def __post_init__(self):
        counts = _frozen(self.counts)
        if counts.shape != (len(self.vocab),):
            raise ValidationError(
                f"expected {len(self.vocab)} counts, got shape {counts.shape}"
            )
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValidationError("token counts must be finite and nonnegative")
        if not np.any(counts > 0):
            raise ValidationError("document must contain at least one token")
        object.__setattr__(self, "counts", counts)

    @property
    def length(self) -> float:
        return float(self.counts.sum())

    def count(self, token: str) -> float:
        return float(self.counts[self.vocab.index[token]])

    def as_dict(self) -> dict[str, float]:
        """Nonzero counts keyed by token, in vocabulary order."""
        return {t: float(c) for t, c in zip(self.vocab.tokens, self.counts) if c > 0}

    def with_vocab(self, vocab: Vocabulary) -> Document:
        """Re-express this document over a superset vocabulary."""
        if vocab is self.vocab:
            return self
        return Document.from_counts(self.as_dict(), vocab)

    @classmethod
    def from_counts(cls, counts: Mapping[str, float], vocab: Vocabulary) -> Document:
        arr = np.zeros(len(vocab))
        for tok, c in counts.items():
            if tok not in vocab:
                raise ValidationError(f"token {tok!r} is not in the vocabulary")
            arr[vocab.index[tok]] += c
        return cls(vocab, arr)


@dataclass(frozen=True)
class SmoothingConfig:
    """Jelinek-Mercer interpolation weight ``mu`` against a uniform background."""

    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.mu < 1.0:
            raise ValidationError(f"smoothing mu must lie in [0, 1), got {self.mu}")


@dataclass(frozen=True, eq=False)
class UnigramModel:
    """Probability distribution over a vocabulary."""

    vocab: Vocabulary
    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.shape != (len(self.vocab),):
            raise ValidationError(
                f"expected {len(self.vocab)} probabilities, got shape {probs.shape}"
            )
        if np.any(probs < 0) or np.any(probs > 1) or not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > _NORMALIZATION_TOL:
            raise ValidationError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "probs", probs)

    def __call__(self, prefix: Sequence[str] = ()) -> UnigramModel:
        # A unigram model is a next-token provider that ignores the prefix.
        return self

    def prob(self, token: str) -> float:
        return float(self.probs[self.vocab.index[token]])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.vocab.tokens, map(float, self.probs)))

    @classmethod
    def from_probs(cls, probs: Mapping[str, float], vocab: Vocabulary) -> UnigramModel:
        arr = np.zeros(len(vocab))
        for tok, p in probs.items():
            arr[vocab.index[tok]] = p
        return cls(vocab, arr)


def tokenize(text: str, vocab: Vocabulary | None = None) -> Document:
    """Lowercase, split on whitespace and count tokens.

    With ``vocab=None`` a fresh vocabulary is built from the text in
    first-appearance order. Otherwise ``vocab`` is extended with any unseen
    tokens, and the returned document refers to the extended vocabulary.
    """
    tokens = text.lower().split()
    if not tokens:
        raise EmptyTextError("text contains no tokens")
    vocab = Vocabulary.from_tokens(tokens) if vocab is None else vocab.extend(tokens)
    counts = np.zeros(len(vocab))
    for tok in tokens:
        counts[vocab.index[tok]] += 1
    return Document(vocab, counts)


def induce_lm(doc: Document, smoothing: SmoothingConfig | float = 0.0) -> UnigramModel:
    """Maximum likelihood unigram model, optionally interpolated with uniform.

    ``p(t) = (1 - mu) * tf(t) / |doc| + mu / |V|``
    """
    mu = smoothing.mu if isinstance(smoothing, SmoothingConfig) else SmoothingConfig(smoothing).mu
    length = doc.length
    if not length > 0:
        raise ValidationError("cannot induce a language model from an empty document")
    probs = doc.counts / length
    if mu:
        probs = (1.0 - mu) * probs + mu / len(doc.vocab)
    return UnigramModel(doc.vocab, probs)


def check_fusion_weight(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"fusion weight lambda must lie in [0, 1], got {lam}")
    return lam


def mix_models(organic: UnigramModel, ad: UnigramModel, lam: float) -> UnigramModel:
    """Linear mixture ``lam * organic + (1 - lam) * ad``.

    ``lam`` is the emphasis placed on the organic answer.
    """
    lam = check_fusion_weight(lam)
    _check_same_vocab(organic.vocab, ad.vocab)
    return UnigramModel(organic.vocab, lam * organic.probs + (1.0 - lam) * ad.probs)


def mean_document(model: UnigramModel, n: float) -> Document:
    """Expected token counts of a length-``n`` sample from ``model``."""
    if not n > 0:
        raise ValidationError(f"mean document length must be positive, got {n}")
    return Document(model.vocab, n * model.probs)


def sample_document(model: UnigramModel, k: int, seed: int) -> Document:
    """Draw ``k`` i.i.d. tokens from ``model``.

    Uses the counter-based Philox generator so that independent seeds can be
    handed to parallel workers without stream overlap.
    """
    if k < 1:
        raise ValidationError(f"sample size must be at least 1, got {k}")
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(k, model.probs / model.probs.sum())
    return Document(model.vocab, counts.astype(np.float64))


NextTokenProvider = Callable[[Sequence[str]], UnigramModel]


def next_token_mixture(
    sources: Sequence[NextTokenProvider],
    weights: Sequence[float],
    prefix: Sequence[str] = (),
) -> UnigramModel:
    """Convex combination of several next-token distributions at ``prefix``.

    Each source maps a token prefix to a :class:`UnigramModel`; a plain
    ``UnigramModel`` qualifies and ignores the prefix.
    """
    if len(sources) == 0 or len(sources) != len(weights):
        raise ValidationError("need one weight per source and at least one source")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValidationError("mixture weights must be nonnegative and sum to 1")
    dists = [src(prefix) for src in sources]
    vocab = dists[0].vocab
    for d in dists[1:]:
        _check_same_vocab(vocab, d.vocab)
    if len(dists) == 2:
        # Same arithmetic as mix_models so the two-source case matches it bitwise.
        probs = w[0] * dists[0].probs + w[1] * dists[1].probs
    else:
        probs = sum(wi * d.probs for wi, d in zip(w, dists))
    return UnigramModel(vocab, probs)
