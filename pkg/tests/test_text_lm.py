import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sponsored_qa import (
    Document,
    EmptyTextError,
    SmoothingConfig,
    UnigramModel,
    ValidationError,
    Vocabulary,
    VocabularyMismatchError,
    induce_lm,
    mean_document,
    mix_models,
    next_token_mixture,
    sample_document,
    tokenize,
)

AB = Vocabulary(("a", "b"))


def model(*probs, vocab=AB):
    return UnigramModel(vocab, np.array(probs))


@st.composite
def distributions(draw, size=None, full_support=False):
    n = size or draw(st.integers(2, 6))
    lo = 1e-3 if full_support else 0.0
    w = draw(st.lists(st.floats(lo, 1.0), min_size=n, max_size=n).filter(lambda xs: sum(xs) > 0))
    p = np.array(w) / sum(w)
    return p


# --- tokenize ---------------------------------------------------------------

def test_tokenize_counts():
    doc = tokenize("a a a b")
    assert doc.as_dict() == {"a": 3, "b": 1}
    assert doc.length == 4


def test_tokenize_lowercases():
    assert tokenize("A a").as_dict() == {"a": 2}


def test_tokenize_long_text():
    doc = tokenize(" ".join(["b"] * 99 + ["a"]))
    assert doc.count("a") == 1 and doc.count("b") == 99


def test_tokenize_extends_existing_vocab():
    doc = tokenize("c a", Vocabulary(("a", "b")))
    assert doc.vocab.tokens == ("a", "b", "c")
    assert doc.counts.tolist() == [1, 0, 1]


@pytest.mark.parametrize("text", ["", "   \n\t "])
def test_tokenize_empty(text):
    with pytest.raises(EmptyTextError):
        tokenize(text)


def test_vocabulary_rejects_duplicates():
    with pytest.raises(ValidationError):
        Vocabulary(("a", "a"))


# --- induce_lm --------------------------------------------------------------

def test_induce_mle():
    np.testing.assert_array_equal(induce_lm(tokenize("a a a b")).probs, [0.75, 0.25])


def test_induce_counterexample_organic():
    doc = Document.from_counts({"a": 99, "b": 1}, AB)
    np.testing.assert_allclose(induce_lm(doc).probs, [0.99, 0.01], rtol=0, atol=1e-15)


def test_induce_smoothed():
    doc = Document(AB, np.array([1.0, 0.0]))
    np.testing.assert_allclose(induce_lm(doc, SmoothingConfig(0.1)).probs, [0.95, 0.05], atol=1e-15)


def test_smoothing_range():
    with pytest.raises(ValidationError):
        SmoothingConfig(1.0)
    with pytest.raises(ValidationError):
        SmoothingConfig(-0.1)


def test_document_needs_mass():
    with pytest.raises(ValidationError):
        Document(AB, np.zeros(2))


# --- mix_models -------------------------------------------------------------

def test_mix_midpoint():
    np.testing.assert_array_equal(mix_models(model(1, 0), model(0, 1), 0.5).probs, [0.5, 0.5])


def test_mix_counterexample():
    e = 0.01
    mixed = mix_models(model(1 - e, e), model(e, 1 - e), e)
    np.testing.assert_allclose(mixed.probs, [2 * e * (1 - e), e**2 + (1 - e) ** 2], atol=1e-15)


def test_mix_vocab_mismatch():
    other = UnigramModel(Vocabulary(("a", "c")), np.array([0.5, 0.5]))
    with pytest.raises(VocabularyMismatchError):
        mix_models(model(0.5, 0.5), other, 0.3)


@pytest.mark.parametrize("lam", [-0.01, 1.01])
def test_mix_weight_range(lam):
    with pytest.raises(ValidationError):
        mix_models(model(1, 0), model(0, 1), lam)


@settings(max_examples=200)
@given(st.data())
def test_mixture_endpoints_and_normalization(data):
    o = data.draw(distributions(size=4))
    a = data.draw(distributions(size=4))
    vocab = Vocabulary(tuple("wxyz"))
    om, am = UnigramModel(vocab, o), UnigramModel(vocab, a)
    np.testing.assert_allclose(mix_models(om, am, 0.0).probs, a, rtol=0, atol=1e-15)
    np.testing.assert_allclose(mix_models(om, am, 1.0).probs, o, rtol=0, atol=1e-15)
    lam = data.draw(st.floats(0, 1))
    m = mix_models(om, am, lam)
    assert abs(m.probs.sum() - 1) <= 1e-12
    assert np.all((m.probs >= 0) & (m.probs <= 1))


@settings(max_examples=200)
@given(st.data())
def test_mixture_moves_toward_organic(data):
    vocab = Vocabulary(tuple("wxyz"))
    om = UnigramModel(vocab, data.draw(distributions(size=4)))
    am = UnigramModel(vocab, data.draw(distributions(size=4)))
    lo = data.draw(st.floats(0, 1))
    hi = data.draw(st.floats(lo, 1))
    d_lo = np.abs(mix_models(om, am, lo).probs - om.probs)
    d_hi = np.abs(mix_models(om, am, hi).probs - om.probs)
    assert np.all(d_hi <= d_lo + 1e-15)


# --- mean_document ----------------------------------------------------------

def test_mean_document_scaling():
    np.testing.assert_allclose(mean_document(model(0.75, 0.25), 100).counts, [75, 25])


def test_mean_document_unit_length():
    e = 0.01
    m = model(2 * e * (1 - e), e**2 + (1 - e) ** 2)
    np.testing.assert_array_equal(mean_document(m, 1).counts, m.probs)


@pytest.mark.parametrize("n", [0, -3])
def test_mean_document_needs_positive_length(n):
    with pytest.raises(ValidationError):
        mean_document(model(0.5, 0.5), n)


@settings(max_examples=200)
@given(p=distributions(), n=st.floats(1e-3, 1e6))
def test_mean_document_roundtrip(p, n):
    m = UnigramModel(Vocabulary(tuple(f"t{k}" for k in range(len(p)))), p)
    back = induce_lm(mean_document(m, n))
    np.testing.assert_allclose(back.probs, m.probs, rtol=0, atol=1e-12)


def test_mean_document_roundtrip_17():
    m = model(0.3, 0.7)
    np.testing.assert_allclose(induce_lm(mean_document(m, 17)).probs, m.probs, atol=1e-12)


# --- sampling ---------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 7, 1000])
def test_sample_degenerate(k):
    assert sample_document(model(1, 0), k, seed=123).counts.tolist() == [k, 0]


def test_sample_law_of_large_numbers():
    k = 100_000
    doc = sample_document(model(0.5, 0.5), k, seed=2024)
    assert doc.length == k
    # 0.01 is ~6 standard deviations of the empirical frequency at this k.
    assert abs(doc.count("a") / k - 0.5) <= 0.01


def test_sample_deterministic():
    m = model(0.2, 0.8)
    a = sample_document(m, 500, seed=99)
    b = sample_document(m, 500, seed=99)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert np.all(a.counts == np.round(a.counts))


def test_sample_rejects_zero_k():
    with pytest.raises(ValidationError):
        sample_document(model(0.5, 0.5), 0, seed=1)


# --- next-token mixture -----------------------------------------------------

def test_two_unigram_providers_reduce_to_mix_models():
    o, a = model(0.9, 0.1), model(0.2, 0.8)
    for lam in (0.0, 0.3, 0.77, 1.0):
        np.testing.assert_array_equal(
            next_token_mixture([o, a], [lam, 1 - lam], ["x"]).probs, mix_models(o, a, lam).probs
        )


def test_single_provider_identity():
    m = model(0.4, 0.6)
    np.testing.assert_array_equal(next_token_mixture([m], [1.0]).probs, m.probs)


def test_convex_combination():
    np.testing.assert_allclose(next_token_mixture([model(1, 0), model(0, 1)], [0.3, 0.7]).probs, [0.3, 0.7])


def test_prefix_dependent_provider():
    def echo(prefix):
        return model(1, 0) if prefix and prefix[-1] == "a" else model(0, 1)

    assert next_token_mixture([echo, model(0.5, 0.5)], [0.5, 0.5], ["a"]).as_dict() == {"a": 0.75, "b": 0.25}
    assert next_token_mixture([echo, model(0.5, 0.5)], [0.5, 0.5], ["b"]).as_dict() == {"a": 0.25, "b": 0.75}


@pytest.mark.parametrize("weights", [[0.5, 0.6], [1.2, -0.2]])
def test_mixture_weights_validated(weights):
    with pytest.raises(ValidationError):
        next_token_mixture([model(1, 0), model(0, 1)], weights)


def test_mixture_vocab_mismatch():
    other = UnigramModel(Vocabulary(("b", "a")), np.array([0.5, 0.5]))
    with pytest.raises(VocabularyMismatchError):
        next_token_mixture([model(1, 0), other], [0.5, 0.5])
