import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sponsored_qa import (
    Advertiser,
    AuctionSetup,
    BidProfile,
    Document,
    ValidationError,
    Vocabulary,
    advertiser_utility,
    induce_lm,
    mix_models,
    platform_value,
    run_auction,
    select_winner,
    social_welfare,
    winner_payment,
)
from sponsored_qa.auction import rank_batch
from sponsored_qa.game_analysis import random_bids, random_scenario
from sponsored_qa.similarity import advertiser_value

from conftest import PROP2, PROP3, SHIFT_A


def truthful(setup):
    return BidProfile.truthful(setup)


# --- setup ------------------------------------------------------------------

def test_setup_derived_fields(prop2):
    for k, adv in enumerate(prop2.advertisers):
        expected = mix_models(induce_lm(prop2.organic), induce_lm(adv.ad), adv.lam)
        np.testing.assert_allclose(prop2.sponsored_models[k].probs, expected.probs, rtol=0, atol=1e-15)
        assert prop2.values[k] == pytest.approx(
            advertiser_value(expected, induce_lm(adv.ad), prop2.ctx), abs=1e-12
        )
    assert prop2.shift_a == pytest.approx(SHIFT_A, abs=1e-12)


def test_setup_needs_two_advertisers():
    vocab = Vocabulary(("a", "b"))
    doc = Document(vocab, np.array([1.0, 1.0]))
    with pytest.raises(ValidationError):
        AuctionSetup.build(doc, [Advertiser(1, doc, 0.5)])


def test_setup_rejects_duplicate_ids():
    vocab = Vocabulary(("a", "b"))
    doc = Document(vocab, np.array([1.0, 1.0]))
    with pytest.raises(ValidationError):
        AuctionSetup.build(doc, [Advertiser(3, doc, 0.5), Advertiser(3, doc, 0.2)])


def test_setup_sorts_by_id():
    vocab = Vocabulary(("a", "b"))
    doc = Document(vocab, np.array([1.0, 1.0]))
    setup = AuctionSetup.build(doc, [Advertiser(9, doc, 0.5), Advertiser(4, doc, 0.2)])
    assert setup.ids == (4, 9)


def test_lambda_out_of_range_names_advertiser():
    vocab = Vocabulary(("a", "b"))
    doc = Document(vocab, np.array([1.0, 1.0]))
    with pytest.raises(ValidationError, match="advertiser 7"):
        Advertiser(7, doc, 1.3)


def test_bids_must_be_nonnegative(prop2):
    with pytest.raises(ValidationError):
        BidProfile({1: -1.0, 2: 0.0})


# --- platform value and winner ----------------------------------------------

def test_platform_value():
    assert platform_value(0, 5) == 5


def test_prop2_platform_values(prop2):
    out = run_auction(prop2, truthful(prop2))
    assert out.platform_value[1] == pytest.approx(4 * SHIFT_A - (PROP2["v1"] + PROP2["u1"]), abs=1e-11)
    assert out.platform_value[2] == pytest.approx(4 * SHIFT_A - (PROP2["v2"] + PROP2["u2"]), abs=1e-11)
    assert out.platform_value[2] - out.platform_value[1] == pytest.approx(PROP2["pv_gap"], abs=1e-12)


def test_prop3_platform_gap(prop3):
    out = run_auction(prop3, truthful(prop3))
    assert out.platform_value[2] - out.platform_value[1] == pytest.approx(PROP3["pv_gap"], abs=1e-12)


def test_identical_advertisers_tie_break(twins):
    assert select_winner(twins, truthful(twins)) == (1, 2)
    out = run_auction(twins, BidProfile({1: 3.0, 2: 3.0}))
    assert (out.winner, out.second) == (1, 2)
    assert out.payment == pytest.approx(3.0, abs=1e-12)
    assert out.utility[1] == pytest.approx(twins.value(1) - 3.0, abs=1e-12)
    assert out.utility[2] == 0.0


def test_tie_within_tolerance_goes_to_lowest_id():
    utils = np.array([1.0, 1.0, 1.0])
    w, s, _ = rank_batch(utils, np.array([2.0, 2.0 + 5e-13, 1.0]))
    assert (w[0], s[0]) == (0, 1)


def test_prop2_winner_is_lower_value_advertiser(prop2):
    assert prop2.value(1) > prop2.value(2)
    assert select_winner(prop2, truthful(prop2)) == (2, 1)


def test_prop3_winner_has_lower_user_utility(prop3):
    assert prop3.user_utility(1) > prop3.user_utility(2)
    assert select_winner(prop3, truthful(prop3))[0] == 2


# --- payment ----------------------------------------------------------------

def test_payment_equals_runner_up_bid_when_utilities_equal(twins):
    bids = BidProfile({1: 7.0, 2: 2.5})
    assert winner_payment(twins, bids, 1, 2) == pytest.approx(2.5, abs=1e-12)


def test_prop2_payment(prop2):
    bids = truthful(prop2)
    p = winner_payment(prop2, bids, 2, 1)
    assert p == pytest.approx(PROP2["payment"], abs=1e-11)
    assert 2 * prop2.shift_a - p == pytest.approx(8.4218489484298176, abs=1e-11)


def test_payment_ignores_winner_bid(prop2):
    bids = truthful(prop2)
    base = run_auction(prop2, bids)
    raised = run_auction(prop2, bids.replace(2, bids[2] + 10.0))
    assert raised.winner == 2
    assert raised.payment == base.payment


def test_payment_invalid_ids(prop2):
    bids = truthful(prop2)
    with pytest.raises(ValidationError):
        winner_payment(prop2, bids, 1, 1)
    with pytest.raises(ValidationError):
        winner_payment(prop2, bids, 1, 5)


def test_negative_payment_reported_not_clamped(prop2):
    # Advertiser 2's answer is far better for the user, so a runner-up bid of
    # zero leaves it owing less than nothing.
    bids = BidProfile({1: 0.0, 2: 0.0})
    out = run_auction(prop2, bids)
    assert out.winner == 2
    assert out.payment < 0 and out.negative_payment_flag
    assert out.payment == pytest.approx(prop2.user_utility(1) - prop2.user_utility(2), abs=1e-12)
    clamped = run_auction(prop2, bids, clamp_payment_at_zero=True)
    assert clamped.payment == 0.0 and clamped.payment_clamped and clamped.negative_payment_flag


# --- utilities and welfare --------------------------------------------------

def test_loser_utility_zero(prop2):
    assert advertiser_utility(prop2, truthful(prop2), 1) == 0.0


def test_prop2_winner_utility(prop2):
    u = advertiser_utility(prop2, truthful(prop2), 2)
    assert u == pytest.approx(PROP2["pv_gap"], abs=1e-11)
    assert social_welfare(prop2, 2) - social_welfare(prop2, 1) == pytest.approx(PROP2["pv_gap"], abs=1e-11)


def test_social_welfare_equals_pv_when_truthful(prop3):
    out = run_auction(prop3, truthful(prop3))
    for i in prop3.ids:
        assert social_welfare(prop3, i) == pytest.approx(out.platform_value[i], abs=1e-12)


def test_social_welfare_ignores_bids(prop2):
    before = social_welfare(prop2, 1)
    run_auction(prop2, BidProfile({1: 100.0, 2: 0.0}))
    assert social_welfare(prop2, 1) == before


def test_bid_profile_must_cover_setup(prop2):
    with pytest.raises(ValidationError):
        run_auction(prop2, BidProfile({1: 1.0}))


# --- properties over random scenarios ---------------------------------------

@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), mu=st.sampled_from([0.0, 0.05, 0.3]))
def test_auction_invariants(seed, mu):
    rng = np.random.default_rng(seed)
    setup = random_scenario(rng, mu).to_setup()
    bids = random_bids(rng, setup)
    out = run_auction(setup, bids)
    assert all(out.platform_value[out.winner] >= pv for pv in out.platform_value.values())
    assert out.payment <= bids[out.winner] + 1e-9
    lhs = platform_value(out.user_utility[out.winner], out.payment)
    rhs = platform_value(out.user_utility[out.second], bids[out.second])
    assert abs(lhs - rhs) <= 1e-9
    assert all(out.utility[j] == 0.0 for j in setup.ids if j != out.winner)
    assert out.utility[out.winner] == pytest.approx(out.value[out.winner] - out.payment, abs=0)
    assert run_auction(setup, bids) == out


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_truthful_invariants(seed):
    setup = random_scenario(np.random.default_rng(seed)).to_setup()
    out = run_auction(setup, truthful(setup))
    u = out.utility[out.winner]
    assert u >= -1e-9
    assert abs(u - (out.social_welfare_winner - out.social_welfare_second)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-50, 50))
def test_common_shift_of_user_utility_keeps_winner(seed, shift):
    rng = np.random.default_rng(seed)
    setup = random_scenario(rng).to_setup()
    bids = random_bids(rng, setup).as_array(setup)
    w0, s0, p0 = rank_batch(setup.user_utilities, bids)
    w1, s1, p1 = rank_batch(setup.user_utilities + shift, bids)
    assert w0[0] == w1[0] and s0[0] == s1[0]
    assert p0[0] == pytest.approx(p1[0], abs=1e-9)


def test_rank_batch_matches_scalar_path():
    rng = np.random.default_rng(5)
    setup = random_scenario(rng).to_setup()
    rows = rng.uniform(0, 2 * setup.values, size=(200, setup.n))
    w, s, p = rank_batch(setup.user_utilities, rows)
    for k, row in enumerate(rows):
        out = run_auction(setup, BidProfile.from_sequence(setup, list(row)))
        assert setup.ids[w[k]] == out.winner and setup.ids[s[k]] == out.second
        assert p[k] == out.payment
