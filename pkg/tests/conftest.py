import numpy as np
import pytest

from sponsored_qa import Advertiser, AuctionSetup, Document, Vocabulary
from sponsored_qa.game_analysis import build_prop2_scenario, build_prop3_scenario

# Frozen from an independent 40-digit mpmath evaluation at eps = 0.01
# (natural log). Keys are the CE sums subtracted from 2A.
EPS = 0.01
SHIFT_A = 9.1184379749734909
PROP2 = {
    "v1": 0.16005310234060582,
    "v2": 2.8038502736355589,
    "u1": 8.3972394072893244,
    "u2": 0.13544356120011263,
    "value_gap": 2.6437971712949531,
    "pv_gap": 5.6179986747942587,
    "payment": 9.8150270015171643,
}
PROP3 = {
    "v1": 8.3972394072893244,
    "v2": 1.5235785777730895,
    "u1": 0.16005310234060582,
    "u2": 1.4868981649726107,
    "utility_gap": 1.3268450626320049,
    "pv_gap": 5.54681576688423,
    "payment": 11.166481605289662,
}


@pytest.fixture
def prop2():
    return build_prop2_scenario(EPS).setup


@pytest.fixture
def prop3():
    return build_prop3_scenario(EPS).setup


@pytest.fixture
def twins():
    """Two advertisers with the same ad and the same lambda."""
    vocab = Vocabulary(("x", "y", "z"))
    organic = Document(vocab, np.array([3.0, 1.0, 1.0]))
    ad = Document(vocab, np.array([1.0, 1.0, 4.0]))
    return AuctionSetup.build(organic, [Advertiser(1, ad, 0.4), Advertiser(2, ad, 0.4)])


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
