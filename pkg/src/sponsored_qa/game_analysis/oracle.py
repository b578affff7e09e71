"""Independent brute-force re-derivation of the auction result.

Deliberately written in plain Python from raw counts, sharing nothing with
the vectorized engine except the vocabulary. Differential tests compare the
two paths.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from ..errors import InfiniteCrossEntropyError, ValidationError
from ..text_lm import Vocabulary

_TIE = 1e-12


def _normalize(counts: Sequence[float], mu: float) -> list[float]:
    total = sum(counts)
    if total <= 0:
        raise ValidationError("document has no tokens")
    size = len(counts)
    return [(1 - mu) * c / total + mu / size for c in counts]


def _ce(p: Sequence[float], q: Sequence[float]) -> float:
    acc = 0.0
    for pt, qt in zip(p, q):
        if pt == 0:
            continue
        if qt == 0:
            return math.inf
        acc -= pt * math.log(qt)
    return acc


def oracle_auction(
    vocab: Vocabulary,
    organic_counts: Sequence[float],
    ad_counts: Sequence[Sequence[float]],
    lambdas: Sequence[float],
    bids: Sequence[float] | None = None,
    ids: Sequence[int] | None = None,
    mu: float = 0.0,
) -> dict:
    """Full recomputation; ``bids=None`` means every advertiser bids its value.

    Returns a dict with ``winner``, ``second``, ``payment``, ``shift_a``,
    ``values`` and ``user_utilities`` (the last two keyed by id).
    """
    n = len(ad_counts)
    ids = list(ids) if ids is not None else list(range(1, n + 1))
    if n < 2 or len(lambdas) != n or len(ids) != n:
        raise ValidationError("need at least two advertisers with one lambda and id each")
    for c in [organic_counts, *ad_counts]:
        if len(c) != len(vocab):
            raise ValidationError("count vector length does not match vocabulary")

    organic = _normalize(organic_counts, mu)
    ads = [_normalize(c, mu) for c in ad_counts]
    base = [organic] + ads

    shift = -math.inf
    for j1 in range(len(base)):
        for j2 in range(len(base)):
            s = _ce(base[j1], base[j2]) + _ce(base[j2], base[j1])
            if math.isinf(s):
                raise InfiniteCrossEntropyError(f"base[{j1}]", f"base[{j2}]")
            shift = max(shift, s)

    def sim(x, y):
        s = _ce(x, y) + _ce(y, x)
        if math.isinf(s):
            raise InfiniteCrossEntropyError("x", "y")
        return 2 * shift - s

    values, utils = {}, {}
    for i, ad, lam in zip(ids, ads, lambdas):
        spon = [lam * o + (1 - lam) * a for o, a in zip(organic, ad)]
        values[i] = sim(spon, ad)
        utils[i] = sim(spon, organic)

    bid = dict(zip(ids, bids)) if bids is not None else dict(values)
    pv = {i: utils[i] + bid[i] for i in ids}

    def best(candidates):
        top = max(pv[i] for i in candidates)
        return min(i for i in candidates if pv[i] >= top - _TIE)

    winner = best(ids)
    second = best([i for i in ids if i != winner])
    payment = bid[second] + utils[second] - utils[winner]
    return {
        "winner": winner,
        "second": second,
        "payment": payment,
        "shift_a": shift,
        "values": values,
        "user_utilities": utils,
    }


def oracle_winner_bruteforce(
    vocab: Vocabulary,
    organic_counts: Sequence[float],
    ad_counts: Sequence[Sequence[float]],
    lambdas: Sequence[float],
    bids: Sequence[float] | None = None,
    ids: Sequence[int] | None = None,
    mu: float = 0.0,
) -> tuple[int, float]:
    """``(winner id, payment)`` computed by :func:`oracle_auction`."""
    res = oracle_auction(vocab, organic_counts, ad_counts, lambdas, bids, ids, mu)
    return res["winner"], res["payment"]
