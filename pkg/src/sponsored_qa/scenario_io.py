"""Scenario files in, reports and sweep CSVs out.

Scenario files are JSON objects::

    {
      "question": "how do i brew coffee",
      "organic_answer": "grind beans then brew with hot water",
      "advertisers": [
        {"id": 1, "ad": "acme grinders grind beans", "lambda": 0.5, "bid": "truthful"},
        {"id": 2, "ad": {"counts": {"acme": 2, "water": 1}}, "lambda": 0.7, "bid": 3.5}
      ],
      "smoothing_mu": 0.1,
      "options": {"clamp_payment_at_zero": false}
    }

Any document (question, organic answer, ad) may be raw text or a
``{"counts": {token: count}}`` map; the latter allows fractional counts.
All numbers written out are rounded to 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .auction import Advertiser, AuctionOutcome, AuctionSetup, BidProfile, run_auction
from .errors import ValidationError
from .similarity import similarity_terms
from .text_lm import Document, Vocabulary

SIG_DIGITS = 12
SWEEP_HEADER = ("epsilon", "value_gap", "utility_gap", "pv_gap", "winner", "payment")

TextOrCounts = str | Mapping[str, float]


class ScenarioError(ValidationError):
    """Malformed scenario file; ``field`` holds the offending path."""


@dataclass(frozen=True)
class AdvertiserSpec:
    id: int
    ad: TextOrCounts
    lam: float
    bid: float | None  # None means bid truthfully


@dataclass(frozen=True)
class ScenarioFile:
    question: TextOrCounts
    organic_answer: TextOrCounts
    advertisers: tuple[AdvertiserSpec, ...]
    smoothing_mu: float = 0.0
    clamp_payment_at_zero: bool = False
    extra_options: Mapping[str, Any] = field(default_factory=dict)


def round_sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"expected a number, got {value!r}", field=path)
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError("number must be finite", field=path)
    return value


def _document_spec(value: Any, path: str) -> TextOrCounts:
    if isinstance(value, str):
        if not value.split():
            raise ScenarioError("text contains no tokens", field=path)
        return value
    if isinstance(value, Mapping) and set(value) == {"counts"} and isinstance(value["counts"], Mapping):
        counts = {}
        for tok, c in value["counts"].items():
            c = _number(c, f"{path}.counts.{tok}")
            if c < 0:
                raise ScenarioError("counts must be nonnegative", field=f"{path}.counts.{tok}")
            if not str(tok).strip() or len(str(tok).split()) != 1:
                raise ScenarioError("tokens must be single whitespace-free strings", field=f"{path}.counts")
            key = str(tok).lower()
            counts[key] = counts.get(key, 0.0) + c
        if not any(c > 0 for c in counts.values()):
            raise ScenarioError("document must contain at least one token", field=path)
        return counts
    raise ScenarioError('expected text or an object {"counts": {...}}', field=path)


def load_scenario(source: str) -> ScenarioFile:
    """Parse and validate scenario JSON without doing any model arithmetic."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}", field="<root>") from None
    if not isinstance(data, Mapping):
        raise ScenarioError("scenario must be a JSON object", field="<root>")
    known = {"question", "organic_answer", "advertisers", "smoothing_mu", "options"}
    unknown = set(data) - known
    if unknown:
        raise ScenarioError(f"unknown keys {sorted(unknown)}", field="<root>")
    for key in ("question", "organic_answer", "advertisers"):
        if key not in data:
            raise ScenarioError("missing required key", field=key)

    question = _document_spec(data["question"], "question")
    organic = _document_spec(data["organic_answer"], "organic_answer")

    raw_ads = data["advertisers"]
    if not isinstance(raw_ads, list):
        raise ScenarioError("expected a list", field="advertisers")
    if len(raw_ads) < 2:
        raise ScenarioError("at least two advertisers are required", field="advertisers")
    ads, seen = [], set()
    for k, entry in enumerate(raw_ads):
        path = f"advertisers[{k}]"
        if not isinstance(entry, Mapping):
            raise ScenarioError("expected an object", field=path)
        for key in ("id", "ad", "lambda"):
            if key not in entry:
                raise ScenarioError("missing required key", field=f"{path}.{key}")
        extra = set(entry) - {"id", "ad", "lambda", "bid"}
        if extra:
            raise ScenarioError(f"unknown keys {sorted(extra)}", field=path)
        adv_id = entry["id"]
        if isinstance(adv_id, bool) or not isinstance(adv_id, int):
            raise ScenarioError(f"id must be an integer, got {adv_id!r}", field=f"{path}.id")
        if adv_id in seen:
            raise ScenarioError(f"duplicate advertiser id {adv_id}", field=f"{path}.id")
        seen.add(adv_id)
        lam = _number(entry["lambda"], f"{path}.lambda")
        if not 0.0 <= lam <= 1.0:
            raise ScenarioError(f"lambda of advertiser {adv_id} must lie in [0, 1], got {lam}",
                                field=f"{path}.lambda")
        bid_raw = entry.get("bid", "truthful")
        if bid_raw == "truthful":
            bid = None
        else:
            bid = _number(bid_raw, f"{path}.bid")
            if bid < 0:
                raise ScenarioError(f"bid of advertiser {adv_id} must be nonnegative", field=f"{path}.bid")
        ads.append(AdvertiserSpec(adv_id, _document_spec(entry["ad"], f"{path}.ad"), lam, bid))

    mu = _number(data.get("smoothing_mu", 0.0), "smoothing_mu")
    if not 0.0 <= mu < 1.0:
        raise ScenarioError(f"must lie in [0, 1), got {mu}", field="smoothing_mu")
    options = data.get("options", {})
    if not isinstance(options, Mapping):
        raise ScenarioError("expected an object", field="options")
    clamp = options.get("clamp_payment_at_zero", False)
    if not isinstance(clamp, bool):
        raise ScenarioError("expected true or false", field="options.clamp_payment_at_zero")
    extra_options = {k: v for k, v in options.items() if k != "clamp_payment_at_zero"}
    return ScenarioFile(question, organic, tuple(ads), mu, clamp, extra_options)


def _tokens_of(spec: TextOrCounts) -> Iterable[str]:
    return spec.lower().split() if isinstance(spec, str) else spec.keys()


def _document(spec: TextOrCounts, vocab: Vocabulary) -> Document:
    if isinstance(spec, str):
        counts: dict[str, float] = {}
        for tok in spec.lower().split():
            counts[tok] = counts.get(tok, 0.0) + 1.0
        return Document.from_counts(counts, vocab)
    return Document.from_counts(spec, vocab)


def build_setup(scenario: ScenarioFile) -> tuple[AuctionSetup, BidProfile]:
    """Induce, fuse and score every advertiser; truthful bids resolve to values.

    The vocabulary is the union of all tokens, in first-appearance order
    across question, organic answer and ads.
    """
    specs = [scenario.question, scenario.organic_answer, *(a.ad for a in scenario.advertisers)]
    vocab = Vocabulary.from_tokens(tok for spec in specs for tok in _tokens_of(spec))
    advertisers = [Advertiser(a.id, _document(a.ad, vocab), a.lam) for a in scenario.advertisers]
    setup = AuctionSetup.build(
        _document(scenario.organic_answer, vocab),
        advertisers,
        scenario.smoothing_mu,
        question=_document(scenario.question, vocab),
    )
    bids = {a.id: setup.value(a.id) if a.bid is None else a.bid for a in scenario.advertisers}
    return setup, BidProfile(bids)


def parse_scenario(source: str) -> tuple[AuctionSetup, BidProfile]:
    return build_setup(load_scenario(source))


def _counts_json(doc: Document) -> dict:
    return {"counts": {t: round_sig(c) for t, c in doc.as_dict().items()}}


def dump_scenario(setup: AuctionSetup, bids: BidProfile | None = None, clamp_payment_at_zero: bool = False) -> str:
    """Serialize a setup back to scenario JSON using explicit count maps.

    ``bids=None`` writes every bid as ``"truthful"``.
    """
    question = setup.question if setup.question is not None else setup.organic
    data = {
        "question": _counts_json(question),
        "organic_answer": _counts_json(setup.organic),
        "advertisers": [
            {
                "id": a.id,
                "ad": _counts_json(a.ad),
                "lambda": round_sig(a.lam),
                "bid": "truthful" if bids is None else round_sig(bids[a.id]),
            }
            for a in setup.advertisers
        ],
        "smoothing_mu": round_sig(setup.smoothing.mu),
        "options": {"clamp_payment_at_zero": clamp_payment_at_zero},
    }
    return json.dumps(data, indent=2) + "\n"


ReportRecord = dict


def build_report(
    setup: AuctionSetup,
    bids: BidProfile,
    outcome: AuctionOutcome | None = None,
    scenario: ScenarioFile | None = None,
) -> ReportRecord:
    """Outcome, per-advertiser breakdown (both CE directions per pair), A and an echo of the inputs."""
    if outcome is None:
        outcome = run_auction(setup, bids, scenario.clamp_payment_at_zero if scenario else False)
    truthful = all(abs(bids[i] - setup.value(i)) <= 1e-12 for i in setup.ids)
    advertisers = []
    for k, a in enumerate(setup.advertisers):
        spon, ad_m, org = setup.sponsored_models[k], setup.ad_models[k], setup.organic_model
        ce_sa, ce_as = similarity_terms(spon, ad_m)
        ce_so, ce_os = similarity_terms(spon, org)
        advertisers.append({
            "id": a.id,
            "lambda": a.lam,
            "bid": bids[a.id],
            "bid_mode": (
                "truthful" if scenario is None
                else "truthful" if next(s for s in scenario.advertisers if s.id == a.id).bid is None
                else "fixed"
            ),
            "value": outcome.value[a.id],
            "user_utility": outcome.user_utility[a.id],
            "platform_value": outcome.platform_value[a.id],
            "utility": outcome.utility[a.id],
            "social_welfare": outcome.value[a.id] + outcome.user_utility[a.id],
            "similarity_breakdown": {
                "ce_sponsored_ad": ce_sa,
                "ce_ad_sponsored": ce_as,
                "ce_sponsored_organic": ce_so,
                "ce_organic_sponsored": ce_os,
            },
            "ad_counts": a.ad.as_dict(),
            "sponsored_model": spon.as_dict(),
        })
    sw_gap = outcome.social_welfare_winner - outcome.social_welfare_second
    result = {
        "winner": outcome.winner,
        "second": outcome.second,
        "payment": outcome.payment,
        "negative_payment_flag": outcome.negative_payment_flag,
        "payment_clamped": outcome.payment_clamped,
        "winner_utility": outcome.utility[outcome.winner],
        "social_welfare_winner": outcome.social_welfare_winner,
        "social_welfare_second": outcome.social_welfare_second,
        "social_welfare_gap": sw_gap,
        "all_bids_truthful": truthful,
    }
    if truthful:
        result["surplus_identity_residual"] = outcome.utility[outcome.winner] - sw_gap
    return {
        "scenario": {
            "question": setup.question.as_dict() if setup.question is not None else None,
            "organic_counts": setup.organic.as_dict(),
            "vocabulary": list(setup.organic.vocab.tokens),
            "smoothing_mu": setup.smoothing.mu,
        },
        "shift_a": setup.shift_a,
        "advertisers": advertisers,
        "outcome": result,
    }


def _rounded(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, Mapping):
        return {str(k): _rounded(v) for k, v in obj.items()}
    if isinstance(obj, Sequence):
        return [_rounded(v) for v in obj]
    return round_sig(float(obj))


def write_report(record: ReportRecord) -> str:
    """Deterministic JSON: sorted keys, 12 significant digits, trailing newline."""
    return json.dumps(_rounded(record), sort_keys=True, indent=2) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def write_sweep_csv(rows: Sequence) -> str:
    """CSV with header ``epsilon,value_gap,utility_gap,pv_gap,winner,payment`` and LF endings."""
    if len(rows) == 0:
        raise ValidationError("cannot write an empty sweep")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([_fmt(r.epsilon), _fmt(r.value_gap), _fmt(r.utility_gap),
                         _fmt(r.pv_gap), str(r.winner), _fmt(r.payment)])
    return buf.getvalue()
