"""Ordinal quality labeling of extracted source text.

A raw score (nominally in [0, 1]) maps to a 1-5 label through four strictly
increasing cut points: label = 1 + #{cuts below the score}, with a strict
greater-than at each cut.  fit_thresholds searches a deterministic midpoint
grid for the cut vector maximizing macro-F1 against reference labels.

heuristic_score is a native, model-free scorer used when the external
quality model service is unavailable; its absolute values are not
comparable to the service's model scores.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

log = logging.getLogger(__name__)

LABELS = (1, 2, 3, 4, 5)


class ProtocolError(RuntimeError):
    """The quality service responded with something outside the contract."""


@dataclass(frozen=True)
class QualityThresholds:
    cuts: tuple[float, float, float, float]

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        if len(cuts) != 4 or any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cuts must be 4 strictly increasing numbers, got {cuts}")

    def to_json(self) -> str:
        return json.dumps({"cuts": list(self.cuts)})

    @classmethod
    def from_json(cls, text: str) -> "QualityThresholds":
        return cls(cuts=tuple(json.loads(text)["cuts"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "QualityThresholds":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def default_thresholds() -> QualityThresholds:
    text = resources.files("wikicite.data").joinpath("thresholds_default.json").read_text("utf-8")
    return QualityThresholds.from_json(text)


def apply_thresholds(raw: float, thresholds: QualityThresholds) -> int:
    """label = 1 + number of cuts strictly below raw (no clamping)."""
    return 1 + sum(1 for c in thresholds.cuts if raw > c)


def continuous_scale_to_label(score_1_to_100: int) -> int:
    """Map the fine-grained 1-100 scale onto labels by even 20-wide bins."""
    s = score_1_to_100
    if isinstance(s, bool) or not isinstance(s, int) or not 1 <= s <= 100:
        raise ValueError(f"score must be an integer in 1..100, got {score_1_to_100!r}")
    return (s - 1) // 20 + 1


# -- threshold fitting ---------------------------------------------------------

GRID_FRACTIONS = (0.2, 0.4, 0.6, 0.8)
#: above this many unique scores, gaps form between quantile-spaced anchors
ANCHOR_CAP = 32


def _anchor_scores(scores: Sequence[float]) -> list[float]:
    unique = sorted(set(float(s) for s in scores))
    m = len(unique)
    if m <= ANCHOR_CAP:
        return unique
    idx = {round(i * (m - 1) / (ANCHOR_CAP - 1)) for i in range(ANCHOR_CAP)}
    return [unique[i] for i in sorted(idx)]


def candidate_cuts(scores: Sequence[float]) -> list[float]:
    """Deterministic candidate grid: four evenly spaced points inside every
    gap between consecutive anchor scores, plus four below the minimum and
    four above the maximum (so up to four cuts can share one gap).  Anchors
    are the unique scores, quantile-thinned above ANCHOR_CAP of them."""
    anchors = _anchor_scores(scores)
    span = anchors[-1] - anchors[0] or 1.0
    gaps = [(anchors[0] - span, anchors[0])]
    gaps += list(zip(anchors, anchors[1:]))
    gaps.append((anchors[-1], anchors[-1] + span))
    out: list[float] = []
    for lo, hi in gaps:
        width = hi - lo
        out.extend(lo + width * f for f in GRID_FRACTIONS)
    return out


def macro_f1(true_labels: Sequence[int], pred_labels: Sequence[int]) -> float:
    """Macro F1 over the union of classes present in either sequence."""
    classes = sorted(set(true_labels) | set(pred_labels))
    scores = []
    for k in classes:
        tp = sum(1 for t, p in zip(true_labels, pred_labels) if t == k and p == k)
        fp = sum(1 for t, p in zip(true_labels, pred_labels) if t != k and p == k)
        fn = sum(1 for t, p in zip(true_labels, pred_labels) if t == k and p != k)
        denominator = 2 * tp + fp + fn
        scores.append(2 * tp / denominator if denominator else 0.0)
    return sum(scores) / len(scores)


def fit_thresholds(scores: Sequence[float], labels: Sequence[int]) -> QualityThresholds:
    """Choose the 4 cuts from the candidate grid maximizing macro-F1.

    Candidates inside one gap between anchor scores classify identically,
    so the search runs over multisets of gap regions (4 cuts distributed
    over m+1 regions) instead of over raw 4-subsets; the realized vector
    for a multiset takes the smallest candidates of each region, which is
    exactly the lexicographically smallest optimal 4-subset.  Multiset
    tuples are enumerated in the same lexicographic order as their realized
    vectors, so keeping the first strictly better combo breaks ties to the
    lexicographically smallest cut vector.
    """
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    if len(set(labels)) < 2:
        raise ValueError("need at least two distinct labels to fit thresholds")
    if any(l not in LABELS for l in labels):
        raise ValueError("labels must be integers 1..5")
    anchors = _anchor_scores(scores)
    m = len(anchors)
    span = anchors[-1] - anchors[0] or 1.0
    # region r holds cuts with the indicator pattern "score > anchors[r-1]";
    # region 0 sits below every score, region m above every one
    region_bounds = [(anchors[0] - span, anchors[0])]
    region_bounds += list(zip(anchors, anchors[1:]))
    region_bounds.append((anchors[-1], anchors[-1] + span))

    s = np.asarray(scores, dtype=float)
    t = np.asarray(labels, dtype=int)
    indicators = np.vstack([np.ones(len(s), dtype=np.int64),
                            (s[None, :] > np.asarray(anchors)[:, None]).astype(np.int64)])
    true_count = {k: int((t == k).sum()) for k in LABELS}

    def realized(combo: tuple[int, ...]) -> tuple[float, ...]:
        cuts: list[float] = []
        for r, group in itertools.groupby(combo):
            k = len(list(group))
            lo, hi = region_bounds[r]
            width = hi - lo
            cuts.extend(lo + width * f for f in GRID_FRACTIONS[:k])
        return tuple(cuts)

    best_f1 = -1.0
    best_combo: tuple[int, ...] | None = None
    combos = itertools.combinations_with_replacement(range(m + 1), 4)
    while True:
        batch = list(itertools.islice(combos, 20_000))
        if not batch:
            break
        idx = np.asarray(batch)
        pred = 1 + indicators[idx].sum(axis=1)  # (B, n)
        f1_terms = np.zeros(len(idx))
        mask_count = np.zeros(len(idx))
        for k in LABELS:
            pred_k = pred == k
            pk = pred_k.sum(axis=1)
            tp = (pred_k & (t == k)[None, :]).sum(axis=1)
            fp = pk - tp
            fn = true_count[k] - tp
            denom = 2 * tp + fp + fn
            f1 = np.where(denom > 0, 2 * tp / np.where(denom > 0, denom, 1), 0.0)
            mask = (true_count[k] > 0) | (pk > 0)
            f1_terms = f1_terms + f1 * mask
            mask_count = mask_count + mask
        macro = f1_terms / mask_count
        j = int(np.argmax(macro))  # first occurrence: lex-smallest in batch
        if macro[j] > best_f1:
            best_f1 = float(macro[j])
            best_combo = batch[j]
    assert best_combo is not None
    return QualityThresholds(cuts=realized(best_combo))


# -- native heuristic scorer ----------------------------------------------------

ERROR_LEXICON = (
    "404", "403", "not found", "page not found", "forbidden", "access denied",
    "captcha", "paywall", "subscribe to read", "subscribe", "sign in", "log in",
    "enable javascript", "javascript is disabled", "cookies", "cookie policy",
    "error", "robot", "checking your browser", "untitled",
)
_MD_LINK_RE = re.compile(r"\]\(https?://", re.I)

# fixed weights; see module docstring for intent
W_LENGTH = 0.35
W_REPETITION = 0.25
W_LINKS = 0.2
W_ENTROPY = 0.2


def _lexicon_hit_fraction(lower_text: str, token_count: int) -> float:
    hit_tokens = 0
    for phrase in ERROR_LEXICON:
        count = lower_text.count(phrase)
        if count:
            hit_tokens += count * len(phrase.split())
    return min(1.0, hit_tokens / max(1, token_count))


def _line_entropy(text: str) -> float:
    """Normalized entropy of bucketed line lengths; 0 = uniform formatting."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        return 0.0
    buckets: dict[int, int] = {}
    for line in lines:
        b = min(len(line) // 40, 5)
        buckets[b] = buckets.get(b, 0) + 1
    total = len(lines)
    h = -sum((c / total) * math.log(c / total) for c in buckets.values())
    return h / math.log(6)


def heuristic_score(source_text: str) -> float:
    """Deterministic [0, 1] quality estimate from surface features.

    Combines text length, token repetition, markdown-link density, and
    line-length-entropy terms, damped by error/paywall lexicon hits; the
    score never increases as the lexicon-hit fraction grows.
    """
    if not source_text or not source_text.strip():
        return 0.0
    tokens = source_text.split()
    n = len(tokens)
    length_score = min(1.0, n / 300)
    unique_ratio = len({t.casefold() for t in tokens}) / n
    repetition_score = min(1.0, unique_ratio / 0.5)
    links = len(_MD_LINK_RE.findall(source_text))
    link_score = max(0.0, 1.0 - 10 * links / n)
    entropy_score = 1.0 - _line_entropy(source_text)
    base = (W_LENGTH * length_score + W_REPETITION * repetition_score
            + W_LINKS * link_score + W_ENTROPY * entropy_score)
    damping = max(0.0, 1.0 - 2.0 * _lexicon_hit_fraction(source_text.casefold(), n))
    return base * damping


# -- remote scoring client -------------------------------------------------------


def score_remote(
    texts: Sequence[str],
    endpoint: str,
    thresholds: QualityThresholds,
    truncate_chars: int = 2000,
    timeout: float = 60.0,
    session: requests.Session | None = None,
) -> list[tuple[float, int]]:
    """Score texts via the quality model service, order-preserving.

    Texts are truncated to truncate_chars before sending.  If the service
    cannot be reached the batch falls back to heuristic_score plus the
    given thresholds (logged); a reachable service answering outside the
    wire contract raises ProtocolError instead, since silently mixing score
    scales would corrupt the corpus.
    """
    if not texts:
        return []
    url = endpoint.rstrip("/")
    if not url.endswith("/score"):
        url += "/score"
    payload = {"texts": [t[:truncate_chars] for t in texts]}
    sess = session or requests
    try:
        resp = sess.post(url, json=payload, timeout=timeout)
    except requests.RequestException as e:
        log.warning("quality service unreachable (%s); batch of %d fallback-scored "
                    "with heuristic", e.__class__.__name__, len(texts))
        return [(s, apply_thresholds(s, thresholds))
                for s in (heuristic_score(t) for t in texts)]
    if resp.status_code >= 500:
        log.warning("quality service error %s; batch of %d fallback-scored with heuristic",
                    resp.status_code, len(texts))
        return [(s, apply_thresholds(s, thresholds))
                for s in (heuristic_score(t) for t in texts)]
    if resp.status_code != 200:
        raise ProtocolError(f"quality service rejected the request: HTTP {resp.status_code}")
    try:
        data = resp.json()
        scores = data["scores"]
        labels = data["labels"]
    except (ValueError, KeyError, TypeError) as e:
        raise ProtocolError(f"malformed quality service response: {e}") from e
    if len(scores) != len(texts) or len(labels) != len(texts):
        raise ProtocolError("quality service returned mismatched result lengths")
    if any(l not in LABELS for l in labels):
        raise ProtocolError("quality service returned labels outside 1..5")
    return [(float(s), int(l)) for s, l in zip(scores, labels)]
