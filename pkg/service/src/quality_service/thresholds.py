"""Ordinal threshold handling, wire-compatible with the corpus toolkit.

The JSON format ({"cuts": [c1, c2, c3, c4]}), the strict greater-than label
rule, and the midpoint-grid fitting procedure are deliberately identical to
the consumer side so both components assign the same label to the same raw
score.  Reimplemented here because the service talks to the toolkit only
over its HTTP and file interfaces.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

GRID_FRACTIONS = (0.2, 0.4, 0.6, 0.8)
ANCHOR_CAP = 32
LABELS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class Thresholds:
    cuts: tuple[float, float, float, float]

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        if len(cuts) != 4 or any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cuts must be 4 strictly increasing numbers, got {cuts}")

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps({"cuts": list(self.cuts)}) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Thresholds":
        return cls(cuts=tuple(json.loads(Path(path).read_text(encoding="utf-8"))["cuts"]))


def apply_thresholds(raw: float, thresholds: Thresholds) -> int:
    return 1 + sum(1 for c in thresholds.cuts if raw > c)


def macro_f1(true_labels: Sequence[int], pred_labels: Sequence[int]) -> float:
    classes = sorted(set(true_labels) | set(pred_labels))
    scores = []
    for k in classes:
        tp = sum(1 for t, p in zip(true_labels, pred_labels) if t == k and p == k)
        fp = sum(1 for t, p in zip(true_labels, pred_labels) if t != k and p == k)
        fn = sum(1 for t, p in zip(true_labels, pred_labels) if t == k and p != k)
        denominator = 2 * tp + fp + fn
        scores.append(2 * tp / denominator if denominator else 0.0)
    return sum(scores) / len(scores)


def _anchor_scores(scores: Sequence[float]) -> list[float]:
    unique = sorted(set(float(s) for s in scores))
    m = len(unique)
    if m <= ANCHOR_CAP:
        return unique
    idx = {round(i * (m - 1) / (ANCHOR_CAP - 1)) for i in range(ANCHOR_CAP)}
    return [unique[i] for i in sorted(idx)]


def fit_thresholds(scores: Sequence[float], labels: Sequence[int]) -> Thresholds:
    """Grid search over per-gap candidate cuts maximizing macro-F1; ties
    break to the lexicographically smallest cut vector.  Same algorithm as
    the corpus toolkit's threshold fitting (anchor thinning included)."""
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    if len(set(labels)) < 2:
        raise ValueError("need at least two distinct labels to fit thresholds")
    anchors = _anchor_scores(scores)
    m = len(anchors)
    span = anchors[-1] - anchors[0] or 1.0
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
            cuts.extend(lo + (hi - lo) * f for f in GRID_FRACTIONS[:k])
        return tuple(cuts)

    best_f1 = -1.0
    best_combo: tuple[int, ...] | None = None
    combos = itertools.combinations_with_replacement(range(m + 1), 4)
    while True:
        batch = list(itertools.islice(combos, 20_000))
        if not batch:
            break
        idx = np.asarray(batch)
        pred = 1 + indicators[idx].sum(axis=1)
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
        j = int(np.argmax(macro))
        if macro[j] > best_f1:
            best_f1 = float(macro[j])
            best_combo = batch[j]
    assert best_combo is not None
    return Thresholds(cuts=realized(best_combo))
