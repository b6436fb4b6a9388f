"""Per-language, per-class evaluation with low-support filtering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .data import TrainingExample
from .model import ScoringBundle
from .thresholds import Thresholds, apply_thresholds

MIN_SUPPORT = 5
CLASS_KEYS = ("1", "2", "3", "4", "5", "4|5")


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


def _binary_metrics(true_pos: Sequence[bool], pred_pos: Sequence[bool]) -> ClassMetrics:
    tp = sum(1 for t, p in zip(true_pos, pred_pos) if t and p)
    fp = sum(1 for t, p in zip(true_pos, pred_pos) if not t and p)
    fn = sum(1 for t, p in zip(true_pos, pred_pos) if t and not p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassMetrics(precision=precision, recall=recall, f1=f1, support=sum(true_pos))


def evaluate(bundle: ScoringBundle, thresholds: Thresholds,
             test_set: Sequence[TrainingExample]) -> dict:
    """Metrics per (language, class); pairs with support below five are
    excluded; macro averages run across surviving languages.  The 4|5
    pseudo-class unions labels 4 and 5."""
    if not test_set:
        raise ValueError("empty test set")
    scores = bundle.score([e.text for e in test_set])
    pred = [apply_thresholds(s, thresholds) for s in scores]
    languages = sorted({e.language for e in test_set})
    per_language: dict[str, dict[str, ClassMetrics]] = {}
    for language in languages:
        idx = [i for i, e in enumerate(test_set) if e.language == language]
        true_l = [test_set[i].label for i in idx]
        pred_l = [pred[i] for i in idx]
        per_language[language] = {}
        for key in CLASS_KEYS:
            if key == "4|5":
                true_pos = [t in (4, 5) for t in true_l]
                pred_pos = [p in (4, 5) for p in pred_l]
            else:
                k = int(key)
                true_pos = [t == k for t in true_l]
                pred_pos = [p == k for p in pred_l]
            if sum(true_pos) < MIN_SUPPORT:
                continue
            per_language[language][key] = _binary_metrics(true_pos, pred_pos)
    macro: dict[str, dict[str, float]] = {}
    for key in CLASS_KEYS:
        rows = [metrics[key] for metrics in per_language.values() if key in metrics]
        if not rows:
            continue
        macro[key] = {
            "precision": sum(r.precision for r in rows) / len(rows),
            "recall": sum(r.recall for r in rows) / len(rows),
            "f1": sum(r.f1 for r in rows) / len(rows),
            "languages": len(rows),
        }
    if not macro:
        raise ValueError("no (language, class) pair reaches the minimum support")
    return {
        "per_language": {
            lang: {key: vars(m) for key, m in metrics.items()}
            for lang, metrics in per_language.items()
        },
        "macro": macro,
    }
