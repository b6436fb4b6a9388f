"""Ordinal quality labels: heuristic scoring, thresholds, and fitting.

The native heuristic scorer stands in when the model service is absent;
thresholds convert raw scores into 1-5 labels; fit_thresholds recovers
cut points from labeled examples.
"""
import random

from wikicite.quality import (
    apply_thresholds,
    continuous_scale_to_label,
    default_thresholds,
    fit_thresholds,
    heuristic_score,
)

SAMPLES = {
    "error page": "404 Not Found. The requested page could not be located.",
    "paywall": "Subscribe to read the full story. Sign in to continue.",
    "link farm": " ".join(f"[story {i}](https://clicks.example/{i})" for i in range(30)),
    "article": " ".join(f"The survey of plot{i} recorded steady growth across seasons."
                        for i in range(60)),
}

thresholds = default_thresholds()
print(f"default cuts: {list(thresholds.cuts)}\n")
for name, text in SAMPLES.items():
    raw = heuristic_score(text)
    label = apply_thresholds(raw, thresholds)
    print(f"{name:10s} raw={raw:0.3f} -> label {label}")

print("\n1-100 fine-grained scale maps to labels in even 20-wide bins:")
for value in (1, 20, 21, 50, 81, 100):
    print(f"  {value:3d} -> {continuous_scale_to_label(value)}")

print("\nfitting cuts from labeled (score, label) pairs:")
rng = random.Random(5)
scores, labels = [], []
for label in (1, 2, 3, 4, 5):
    for _ in range(30):
        scores.append(max(0.0, min(1.0, 0.1 + (label - 1) * 0.2 + rng.gauss(0, 0.04))))
        labels.append(label)
fitted = fit_thresholds(scores, labels)
print(f"  fitted cuts: {[round(c, 3) for c in fitted.cuts]}")
agreement = sum(1 for s, l in zip(scores, labels) if apply_thresholds(s, fitted) == l)
print(f"  training agreement: {agreement}/{len(labels)}")
