"""Analysis utilities: corpus statistics, passage sampling, perplexity.

Demonstrates the count categories, the length-weighted passage sampler
(weight = exp(-|len - L| / L)), and geometric-mean perplexity aggregation.
"""
import math
import random
import tempfile
from pathlib import Path

from wikicite.analysis import (
    geometric_mean_perplexity,
    make_candidates,
    passage_weight,
    render_stats,
    sample_passages,
    stats_by_language,
)
from wikicite.langconfig import load_language_config
from wikicite.schema import write_chunk_file
from wikicite.wikitext import article_from_wikitext

config = load_language_config("en")
articles = [article_from_wikitext(
    f"Topic {i}",
    f"Topic {i} concerns a valley. Its study began early."
    f"<ref>{{{{cite web|url=https://e.org/{i}}}}}</ref>\n\n== Sources ==\nListed.",
    "2024-05-01T00:00:00Z", config)[0] for i in range(4)]

with tempfile.TemporaryDirectory() as workdir:
    chunk = Path(workdir) / "en" / "chunk_00000.jsonl"
    chunk.parent.mkdir(parents=True)
    write_chunk_file(chunk, articles)
    print(render_stats(stats_by_language([chunk])))

print("\npassage sampling weights (L_target = 150):")
for length in (15, 75, 150, 300, 600):
    print(f"  len {length:4d} -> weight {passage_weight(length, 150):0.6f}")

rng = random.Random(11)
texts = ["x" * rng.randint(10, 900) for _ in range(400)]
candidates = make_candidates(texts, target_length=150)
sampled = sample_passages(candidates, 2000, target_length=150, seed=42)
mean_len = sum(len(t) for t in sampled) / len(sampled)
print(f"\nsampled 2000 passages from {len(candidates)} candidates; "
      f"mean length {mean_len:.0f} chars (target 150)")

print("\ngeometric-mean perplexity:")
passages = [[-math.log(2)] * 10, [-math.log(8)] * 10]
print(f"  passages with ppl 2 and 8 -> {geometric_mean_perplexity(passages):.3f}")
