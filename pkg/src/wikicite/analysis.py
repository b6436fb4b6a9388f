"""Corpus statistics, passage sampling, and perplexity aggregation.

corpus_stats counts the seven element categories (articles, headings,
paragraphs, sentences, citations, web citations, sources) plus the share
of web citations pointing at web.archive.org.  sample_passages draws a
seeded weighted sample with replacement, weighting passages by
exp(-|len - L_target| / L_target).  geometric_mean_perplexity aggregates
per-passage token log-likelihoods with every passage weighted equally.
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from .schema import Heading, Paragraph, read_chunk

STATS_CATEGORIES = ("articles", "headings", "paragraphs", "sentences",
                    "citations", "web_citations", "sources")
ARCHIVE_MARKER = "://web.archive.org/"


@dataclass
class StatsTable:
    articles: int = 0
    headings: int = 0
    paragraphs: int = 0
    sentences: int = 0
    citations: int = 0
    web_citations: int = 0
    sources: int = 0
    web_archive_citations: int = 0

    def __post_init__(self):
        if not (self.sources <= self.web_citations <= self.citations):
            raise ValueError("expected sources <= web_citations <= citations")

    @property
    def web_archive_share(self) -> float:
        return self.web_archive_citations / self.web_citations if self.web_citations else 0.0

    def __add__(self, other: "StatsTable") -> "StatsTable":
        return StatsTable(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                             for f in fields(self)})


def article_stats(article) -> StatsTable:
    stats = StatsTable(articles=1)
    for element in article.elements:
        if isinstance(element, Heading):
            stats.headings += 1
            citations = element.citations
        elif isinstance(element, Paragraph):
            stats.paragraphs += 1
            stats.sentences += len(element.sentences)
            citations = [c for s in element.sentences for c in s.citations]
        else:
            continue
        for c in citations:
            stats.citations += 1
            if c.url:
                stats.web_citations += 1
                if ARCHIVE_MARKER in c.url:
                    stats.web_archive_citations += 1
                if c.source_text:
                    stats.sources += 1
    return stats


def corpus_stats(chunks: Iterable[str | Path]) -> StatsTable:
    """Exact category counts across chunk files."""
    total = StatsTable()
    for path in chunks:
        for article in read_chunk(path):
            total = total + article_stats(article)
    return total


def stats_by_language(chunks: Iterable[str | Path]) -> dict[str, StatsTable]:
    """Group chunk files by their parent directory name (the language)."""
    grouped: dict[str, StatsTable] = {}
    for path in chunks:
        lang = Path(path).parent.name
        table = grouped.setdefault(lang, StatsTable())
        for article in read_chunk(path):
            grouped[lang] = table = table + article_stats(article)
    return grouped


_ROW_TITLES = (
    ("articles", "Articles"),
    ("headings", "Headings"),
    ("paragraphs", "Paragraphs"),
    ("sentences", "Sentences"),
    ("citations", "Citations"),
    ("web_citations", "Web Citations"),
    ("sources", "Sources"),
)


def render_stats(tables: dict[str, StatsTable]) -> str:
    """Aligned text table, one column per language, category rows in the
    published order plus the web.archive.org share."""
    langs = sorted(tables)
    header = ["Type"] + langs
    rows = [[title] + [str(getattr(tables[lang], name)) for lang in langs]
            for name, title in _ROW_TITLES]
    rows.append(["Web Archive Share"] + [f"{tables[lang].web_archive_share:.4f}" for lang in langs])
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row))
             for row in [header] + rows]
    return "\n".join(lines)


def stats_csv(tables: dict[str, StatsTable]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["language"] + [name for name, _t in _ROW_TITLES] + ["web_archive_share"])
    for lang in sorted(tables):
        t = tables[lang]
        writer.writerow([lang] + [getattr(t, name) for name, _t in _ROW_TITLES]
                        + [f"{t.web_archive_share:.6f}"])
    return out.getvalue()


# -- passage sampling ------------------------------------------------------------

MIN_PASSAGE_CHARS = 15
MAX_PASSAGE_CHARS = 2500


@dataclass(frozen=True)
class PassageCandidate:
    text: str
    length_chars: int
    weight: float


def passage_weight(length_chars: int, target_length: int = 150) -> float:
    """exp(-|length - target| / target): mode at the target length."""
    return math.exp(-abs(length_chars - target_length) / target_length)


def make_candidates(texts: Iterable[str], target_length: int = 150,
                    min_chars: int = MIN_PASSAGE_CHARS,
                    max_chars: int = MAX_PASSAGE_CHARS) -> list[PassageCandidate]:
    """Length-filter texts and attach sampling weights."""
    out = []
    for text in texts:
        n = len(text)
        if min_chars <= n <= max_chars:
            out.append(PassageCandidate(text=text, length_chars=n,
                                        weight=passage_weight(n, target_length)))
    return out


def sample_passages(candidates: Sequence[PassageCandidate], n: int,
                    target_length: int = 150, seed: int = 0) -> list[str]:
    """Weighted sampling with replacement, deterministic for a given seed."""
    if not candidates:
        raise ValueError("cannot sample from an empty candidate list")
    weights = [passage_weight(c.length_chars, target_length) for c in candidates]
    rng = random.Random(seed)
    return [c.text for c in rng.choices(candidates, weights=weights, k=n)]


# -- perplexity -------------------------------------------------------------------


def passage_perplexity(log_likelihoods: Sequence[float]) -> float:
    """exp(-mean token log-likelihood) for one passage."""
    if not log_likelihoods:
        raise ValueError("passage has no token log-likelihoods")
    return math.exp(-sum(log_likelihoods) / len(log_likelihoods))


def geometric_mean_perplexity(passages: Sequence[Sequence[float]]) -> float:
    """Geometric mean of per-passage perplexities (passages weighted
    equally, not tokens)."""
    if not passages:
        raise ValueError("no passages given")
    log_ppls = []
    for lls in passages:
        if not len(lls):
            raise ValueError("passage has no token log-likelihoods")
        log_ppls.append(-sum(lls) / len(lls))
    return math.exp(sum(log_ppls) / len(log_ppls))
