import math
import random

import pytest

from wikicite.analysis import (
    PassageCandidate,
    StatsTable,
    corpus_stats,
    geometric_mean_perplexity,
    make_candidates,
    passage_weight,
    render_stats,
    sample_passages,
    stats_by_language,
    stats_csv,
)
from wikicite.ingest import RawPage, skeleton_article
from wikicite.schema import (
    Citation,
    Heading,
    Paragraph,
    Sentence,
    compute_hash,
    write_chunk_file,
)
from wikicite.schema import Article


def known_chunk(tmp_path):
    """2 articles, 3 headings, 4 paragraphs, 9 sentences, 5 citations,
    3 web citations, 1 scraped source."""
    def cite(url=None, scraped=False, archive=False):
        if archive:
            url = "https://web.archive.org/web/2024/https://e.org/x"
        return Citation(content="<ref/>", char_index=0, url=url,
                        source_text=("words " * 120) if scraped else None,
                        source_download_date="2024-05-02T00:00:00Z" if url else None)

    def sent(n_cit=0, **kw):
        return Sentence(text="Sentence text.", citations=[cite(**kw) for _ in range(n_cit)])

    a1 = Article(
        title="A1", wikicode="w1", hash=compute_hash("A1", "w1"),
        last_revision="2024-05-01T00:00:00Z",
        elements=[
            Heading(text="H1", level=2),
            Paragraph(sentences=[sent(), Sentence(text="Cited.", citations=[
                cite(url="https://e.org/1", scraped=True)])]),
            Paragraph(sentences=[sent(), sent(), Sentence(text="More.", citations=[
                cite(url="https://e.org/2"), cite()])]),
            Heading(text="H2", level=3),
        ])
    a2 = Article(
        title="A2", wikicode="w2", hash=compute_hash("A2", "w2"),
        last_revision="2024-05-01T00:00:00Z",
        elements=[
            Heading(text="H3", level=2, citations=[cite()]),
            Paragraph(sentences=[sent(), sent()]),
            Paragraph(sentences=[sent(), Sentence(text="Archived.", citations=[
                cite(archive=True)])]),
        ])
    path = tmp_path / "en" / "chunk_00000.jsonl"
    path.parent.mkdir(parents=True)
    write_chunk_file(path, [a1, a2])
    return path


class TestCorpusStats:
    def test_hand_counted_fixture(self, tmp_path):
        stats = corpus_stats([known_chunk(tmp_path)])
        assert stats.articles == 2
        assert stats.headings == 3
        assert stats.paragraphs == 4
        assert stats.sentences == 9
        assert stats.citations == 5
        assert stats.web_citations == 3
        assert stats.sources == 1
        assert stats.web_archive_citations == 1

    def test_empty(self):
        stats = corpus_stats([])
        assert stats == StatsTable()

    def test_invariant_ordering(self, tmp_path):
        stats = corpus_stats([known_chunk(tmp_path)])
        assert stats.sources <= stats.web_citations <= stats.citations

    def test_linearity(self, tmp_path):
        path = known_chunk(tmp_path)
        single = corpus_stats([path])
        double = corpus_stats([path, path])
        for name in ("articles", "headings", "paragraphs", "sentences",
                     "citations", "web_citations", "sources"):
            assert getattr(double, name) == 2 * getattr(single, name)

    def test_render_row_order(self, tmp_path):
        tables = stats_by_language([known_chunk(tmp_path)])
        rendered = render_stats(tables)
        rows = [line.split()[0] for line in rendered.splitlines()[1:]]
        assert rows[:7] == ["Articles", "Headings", "Paragraphs", "Sentences",
                            "Citations", "Web", "Sources"]
        csv_text = stats_csv(tables)
        assert csv_text.splitlines()[0] == ("language,articles,headings,paragraphs,"
                                            "sentences,citations,web_citations,sources,"
                                            "web_archive_share")
        assert csv_text.splitlines()[1].startswith("en,2,3,4,9,5,3,1")


class TestPassageSampling:
    def test_weight_at_target(self):
        assert passage_weight(150, 150) == 1.0

    def test_weight_at_double_target(self):
        assert abs(passage_weight(300, 150) - math.exp(-1)) < 1e-12

    def test_candidates_filtered_to_length_range(self):
        texts = ["x" * 5, "y" * 100, "z" * 3000]
        candidates = make_candidates(texts, 150)
        assert [c.length_chars for c in candidates] == [100]
        assert 15 <= candidates[0].length_chars <= 2500

    def test_deterministic_given_seed(self):
        candidates = make_candidates(["a" * 100, "b" * 150, "c" * 200, "d" * 400], 150)
        first = sample_passages(candidates, 50, seed=99)
        second = sample_passages(candidates, 50, seed=99)
        assert first == second
        assert len(first) == 50
        assert set(first) <= {c.text for c in candidates}

    def test_empirical_ratio(self):
        candidates = [PassageCandidate("A" * 150, 150, 1.0),
                      PassageCandidate("B" * 300, 300, math.exp(-1))]
        sampled = sample_passages(candidates, 50_000, target_length=150, seed=5)
        count_a = sum(1 for t in sampled if t[0] == "A")
        count_b = len(sampled) - count_a
        ratio = count_b / count_a
        assert abs(ratio - math.exp(-1)) / math.exp(-1) < 0.05

    def test_empty_candidates_error(self):
        with pytest.raises(ValueError):
            sample_passages([], 5)


class TestPerplexity:
    def test_certain_tokens(self):
        assert geometric_mean_perplexity([[0.0, 0.0]]) == 1.0

    def test_uniform_half(self):
        value = geometric_mean_perplexity([[-math.log(2)] * 5])
        assert abs(value - 2.0) < 1e-12

    def test_two_passages_geometric(self):
        passages = [[-math.log(2)] * 3, [-math.log(8)] * 7]
        assert abs(geometric_mean_perplexity(passages) - 4.0) < 1e-9

    def test_passages_weighted_equally_not_tokens(self):
        short = [-math.log(2)] * 1
        long = [-math.log(8)] * 100
        assert abs(geometric_mean_perplexity([short, long]) - 4.0) < 1e-9

    def test_empty_passage_error(self):
        with pytest.raises(ValueError):
            geometric_mean_perplexity([[0.0], []])
        with pytest.raises(ValueError):
            geometric_mean_perplexity([])
