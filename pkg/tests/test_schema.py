import json
import random

import pytest

from genarticles import random_article
from wikicite.schema import (
    Article,
    Citation,
    Heading,
    Paragraph,
    SchemaError,
    Sentence,
    article_to_dict,
    compute_hash,
    deserialize_article,
    serialize_article,
)


def minimal_article() -> Article:
    return Article(title="T", wikicode="", hash=compute_hash("T", ""),
                   last_revision="2024-01-01T00:00:00Z")


class TestSerialize:
    def test_minimal_article_nulls_and_empty_lists(self):
        line = serialize_article(minimal_article())
        data = json.loads(line)
        assert data["excerpts_with_citations"] == []
        assert data["first_revision"] is None
        assert data["cross_lingual_links"] is None
        assert "\n" not in line

    def test_citation_name_round_trips(self):
        sentence = Sentence(text="Quote.", citations=[
            Citation(content='<ref name="Thomas2013">{{Citation |last=Thomas}}</ref>',
                     char_index=6, name="Thomas2013")])
        article = Article(title="T", wikicode="w", hash=compute_hash("T", "w"),
                          last_revision="2024-01-01T00:00:00Z",
                          elements=[Paragraph(sentences=[sentence])])
        data = json.loads(serialize_article(article))
        assert data["elements"][0]["sentences"][0]["citations"][0]["name"] == "Thomas2013"

    def test_field_names_match_published_schema(self):
        data = article_to_dict(minimal_article())
        assert list(data) == [
            "title", "wikicode", "hash", "last_revision", "first_revision",
            "first_revision_access_date", "cross_lingual_links",
            "cross_lingual_links_access_date", "text", "elements",
            "excerpts_with_citations",
        ]

    def test_source_code_num_bytes_always_null(self):
        line = serialize_article(Article(
            title="T", wikicode="w", hash=compute_hash("T", "w"),
            last_revision="2024-01-01T00:00:00Z",
            elements=[Paragraph(sentences=[Sentence(text="x.", citations=[
                Citation(content="<ref/>", char_index=0, url="https://e.org",
                         source_text="words " * 30, source_code_num_chars=120)])])]))
        cit = json.loads(line)["elements"][0]["sentences"][0]["citations"][0]
        assert cit["source_code_num_bytes"] is None


class TestRoundTrip:
    def test_minimal(self):
        a = minimal_article()
        assert deserialize_article(serialize_article(a)) == a

    def test_random_articles(self):
        rng = random.Random(20240501)
        for _ in range(300):
            a = random_article(rng)
            assert deserialize_article(serialize_article(a)) == a

    def test_one_line_per_article(self):
        rng = random.Random(7)
        lines = [serialize_article(random_article(rng)) for _ in range(25)]
        blob = "".join(line + "\n" for line in lines)
        assert blob.count("\n") == 25
        for line in blob.splitlines():
            deserialize_article(line)


class TestDeserializeErrors:
    def base(self) -> dict:
        return json.loads(serialize_article(minimal_article()))

    def test_quality_label_out_of_range(self):
        data = self.base()
        data["elements"] = [{
            "type": "paragraph",
            "sentences": [{
                "text": "x.", "translated_text": None, "trailing_whitespace": "",
                "citations": [{
                    "content": "<ref/>", "char_index": 0, "name": None,
                    "url": "https://e.org", "source_text": "t " * 60,
                    "source_code_content_type": None, "source_code_num_bytes": None,
                    "source_code_num_chars": None, "source_download_date": None,
                    "source_download_error": None, "source_extract_error": None,
                    "source_snippet": None, "source_quality_label": 6,
                    "source_quality_raw_score": None,
                }],
                "citations_needed": [],
            }],
        }]
        with pytest.raises(SchemaError, match="source_quality_label"):
            deserialize_article(json.dumps(data))

    def test_wrong_case_discriminator(self):
        data = self.base()
        data["elements"] = [{"type": "Heading", "text": "x", "translated_text": None,
                             "level": 2, "citations": [], "citations_needed": []}]
        with pytest.raises(SchemaError, match="type"):
            deserialize_article(json.dumps(data))

    def test_unknown_field_names_path(self):
        data = self.base()
        data["bogus"] = 1
        with pytest.raises(SchemaError, match="bogus"):
            deserialize_article(json.dumps(data))

    def test_missing_field(self):
        data = self.base()
        del data["hash"]
        with pytest.raises(SchemaError, match="hash"):
            deserialize_article(json.dumps(data))

    def test_heading_level_out_of_range(self):
        data = self.base()
        data["elements"] = [{"type": "heading", "text": "x", "translated_text": None,
                             "level": 7, "citations": [], "citations_needed": []}]
        with pytest.raises(SchemaError, match="level"):
            deserialize_article(json.dumps(data))

    def test_char_index_beyond_text(self):
        data = self.base()
        data["elements"] = [{
            "type": "paragraph",
            "sentences": [{
                "text": "ab", "translated_text": None, "trailing_whitespace": "",
                "citations": [], "citations_needed": [
                    {"type": "citation-needed", "content": "{{cn}}", "char_index": 3}],
            }],
        }]
        with pytest.raises(SchemaError, match="char_index"):
            deserialize_article(json.dumps(data))

    def test_bad_trailing_whitespace(self):
        data = self.base()
        data["elements"] = [{"type": "paragraph", "sentences": [{
            "text": "x", "translated_text": None, "trailing_whitespace": "  ",
            "citations": [], "citations_needed": []}]}]
        with pytest.raises(SchemaError, match="trailing_whitespace"):
            deserialize_article(json.dumps(data))

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            deserialize_article("{nope")


class TestHash:
    def test_empty_inputs(self):
        # sha256 of the single newline separator byte
        assert compute_hash("", "") == (
            "01ba4719c80b6fe911b091a7c05124b64eeece964e09c058ef8f9805daca546b")

    def test_title_and_code(self):
        # sha256 of b"A\nB"
        assert compute_hash("A", "B") == (
            "23519a43c66b4c342f25b32e09797ec5f3fc0be388cd8243fb3449afbdce4013")

    def test_deterministic(self):
        assert compute_hash("Ж", "文") == compute_hash("Ж", "文")
        assert len(compute_hash("x", "y")) == 64
