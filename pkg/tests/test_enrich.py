import time

import pytest

from mockhttp import JsonApiServer
from wikicite.enrich import (
    EnrichClient,
    EnrichmentError,
    MalformedResponse,
    enrich_chunk,
    fetch_first_revision,
    fetch_langlinks,
)
from wikicite.ingest import RawPage, skeleton_article
from wikicite.schema import read_chunk, serialize_article, write_chunk_file


def page_payload(title, langlinks=None, timestamp="2023-09-04T08:19:40Z"):
    page = {"pageid": 1, "ns": 0, "title": title}
    if langlinks is not None:
        page["langlinks"] = langlinks
    if timestamp is not None:
        page["revisions"] = [{"timestamp": timestamp}]
    return {"batchcomplete": True, "query": {"pages": [page]}}


MISSING = {"batchcomplete": True, "query": {"pages": [{"ns": 0, "title": "Nope", "missing": True}]}}


def fast_client(api, **kw):
    kw.setdefault("rate_per_second", 200.0)
    kw.setdefault("backoff_base", 0.05)
    return EnrichClient(api.url("/w/api.php"), **kw)


class TestFetchLanglinks:
    def test_links_extracted(self):
        with JsonApiServer() as api:
            api.responses["titles=Les+Hauts"] = [(200, page_payload(
                "Les Hauts de Hurlevent",
                langlinks=[{"lang": "en", "title": "Wuthering Heights"},
                           {"lang": "es", "title": "Cumbres Borrascosas"}]))]
            result = fast_client(api).fetch_langlinks("Les Hauts de Hurlevent", "fr")
        assert result.links == {"en": "Wuthering Heights", "es": "Cumbres Borrascosas"}
        assert result.access_date.endswith("Z")

    def test_no_langlinks_empty_map(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("Lonely"))]
            result = fast_client(api).fetch_langlinks("Lonely", "en")
        assert result.links == {}
        assert result.access_date

    def test_missing_page_absent(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, MISSING)]
            assert fast_client(api).fetch_langlinks("Nope", "en") is None

    def test_self_language_and_sister_codes_dropped(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("T", langlinks=[
                {"lang": "en", "title": "Self"}, {"lang": "simple", "title": "Simple"},
                {"lang": "de", "title": "Ding"}]))]
            result = fast_client(api).fetch_langlinks("T", "en")
        assert result.links == {"de": "Ding"}

    def test_module_level_helper(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("T", langlinks=[]))]
            result = fetch_langlinks("T", "en", api.url("/w/api.php"))
        assert result.links == {}

    def test_continuation_followed(self):
        with JsonApiServer() as api:
            first = page_payload("T", langlinks=[{"lang": "de", "title": "Eins"}])
            first["continue"] = {"llcontinue": "1|x", "continue": "||"}
            second = page_payload("T", langlinks=[{"lang": "fr", "title": "Un"}])
            api.responses["titles="] = [(200, first), (200, second)]
            result = fast_client(api).fetch_langlinks("T", "en")
        assert result.links == {"de": "Eins", "fr": "Un"}


class TestFetchFirstRevision:
    def test_timestamp_extracted(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("T"))]
            info = fast_client(api).fetch_first_revision("T", "en")
        assert info.first_revision == "2023-09-04T08:19:40Z"
        assert info.first_revision <= info.access_date

    def test_missing_page(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, MISSING)]
            assert fast_client(api).fetch_first_revision("Nope", "en") is None

    def test_malformed_timestamp_is_protocol_error(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("T", timestamp="yesterday"))]
            with pytest.raises(MalformedResponse):
                fast_client(api).fetch_first_revision("T", "en")

    def test_module_level_helper(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("T"))]
            info = fetch_first_revision("T", "en", api.url("/w/api.php"))
        assert info.first_revision == "2023-09-04T08:19:40Z"


class TestRetries:
    def test_429_then_200_retries_once(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(429, {}), (200, page_payload("T"))]
            client = fast_client(api)
            info = client.fetch_first_revision("T", "en")
        assert info is not None
        assert client.stats.retries == 1

    def test_gives_up_after_max_attempts(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(500, {})]
            client = fast_client(api, max_attempts=3)
            with pytest.raises(EnrichmentError, match="3 attempts"):
                client.fetch_first_revision("T", "en")
        assert client.stats.retries == 2

    def test_no_redirect_resolution_requested(self):
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload(
                "Redirect Title", langlinks=[{"lang": "de", "title": "Weiterleitung"}]))]
            result = fast_client(api).fetch_langlinks("Redirect Title", "en")
            paths = [p for p, _t in api.request_log]
        assert result.links == {"de": "Weiterleitung"}
        assert all("redirects" not in p for p in paths)


def chunk_of(tmp_path, titles):
    articles = [skeleton_article(RawPage(t, f"wikicode {t}", "2024-05-01T00:00:00Z", i))
                for i, t in enumerate(titles)]
    path = tmp_path / "en" / "chunk_00000.jsonl"
    path.parent.mkdir(parents=True)
    write_chunk_file(path, articles)
    return path


class TestEnrichChunk:
    def test_all_articles_enriched_in_order(self, tmp_path):
        path = chunk_of(tmp_path, ["A", "B", "C"])
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("x", langlinks=[
                {"lang": "fr", "title": "X"}]))]
            stats = enrich_chunk(path, fast_client(api), language="en")
        articles = read_chunk(path)
        assert stats.articles_enriched == 3
        assert [a.title for a in articles] == ["A", "B", "C"]
        for a in articles:
            assert a.cross_lingual_links == {"fr": "X"}
            assert a.first_revision == "2023-09-04T08:19:40Z"
            assert a.first_revision_access_date is not None

    def test_rerun_makes_zero_api_calls(self, tmp_path):
        path = chunk_of(tmp_path, ["A", "B"])
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("x"))]
            enrich_chunk(path, fast_client(api), language="en")
            first_pass = read_chunk(path)
            calls_before = len(api.request_log)
            client = fast_client(api)
            stats = enrich_chunk(path, client, language="en")
            assert len(api.request_log) == calls_before
        assert stats.api_calls == 0
        assert stats.articles_skipped == 2
        assert read_chunk(path) == first_pass

    def test_idempotent_byte_identical(self, tmp_path):
        path = chunk_of(tmp_path, ["A"])
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("x"))]
            enrich_chunk(path, fast_client(api), language="en")
            once = path.read_bytes()
            enrich_chunk(path, fast_client(api), language="en")
        assert path.read_bytes() == once

    def test_failures_leave_fields_absent(self, tmp_path):
        path = chunk_of(tmp_path, ["A"])
        with JsonApiServer() as api:
            api.responses["titles="] = [(500, {})]
            stats = enrich_chunk(path, fast_client(api, max_attempts=2), language="en")
        article = read_chunk(path)[0]
        assert stats.articles_failed == 1
        assert article.cross_lingual_links is None
        assert article.first_revision is None

    def test_rate_pacing_spacing(self, tmp_path):
        path = chunk_of(tmp_path, [f"T{i}" for i in range(6)])
        with JsonApiServer() as api:
            api.responses["titles="] = [(200, page_payload("x"))]
            client = EnrichClient(api.url("/w/api.php"), rate_per_second=10.0)
            start = time.monotonic()
            enrich_chunk(path, client, language="en")
            elapsed = time.monotonic() - start
            times = sorted(t for _p, t in api.request_log)
        assert elapsed >= 0.5  # 6 calls at 10/s: 5 gaps of 0.1s
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert all(g >= 0.099 for g in gaps), gaps
        # never more than `rate` request starts in any 1-second window
        for t0 in times:
            assert sum(1 for t in times if t0 <= t < t0 + 1.0) <= 10
