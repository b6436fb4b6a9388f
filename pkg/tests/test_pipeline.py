import json
from pathlib import Path

import pytest

from dumputil import make_dump
from mockhttp import JsonApiServer, MockServer
from wikicite import pipeline
from wikicite.pipeline import (
    RunConfig,
    TranslationPathError,
    build_delta_state,
    delta_select,
    extract_translatables,
    ingest_delta,
    insert_translations,
    read_translatables,
    run_delta,
    run_pipeline,
    write_translatables,
)
from wikicite.excerpts import iter_citations
from wikicite.ingest import RawPage
from wikicite.schema import compute_hash, read_chunk


@pytest.fixture(scope="module")
def web():
    with MockServer() as srv:
        yield srv


@pytest.fixture(scope="module")
def api():
    with JsonApiServer() as srv:
        srv.responses["titles="] = [(200, {"batchcomplete": True, "query": {"pages": [{
            "pageid": 1, "ns": 0, "title": "x",
            "langlinks": [{"lang": "fr", "title": "Chose"}],
            "revisions": [{"timestamp": "2020-01-02T03:04:05Z"}],
        }]}})]
        yield srv


def fixture_pages(web, n_plain=7):
    pages = [
        ("Alpha", "Alpha studies stars.<ref>{{cite web|url=%s/ok}}</ref> "
                  "They shine brightly.\n\n== Works ==\nListed below." % web.url("")),
        ("Beta", "Beta reports news.<ref>{{cite web|url=%s/e404}}</ref>" % web.url("")),
        ("Redirect page", "#REDIRECT [[Alpha]]"),
        ("Category:Things", "Category body."),
        ("Stubby", "{{website-stub}} tiny page"),
    ]
    for i in range(n_plain):
        pages.append((f"Plain {i}", f"Content number {i}. It has sentences. Three of them."))
    return pages


def write_dump(tmp_path, pages, name="dump.xml"):
    path = tmp_path / name
    path.write_bytes(make_dump(pages))
    return path


def config_for(tmp_path, dump_path, web=None, api=None, stages=pipeline.STAGES, **kw):
    return RunConfig(
        language="en",
        out_dir=str(tmp_path / "out"),
        dump=str(dump_path),
        stages=stages,
        scrape_policy={"timeout_seconds": 5.0, "per_host_delay": 0.001, "max_concurrent": 4},
        api_url=api.url("/w/api.php") if api else None,
        enrich_rate=500.0,
        workers=2,
        chunk_size=4,
        **kw,
    )


class TestRunPipeline:
    def test_stage_subset_only_builds_those_dirs(self, tmp_path, web):
        dump = write_dump(tmp_path, fixture_pages(web))
        config = config_for(tmp_path, dump, stages=("ingest", "parse"))
        report = run_pipeline(config)
        lang_dir = tmp_path / "out" / "en"
        assert (lang_dir / "chunks").is_dir()
        assert (lang_dir / "parsed").is_dir()
        assert not (lang_dir / "scraped").exists()
        assert not (lang_dir / "scored").exists()
        assert report.stages["parse"].done == 3  # 9 kept pages / chunk_size 4

    def test_filtering_applied_at_ingest(self, tmp_path, web):
        dump = write_dump(tmp_path, fixture_pages(web))
        run_pipeline(config_for(tmp_path, dump, stages=("ingest",)))
        titles = []
        for chunk in sorted((tmp_path / "out" / "en" / "chunks").glob("chunk_*.jsonl")):
            titles += [a.title for a in read_chunk(chunk)]
        assert "Redirect page" not in titles
        assert "Category:Things" not in titles
        assert "Stubby" not in titles
        assert titles[0] == "Alpha"
        assert len(titles) == 9

    def test_full_run_produces_scored_enriched_corpus(self, tmp_path, web, api):
        dump = write_dump(tmp_path, fixture_pages(web))
        config = config_for(tmp_path, dump, web=web, api=api)
        report = run_pipeline(config)
        final = tmp_path / "out" / "en" / "enriched"
        articles = []
        for chunk in sorted(final.glob("chunk_*.jsonl")):
            articles += read_chunk(chunk)
        assert len(articles) == 9
        by_title = {a.title: a for a in articles}
        alpha_cites = list(iter_citations(by_title["Alpha"]))
        assert alpha_cites[0].source_text is not None
        assert alpha_cites[0].source_quality_raw_score is not None
        assert alpha_cites[0].source_quality_label in (1, 2, 3, 4, 5)
        beta_cites = list(iter_citations(by_title["Beta"]))
        assert beta_cites[0].source_extract_error == "HTTP 404 (not found)"
        assert beta_cites[0].source_quality_raw_score is None
        for a in articles:
            assert a.cross_lingual_links == {"fr": "Chose"}
            assert a.first_revision == "2020-01-02T03:04:05Z"
        assert not any(report.stages[s].failed for s in report.stages)

    def test_rerun_is_idempotent_and_skips_all(self, tmp_path, web, api):
        dump = write_dump(tmp_path, fixture_pages(web))
        config = config_for(tmp_path, dump, web=web, api=api)
        run_pipeline(config)
        lang_dir = tmp_path / "out" / "en"
        before = {p: p.read_bytes() for d in ("chunks", "parsed", "scraped", "scored", "enriched")
                  for p in sorted((lang_dir / d).glob("chunk_*.jsonl"))}
        web_calls = len(web.request_log)
        api_calls = len(api.request_log)
        report = run_pipeline(config)
        for stage in ("parse", "scrape", "quality", "enrich"):
            assert report.stages[stage].done == 0
            assert report.stages[stage].skipped == 3
        assert len(web.request_log) == web_calls
        assert len(api.request_log) == api_calls
        after = {p: p.read_bytes() for d in ("chunks", "parsed", "scraped", "scored", "enriched")
                 for p in sorted((lang_dir / d).glob("chunk_*.jsonl"))}
        assert before == after

    def test_failing_chunk_fails_alone(self, tmp_path, web):
        dump = write_dump(tmp_path, fixture_pages(web))
        config = config_for(tmp_path, dump, stages=("ingest",))
        run_pipeline(config)
        chunks_dir = tmp_path / "out" / "en" / "chunks"
        bad = chunks_dir / "chunk_00001.jsonl"
        bad.write_text("{not json}\n", encoding="utf-8")
        report = run_pipeline(config_for(tmp_path, dump, stages=("parse",)))
        assert report.stages["parse"].failed == ["chunk_00001.jsonl"]
        assert report.stages["parse"].done == 2


class TestDelta:
    def base_pages(self):
        return [(f"Title {i}", f"Original body {i}. With sentences.") for i in range(10)]

    def test_delta_select_identical(self):
        pages = [RawPage(t, w, "2024-05-01T00:00:00Z", i)
                 for i, (t, w) in enumerate(self.base_pages())]
        prev = {p.title: compute_hash(p.title, p.wikicode) for p in pages}
        to_process, carried = delta_select(prev, pages)
        assert to_process == []
        assert len(carried) == 10

    def test_delta_select_edit_and_add(self):
        pages = [RawPage(t, w, "2024-05-01T00:00:00Z", i)
                 for i, (t, w) in enumerate(self.base_pages())]
        prev = {p.title: compute_hash(p.title, p.wikicode) for p in pages}
        new_pages = list(pages)
        new_pages[3] = RawPage("Title 3", "Edited body.", "2024-06-01T00:00:00Z", 3)
        new_pages.append(RawPage("Brand New", "Fresh.", "2024-06-01T00:00:00Z", 10))
        to_process, carried = delta_select(prev, new_pages)
        assert to_process == ["Title 3", "Brand New"]
        assert len(carried) == 9
        assert set(to_process) | set(carried) == {p.title for p in new_pages}
        assert not set(to_process) & set(carried)

    def test_delta_run_carries_processed_records_verbatim(self, tmp_path, web, api):
        pages = fixture_pages(web)
        dump1 = write_dump(tmp_path, pages, "dump1.xml")
        config1 = config_for(tmp_path, dump1, web=web, api=api)
        run_pipeline(config1)
        prev_dir = str(tmp_path / "out")

        new_pages = [p for p in pages if p[0] != "Plain 6"]        # one removed
        new_pages[0] = ("Alpha", pages[0][1] + " Edited tail.")     # one edited
        new_pages.append(("Gamma", "Gamma is new. It just appeared."))  # one added
        dump2 = write_dump(tmp_path, new_pages, "dump2.xml")
        config2 = RunConfig(
            language="en", out_dir=str(tmp_path / "out2"), dump=str(dump2),
            scrape_policy={"timeout_seconds": 5.0, "per_host_delay": 0.001},
            api_url=api.url("/w/api.php"), enrich_rate=500.0, chunk_size=4,
            prev_dir=prev_dir)
        report, to_process, carried = run_delta(config2)
        assert sorted(to_process) == ["Alpha", "Gamma"]
        assert len(carried) == 7  # 9 kept in dump2 minus the edited and added

        prev_lines = {}
        for chunk in sorted((tmp_path / "out" / "en" / "enriched").glob("chunk_*.jsonl")):
            for line in chunk.read_text().splitlines():
                prev_lines[json.loads(line)["title"]] = line
        new_lines = {}
        for chunk in sorted((tmp_path / "out2" / "en" / "enriched").glob("chunk_*.jsonl")):
            for line in chunk.read_text().splitlines():
                new_lines[json.loads(line)["title"]] = line
        for title in carried:
            assert new_lines[title] == prev_lines[title]
        assert "Gamma" in new_lines
        beta = json.loads(new_lines["Beta"])
        prev_beta = json.loads(prev_lines["Beta"])
        assert beta["elements"] == prev_beta["elements"]  # scraped fields reused

    def test_delta_rerun_identical_dump_zero_to_process(self, tmp_path, web, api):
        pages = fixture_pages(web)
        dump1 = write_dump(tmp_path, pages, "dump1.xml")
        run_pipeline(config_for(tmp_path, dump1, web=web, api=api))
        config2 = RunConfig(
            language="en", out_dir=str(tmp_path / "out3"), dump=str(dump1),
            scrape_policy={"timeout_seconds": 5.0, "per_host_delay": 0.001},
            api_url=api.url("/w/api.php"), enrich_rate=500.0, chunk_size=4,
            prev_dir=str(tmp_path / "out"))
        web_calls = len(web.request_log)
        api_calls = len(api.request_log)
        report, to_process, carried = run_delta(config2)
        assert to_process == []
        assert len(carried) == 9
        assert len(web.request_log) == web_calls  # sources reused, not re-scraped
        assert len(api.request_log) == api_calls


class TestTranslationPlumbing:
    def chunk(self, tmp_path, web):
        dump = write_dump(tmp_path, fixture_pages(web, n_plain=2))
        run_pipeline(config_for(tmp_path, dump, stages=("ingest", "parse")))
        return next(iter(sorted((tmp_path / "out" / "en" / "parsed").glob("chunk_*.jsonl"))))

    def test_extract_one_record_per_heading_and_sentence(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = extract_translatables(chunk)
        articles = read_chunk(chunk)
        expected = 0
        for a in articles[:4]:
            for e in a.elements:
                if hasattr(e, "sentences"):
                    expected += len(e.sentences)
                elif hasattr(e, "level"):
                    expected += 1
        assert len([r for r in records if r.article_index < 4]) == expected
        for r in records:
            article = articles[r.article_index]
            element = article.elements[r.element_path[0]]
            if r.kind == "heading":
                assert element.text == r.text
            else:
                assert element.sentences[r.element_path[1]].text == r.text

    def test_identity_insert_changes_only_translated_text(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        before = read_chunk(chunk)
        records = extract_translatables(chunk)
        for r in records:
            r.translated_text = r.text
        inserted = insert_translations(chunk, records)
        after = read_chunk(chunk)
        assert inserted == len(records)
        for a_before, a_after in zip(before, after):
            assert a_before.title == a_after.title
            assert a_before.wikicode == a_after.wikicode
            for e_before, e_after in zip(a_before.elements, a_after.elements):
                if hasattr(e_before, "sentences"):
                    for s_before, s_after in zip(e_before.sentences, e_after.sentences):
                        assert s_after.translated_text == s_before.text
                        assert s_after.text == s_before.text
                        assert s_after.citations == s_before.citations
                elif hasattr(e_before, "level"):
                    assert e_after.translated_text == e_before.text

    def test_reverse_translator_round_trip_file(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = extract_translatables(chunk)
        path = tmp_path / "records.jsonl"
        write_translatables(records, path)
        loaded = read_translatables(path)
        assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]
        for r in loaded:
            r.translated_text = r.text[::-1]
        insert_translations(chunk, loaded)
        for a in read_chunk(chunk):
            for e in a.elements:
                if hasattr(e, "sentences"):
                    for s in e.sentences:
                        assert s.translated_text == s.text[::-1]

    def test_partial_insert_leaves_others_absent(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = [r for r in extract_translatables(chunk) if r.kind == "sentence"][:1]
        records[0].translated_text = "Only one."
        insert_translations(chunk, records)
        articles = read_chunk(chunk)
        translated = [s.translated_text
                      for a in articles for e in a.elements if hasattr(e, "sentences")
                      for s in e.sentences]
        assert translated.count("Only one.") == 1
        assert all(t is None for t in translated if t != "Only one.")

    def test_excerpt_translations_recomputed(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = extract_translatables(chunk)
        for r in records:
            r.translated_text = f"T:{r.text}"
        insert_translations(chunk, records)
        for a in read_chunk(chunk):
            for x in a.excerpts_with_citations:
                assert x.translated_text is not None
                assert x.translated_text.startswith("T:")

    def test_path_mismatch_names_record(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = extract_translatables(chunk)[:1]
        records[0].translated_text = "x"
        records[0].text = "does not match"
        with pytest.raises(TranslationPathError, match="text mismatch"):
            insert_translations(chunk, records)
        records[0].element_path = [999]
        with pytest.raises(TranslationPathError, match="999"):
            insert_translations(chunk, records)

    def test_missing_translation_rejected(self, tmp_path, web):
        chunk = self.chunk(tmp_path, web)
        records = extract_translatables(chunk)[:1]
        with pytest.raises(TranslationPathError, match="translated_text"):
            insert_translations(chunk, records)
