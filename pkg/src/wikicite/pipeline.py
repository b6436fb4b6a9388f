"""Staged, resumable pipeline over chunk files.

Stages run in dependency order (ingest, parse, scrape, quality, enrich);
each stage writes its outputs into its own per-language directory and
records a durable marker named after the stage, chunk, and input-content
hash.  Re-running skips chunks whose marker matches the current input, so
completed work is never redone and reruns are byte-stable.  A failing
chunk fails alone and is listed in the run report.

Delta mode compares a new dump against a previous run by article hash:
unchanged articles are carried forward verbatim (scraped sources,
translations, and enrichments included) and only new or edited articles
flow through the stages.
"""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .enrich import EnrichClient, enrich_chunk
from .excerpts import build_excerpts, iter_citations, map_citations
from .ingest import (
    CHUNK_NAME,
    DuplicateRunError,
    RawPage,
    fetch_dump,
    read_manifest,
    should_filter,
    stream_pages,
    write_chunks,
)
from .langconfig import LanguageConfig, load_language_config
from .quality import QualityThresholds, apply_thresholds, default_thresholds, heuristic_score, score_remote
from .schema import (
    Article,
    Heading,
    Paragraph,
    compute_hash,
    deserialize_article,
    read_chunk,
    serialize_article,
    write_chunk_file,
)
from .scrape import ScrapePolicy, scrape_articles
from .wikitext import article_from_wikitext

log = logging.getLogger(__name__)

STAGES = ("ingest", "parse", "scrape", "quality", "enrich")
STAGE_DIRS = {"ingest": "chunks", "parse": "parsed", "scrape": "scraped",
              "quality": "scored", "enrich": "enriched"}
STATE_DIR = ".state"


@dataclass
class RunConfig:
    language: str
    out_dir: str
    dump: str | None = None
    stages: tuple[str, ...] = STAGES
    lang_config: str | None = None
    scrape_policy: dict = field(default_factory=dict)
    quality_endpoint: str | None = None
    thresholds_path: str | None = None
    api_url: str | None = None
    enrich_rate: float = 1.0
    workers: int = 4
    chunk_size: int = 1000
    prev_dir: str | None = None

    def __post_init__(self):
        unknown = [s for s in self.stages if s not in STAGES]
        if unknown:
            raise ValueError(f"unknown stages: {unknown}")
        self.stages = tuple(s for s in STAGES if s in self.stages)

    @classmethod
    def from_json(cls, path: str | Path) -> "RunConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data.get("stages"), str):
            data["stages"] = tuple(s.strip() for s in data["stages"].split(",") if s.strip())
        elif isinstance(data.get("stages"), list):
            data["stages"] = tuple(data["stages"])
        return cls(**data)

    def policy(self) -> ScrapePolicy:
        return ScrapePolicy.from_dict(self.scrape_policy) if self.scrape_policy else ScrapePolicy()

    def thresholds(self) -> QualityThresholds:
        if self.thresholds_path:
            return QualityThresholds.load(self.thresholds_path)
        return default_thresholds()

    def language_config(self) -> LanguageConfig:
        return load_language_config(self.lang_config or self.language)


@dataclass
class StageOutcome:
    done: int = 0
    skipped: int = 0
    failed: list[str] = field(default_factory=list)
    warnings: int = 0


@dataclass
class RunReport:
    stages: dict[str, StageOutcome] = field(default_factory=dict)

    def outcome(self, stage: str) -> StageOutcome:
        return self.stages.setdefault(stage, StageOutcome())

    def to_dict(self) -> dict:
        return {stage: asdict(outcome) for stage, outcome in self.stages.items()}


# -- durable targets ----------------------------------------------------------


def _file_hash(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()[:16]


def _marker_path(lang_dir: Path, stage: str, chunk_name: str, input_hash: str) -> Path:
    return lang_dir / STATE_DIR / f"{stage}__{chunk_name}__{input_hash}.json"


def _is_done(lang_dir: Path, stage: str, chunk_name: str, input_hash: str, out_path: Path) -> bool:
    return _marker_path(lang_dir, stage, chunk_name, input_hash).exists() and out_path.exists()


def _mark_done(lang_dir: Path, stage: str, chunk_name: str, input_hash: str, payload: dict) -> None:
    marker = _marker_path(lang_dir, stage, chunk_name, input_hash)
    marker.parent.mkdir(parents=True, exist_ok=True)
    marker.write_text(json.dumps(payload), encoding="utf-8")


def _input_dir(lang_dir: Path, stage: str) -> Path:
    """Output dir of the nearest preceding stage that has been produced."""
    for prior in reversed(STAGES[:STAGES.index(stage)]):
        candidate = lang_dir / STAGE_DIRS[prior]
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no input chunks found for stage {stage!r} under {lang_dir}")


def final_chunk_dir(lang_dir: Path) -> Path:
    for stage in reversed(STAGES):
        candidate = lang_dir / STAGE_DIRS[stage]
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no chunk outputs under {lang_dir}")


# -- per-chunk stage transforms --------------------------------------------------


def _needs_parse(article: Article) -> bool:
    return not article.elements and not article.text


def parse_chunk_file(in_path: Path, out_path: Path, config: LanguageConfig) -> int:
    """Parse skeleton articles into full records; returns parse warnings.

    Already-parsed articles (delta carry-forward) pass through untouched.
    """
    warnings = 0
    out: list[Article] = []
    for article in read_chunk(in_path):
        if _needs_parse(article):
            parsed, report = article_from_wikitext(
                article.title, article.wikicode, article.last_revision, config)
            warnings += report.warnings + report.degraded_blocks
            parsed = replace(
                parsed,
                first_revision=article.first_revision,
                first_revision_access_date=article.first_revision_access_date,
                cross_lingual_links=article.cross_lingual_links,
                cross_lingual_links_access_date=article.cross_lingual_links_access_date,
            )
            out.append(parsed)
        else:
            out.append(article)
    write_chunk_file(out_path, out)
    return warnings


def scrape_chunk_file(in_path: Path, out_path: Path, policy: ScrapePolicy,
                      session_factory=None) -> int:
    articles = read_chunk(in_path)
    updated, stats = scrape_articles(articles, policy, session_factory=session_factory)
    write_chunk_file(out_path, updated)
    return stats.download_error + stats.extract_error


def make_scorer(endpoint: str | None, thresholds: QualityThresholds) -> Callable[[list[str]], list[tuple[float, int]]]:
    """Batch scorer: remote service when configured, else native heuristic."""
    if endpoint:
        return lambda texts: score_remote(texts, endpoint, thresholds)
    return lambda texts: [
        (score, apply_thresholds(score, thresholds))
        for score in (heuristic_score(t) for t in texts)
    ]


def quality_chunk_file(in_path: Path, out_path: Path,
                       scorer: Callable[[list[str]], list[tuple[float, int]]]) -> int:
    """Score every scraped-but-unscored source text in a chunk."""
    articles = read_chunk(in_path)
    pending: list[str] = []
    for article in articles:
        for c in iter_citations(article):
            if c.source_text is not None and c.source_quality_raw_score is None:
                pending.append(c.source_text)
    results = iter(scorer(pending))

    def fill(c):
        if c.source_text is not None and c.source_quality_raw_score is None:
            raw, label = next(results)
            return replace(c, source_quality_raw_score=raw, source_quality_label=label)
        return c

    write_chunk_file(out_path, [map_citations(a, fill) for a in articles])
    return len(pending)


# -- orchestration ----------------------------------------------------------------


def _run_chunk_stage(
    stage: str,
    lang_dir: Path,
    chunk_names: Sequence[str],
    transform: Callable[[Path, Path], int],
    report: RunReport,
    workers: int = 1,
) -> None:
    outcome = report.outcome(stage)
    in_dir = _input_dir(lang_dir, stage)
    out_dir = lang_dir / STAGE_DIRS[stage]
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(chunk_name: str):
        in_path = in_dir / chunk_name
        out_path = out_dir / chunk_name
        input_hash = _file_hash(in_path)
        if _is_done(lang_dir, stage, chunk_name, input_hash, out_path):
            outcome.skipped += 1
            return
        try:
            warnings = transform(in_path, out_path)
        except Exception:
            log.exception("%s failed for %s", stage, chunk_name)
            outcome.failed.append(chunk_name)
            return
        outcome.warnings += warnings
        outcome.done += 1
        _mark_done(lang_dir, stage, chunk_name, input_hash, {"warnings": warnings})

    if workers > 1 and len(chunk_names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, chunk_names))
    else:
        for name in chunk_names:
            one(name)


def _ingest_stage(config: RunConfig, lang_dir: Path, report: RunReport,
                  page_filter: Callable[[RawPage], bool] = should_filter) -> None:
    outcome = report.outcome("ingest")
    assert config.dump, "ingest stage requires a dump path or URL"
    dump_path = fetch_dump(config.dump, lang_dir / "downloads")
    dump_hash = _file_hash(dump_path)
    marker = lang_dir / STATE_DIR / f"ingest__dump__{dump_hash}.json"
    if marker.exists() and read_manifest(lang_dir / STAGE_DIRS["ingest"]) is not None:
        outcome.skipped += 1
        return
    pages = (p for p in stream_pages(dump_path) if not page_filter(p))
    manifest = write_chunks(pages, lang_dir / STAGE_DIRS["ingest"], config.language,
                            chunk_size=config.chunk_size, overwrite=True)
    # chunks live at <lang_dir>/chunks/<language>/: flatten to <lang_dir>/chunks
    nested = lang_dir / STAGE_DIRS["ingest"] / config.language
    for item in nested.iterdir():
        item.rename(lang_dir / STAGE_DIRS["ingest"] / item.name)
    nested.rmdir()
    outcome.done = len(manifest.chunk_paths)
    marker.parent.mkdir(parents=True, exist_ok=True)
    marker.write_text(json.dumps({"chunks": manifest.chunk_paths,
                                  "articles": manifest.article_count}), encoding="utf-8")


def _chunk_names(lang_dir: Path) -> list[str]:
    manifest = read_manifest(lang_dir / STAGE_DIRS["ingest"])
    if manifest is not None:
        return list(manifest.chunk_paths)
    ingest_dir = lang_dir / STAGE_DIRS["ingest"]
    return sorted(p.name for p in ingest_dir.glob("chunk_*.jsonl"))


def run_pipeline(config: RunConfig, session_factory=None) -> RunReport:
    """Execute the configured stages in dependency order; see module doc."""
    report = RunReport()
    lang_dir = Path(config.out_dir) / config.language
    lang_dir.mkdir(parents=True, exist_ok=True)
    if "ingest" in config.stages:
        _ingest_stage(config, lang_dir, report)
    chunk_names = _chunk_names(lang_dir)
    if "parse" in config.stages:
        lang_config = config.language_config()
        _run_chunk_stage(
            "parse", lang_dir, chunk_names,
            lambda i, o: parse_chunk_file(i, o, lang_config),
            report, workers=config.workers)
    if "scrape" in config.stages:
        policy = config.policy()
        _run_chunk_stage(
            "scrape", lang_dir, chunk_names,
            lambda i, o: scrape_chunk_file(i, o, policy, session_factory),
            report, workers=config.workers)
    if "quality" in config.stages:
        scorer = make_scorer(config.quality_endpoint, config.thresholds())
        _run_chunk_stage(
            "quality", lang_dir, chunk_names,
            lambda i, o: quality_chunk_file(i, o, scorer),
            report, workers=config.workers)
    if "enrich" in config.stages:
        # Action API rate limits force this stage serial, one chunk at a
        # time, with one paced client across the whole run
        client = EnrichClient(config.api_url, config.enrich_rate)

        def enrich_transform(in_path: Path, out_path: Path) -> int:
            before = client.stats.articles_failed
            enrich_chunk(in_path, client, language=config.language, out_path=out_path)
            return client.stats.articles_failed - before

        _run_chunk_stage("enrich", lang_dir, chunk_names, enrich_transform, report, workers=1)
    return report


# -- delta mode --------------------------------------------------------------------


def build_delta_state(chunk_dir: str | Path) -> dict[str, str]:
    """Map title -> hash for every article in a processed chunk directory."""
    state: dict[str, str] = {}
    for path in sorted(Path(chunk_dir).glob("chunk_*.jsonl")):
        with open(path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    record = json.loads(line)
                    state[record["title"]] = record["hash"]
    return state


def delta_select(prev: dict[str, str], new_pages: Iterable[RawPage]) -> tuple[list[str], list[str]]:
    """Split new-dump titles into (to_process, carried_forward) by hash."""
    to_process: list[str] = []
    carried: list[str] = []
    for page in new_pages:
        if prev.get(page.title) == compute_hash(page.title, page.wikicode):
            carried.append(page.title)
        else:
            to_process.append(page.title)
    return to_process, carried


def _raw_lines_by_title(chunk_dir: Path) -> dict[str, str]:
    lines: dict[str, str] = {}
    for path in sorted(chunk_dir.glob("chunk_*.jsonl")):
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if line:
                    lines[json.loads(line)["title"]] = line
    return lines


def ingest_delta(config: RunConfig, page_filter: Callable[[RawPage], bool] = should_filter) -> tuple[list[str], list[str]]:
    """Delta-mode ingest: write new chunk files reusing prior processed
    records (verbatim lines) for articles whose hash is unchanged.

    Returns (to_process, carried_forward) titles.  Subsequent stages skip
    carried articles naturally because their records are already complete.
    """
    assert config.dump and config.prev_dir
    lang_dir = Path(config.out_dir) / config.language
    prev_final = final_chunk_dir(Path(config.prev_dir) / config.language)
    prev_state = build_delta_state(prev_final)
    prev_lines = _raw_lines_by_title(prev_final)
    pages = [p for p in stream_pages(config.dump) if not page_filter(p)]
    to_process, carried = delta_select(prev_state, pages)
    carried_set = set(carried)
    out_dir = lang_dir / STAGE_DIRS["ingest"]
    out_dir.mkdir(parents=True, exist_ok=True)
    chunk_paths: list[str] = []
    for index in range(0, len(pages), config.chunk_size):
        name = CHUNK_NAME % (index // config.chunk_size)
        with open(out_dir / name, "w", encoding="utf-8") as f:
            for page in pages[index:index + config.chunk_size]:
                if page.title in carried_set:
                    f.write(prev_lines[page.title])
                    f.write("\n")
                else:
                    f.write(serialize_article(Article(
                        title=page.title, wikicode=page.wikicode,
                        hash=compute_hash(page.title, page.wikicode),
                        last_revision=page.last_revision)))
                    f.write("\n")
        chunk_paths.append(name)
    (out_dir / "manifest.json").write_text(json.dumps({
        "language": config.language, "chunk_paths": chunk_paths,
        "article_count": len(pages)}, indent=2), encoding="utf-8")
    return to_process, carried


def run_delta(config: RunConfig, session_factory=None) -> tuple[RunReport, list[str], list[str]]:
    """Full delta run: delta ingest, then the remaining configured stages."""
    to_process, carried = ingest_delta(config)
    rest = tuple(s for s in config.stages if s != "ingest")
    sub = replace(config, stages=rest) if rest else config
    report = run_pipeline(sub, session_factory=session_factory) if rest else RunReport()
    report.outcome("ingest").done = len(to_process)
    report.outcome("ingest").skipped = len(carried)
    return report, to_process, carried


# -- translation plumbing ------------------------------------------------------------


@dataclass
class TranslatableRecord:
    chunk_id: str
    article_index: int
    element_path: list[int]
    kind: str  # "heading" | "sentence"
    text: str
    translated_text: str | None = None

    def to_dict(self) -> dict:
        return {"chunk_id": self.chunk_id, "article_index": self.article_index,
                "element_path": self.element_path, "kind": self.kind,
                "text": self.text, "translated_text": self.translated_text}

    @classmethod
    def from_dict(cls, data: dict) -> "TranslatableRecord":
        return cls(chunk_id=data["chunk_id"], article_index=data["article_index"],
                   element_path=list(data["element_path"]), kind=data["kind"],
                   text=data["text"], translated_text=data.get("translated_text"))


def extract_translatables(chunk_path: str | Path) -> list[TranslatableRecord]:
    """One record per heading and per sentence, in document order."""
    chunk_path = Path(chunk_path)
    chunk_id = chunk_path.stem
    records: list[TranslatableRecord] = []
    for index, article in enumerate(read_chunk(chunk_path)):
        for ei, element in enumerate(article.elements):
            if isinstance(element, Heading):
                records.append(TranslatableRecord(
                    chunk_id=chunk_id, article_index=index, element_path=[ei],
                    kind="heading", text=element.text))
            elif isinstance(element, Paragraph):
                for si, sentence in enumerate(element.sentences):
                    records.append(TranslatableRecord(
                        chunk_id=chunk_id, article_index=index, element_path=[ei, si],
                        kind="sentence", text=sentence.text))
    return records


def write_translatables(records: Sequence[TranslatableRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r.to_dict(), ensure_ascii=False))
            f.write("\n")


def read_translatables(path: str | Path) -> list[TranslatableRecord]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(TranslatableRecord.from_dict(json.loads(line)))
    return out


class TranslationPathError(ValueError):
    """A record's element_path does not resolve to the text it claims."""


def insert_translations(chunk_path: str | Path, records: Sequence[TranslatableRecord],
                        out_path: str | Path | None = None) -> int:
    """Write records' translated_text back into their articles.

    Articles without records keep their fields; excerpt translated_texts
    are recomputed from the updated sentences.  Returns the number of
    translations inserted.
    """
    chunk_path = Path(chunk_path)
    articles = read_chunk(chunk_path)
    by_article: dict[int, list[TranslatableRecord]] = {}
    for r in records:
        if r.translated_text is None:
            raise TranslationPathError(f"record {r.chunk_id}[{r.article_index}]"
                                       f"{r.element_path} has no translated_text")
        by_article.setdefault(r.article_index, []).append(r)
    inserted = 0
    for index, group in by_article.items():
        if not 0 <= index < len(articles):
            raise TranslationPathError(f"article_index {index} out of range")
        article = articles[index]
        elements = list(article.elements)
        for r in group:
            name = f"{r.chunk_id}[{r.article_index}]{r.element_path}"
            ei = r.element_path[0] if r.element_path else -1
            if not 0 <= ei < len(elements):
                raise TranslationPathError(f"{name}: element index out of range")
            element = elements[ei]
            if r.kind == "heading":
                if not isinstance(element, Heading) or len(r.element_path) != 1:
                    raise TranslationPathError(f"{name}: path does not address a heading")
                if element.text != r.text:
                    raise TranslationPathError(f"{name}: text mismatch")
                elements[ei] = replace(element, translated_text=r.translated_text)
            elif r.kind == "sentence":
                if not isinstance(element, Paragraph) or len(r.element_path) != 2:
                    raise TranslationPathError(f"{name}: path does not address a sentence")
                si = r.element_path[1]
                if not 0 <= si < len(element.sentences):
                    raise TranslationPathError(f"{name}: sentence index out of range")
                sentence = element.sentences[si]
                if sentence.text != r.text:
                    raise TranslationPathError(f"{name}: text mismatch")
                sentences = list(element.sentences)
                sentences[si] = replace(sentence, translated_text=r.translated_text)
                elements[ei] = Paragraph(sentences=sentences)
                element = elements[ei]
            else:
                raise TranslationPathError(f"{name}: unknown kind {r.kind!r}")
            inserted += 1
        articles[index] = replace(article, elements=elements,
                                  excerpts_with_citations=build_excerpts(elements))
    write_chunk_file(Path(out_path) if out_path else chunk_path, articles)
    return inserted


def identity_translator(batch: Sequence[str], source_lang: str) -> list[str]:
    return list(batch)


def reverse_translator(batch: Sequence[str], source_lang: str) -> list[str]:
    return [t[::-1] for t in batch]


TRANSLATORS = {"identity": identity_translator, "reverse": reverse_translator}
