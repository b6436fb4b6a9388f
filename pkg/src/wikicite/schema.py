"""Corpus record types and their JSON-lines serialization.

Single source of truth for the shapes written to chunk files: one Article
per line, snake_case field names, absent optional fields encoded as JSON
null.  Deserialization is strict: unknown fields, bad discriminators, and
out-of-range values raise SchemaError with the offending field path.

All types are frozen dataclasses; pipeline stages produce updated copies
via dataclasses.replace instead of mutating records in place.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional, Union


class SchemaError(ValueError):
    """A JSON document does not conform to the chunk-file schema."""

    def __init__(self, path: str, message: str):
        self.path = path or "<root>"
        super().__init__(f"{self.path}: {message}")


@dataclass(frozen=True)
class Citation:
    """A reference marker located inside a sentence, heading, or excerpt.

    char_index counts Unicode code points of the enclosing cleaned text and
    marks where the citation stood after markup removal.  The source_*
    fields are filled by the scraping and quality stages; source_text,
    source_download_error, and source_extract_error are mutually exclusive.
    source_code_num_bytes is reserved and always serialized as null.
    """

    content: str
    char_index: int
    name: Optional[str] = None
    url: Optional[str] = None
    source_text: Optional[str] = None
    source_code_content_type: Optional[str] = None
    source_code_num_bytes: Optional[int] = None
    source_code_num_chars: Optional[int] = None
    source_download_date: Optional[str] = None
    source_download_error: Optional[str] = None
    source_extract_error: Optional[str] = None
    source_snippet: Optional[str] = None
    source_quality_label: Optional[int] = None
    source_quality_raw_score: Optional[float] = None


@dataclass(frozen=True)
class CitationNeeded:
    """Editorial citation-needed marker with the same offset convention."""

    content: str
    char_index: int
    type: str = "citation-needed"


@dataclass(frozen=True)
class Sentence:
    """One sentence of a paragraph.

    Concatenating text + trailing_whitespace across a paragraph's sentences
    reproduces the paragraph's cleaned text exactly; trailing_whitespace is
    a single space when the sentence was followed by whitespace, else "".
    """

    text: str
    trailing_whitespace: str = ""
    translated_text: Optional[str] = None
    citations: list[Citation] = field(default_factory=list)
    citations_needed: list[CitationNeeded] = field(default_factory=list)


@dataclass(frozen=True)
class Heading:
    text: str
    level: int
    translated_text: Optional[str] = None
    citations: list[Citation] = field(default_factory=list)
    citations_needed: list[CitationNeeded] = field(default_factory=list)
    type: str = "heading"


@dataclass(frozen=True)
class Paragraph:
    sentences: list[Sentence] = field(default_factory=list)
    type: str = "paragraph"


@dataclass(frozen=True)
class Table:
    content: str
    type: str = "table"


@dataclass(frozen=True)
class Infobox:
    content: str
    type: str = "infobox"


@dataclass(frozen=True)
class Math:
    content: str
    type: str = "math"


@dataclass(frozen=True)
class Code:
    content: str
    language: Optional[str] = None
    type: str = "code"


@dataclass(frozen=True)
class Preformatted:
    content: str
    type: str = "preformatted"


Element = Union[Heading, Paragraph, Table, Infobox, Math, Code, Preformatted]


@dataclass(frozen=True)
class ExcerptWithCitations:
    """Up to three consecutive sentences ending in a cited sentence.

    citations are copies of the final sentence's citations with char_index
    rebased onto the excerpt text.
    """

    text: str
    translated_text: Optional[str] = None
    citations: list[Citation] = field(default_factory=list)


@dataclass(frozen=True)
class Article:
    """One wiki page: metadata, element structure, and derived excerpts."""

    title: str
    wikicode: str
    hash: str
    last_revision: str
    first_revision: Optional[str] = None
    first_revision_access_date: Optional[str] = None
    cross_lingual_links: Optional[dict[str, str]] = None
    cross_lingual_links_access_date: Optional[str] = None
    text: str = ""
    elements: list[Element] = field(default_factory=list)
    excerpts_with_citations: list[ExcerptWithCitations] = field(default_factory=list)


def paragraph_text(p: Paragraph) -> str:
    """Reconstruct a paragraph's cleaned text from its sentences."""
    return "".join(s.text + s.trailing_whitespace for s in p.sentences)


def compute_hash(title: str, wikicode: str) -> str:
    """SHA-256 hex digest of UTF-8 title, a newline byte, then wikicode."""
    h = hashlib.sha256()
    h.update(title.encode("utf-8"))
    h.update(b"\n")
    h.update(wikicode.encode("utf-8"))
    return h.hexdigest()


# -- serialization ----------------------------------------------------------

# Field order below matches the published chunk-file schema; keep stable so
# re-serializing an untouched article is byte-identical.

def _citation_to_dict(c: Citation) -> dict[str, Any]:
    return {
        "content": c.content,
        "char_index": c.char_index,
        "name": c.name,
        "url": c.url,
        "source_text": c.source_text,
        "source_code_content_type": c.source_code_content_type,
        "source_code_num_bytes": c.source_code_num_bytes,
        "source_code_num_chars": c.source_code_num_chars,
        "source_download_date": c.source_download_date,
        "source_download_error": c.source_download_error,
        "source_extract_error": c.source_extract_error,
        "source_snippet": c.source_snippet,
        "source_quality_label": c.source_quality_label,
        "source_quality_raw_score": c.source_quality_raw_score,
    }


def _citation_needed_to_dict(c: CitationNeeded) -> dict[str, Any]:
    return {"type": c.type, "content": c.content, "char_index": c.char_index}


def _sentence_to_dict(s: Sentence) -> dict[str, Any]:
    return {
        "text": s.text,
        "translated_text": s.translated_text,
        "trailing_whitespace": s.trailing_whitespace,
        "citations": [_citation_to_dict(c) for c in s.citations],
        "citations_needed": [_citation_needed_to_dict(c) for c in s.citations_needed],
    }


def _element_to_dict(e: Element) -> dict[str, Any]:
    if isinstance(e, Heading):
        return {
            "type": "heading",
            "text": e.text,
            "translated_text": e.translated_text,
            "level": e.level,
            "citations": [_citation_to_dict(c) for c in e.citations],
            "citations_needed": [_citation_needed_to_dict(c) for c in e.citations_needed],
        }
    if isinstance(e, Paragraph):
        return {"type": "paragraph", "sentences": [_sentence_to_dict(s) for s in e.sentences]}
    if isinstance(e, Code):
        return {"type": "code", "language": e.language, "content": e.content}
    if isinstance(e, (Table, Infobox, Math, Preformatted)):
        return {"type": e.type, "content": e.content}
    raise TypeError(f"not an element: {e!r}")


def _excerpt_to_dict(x: ExcerptWithCitations) -> dict[str, Any]:
    return {
        "text": x.text,
        "translated_text": x.translated_text,
        "citations": [_citation_to_dict(c) for c in x.citations],
    }


def article_to_dict(a: Article) -> dict[str, Any]:
    return {
        "title": a.title,
        "wikicode": a.wikicode,
        "hash": a.hash,
        "last_revision": a.last_revision,
        "first_revision": a.first_revision,
        "first_revision_access_date": a.first_revision_access_date,
        "cross_lingual_links": a.cross_lingual_links,
        "cross_lingual_links_access_date": a.cross_lingual_links_access_date,
        "text": a.text,
        "elements": [_element_to_dict(e) for e in a.elements],
        "excerpts_with_citations": [_excerpt_to_dict(x) for x in a.excerpts_with_citations],
    }


def serialize_article(article: Article) -> str:
    """Encode an Article as a single JSON line (no trailing newline)."""
    return json.dumps(article_to_dict(article), ensure_ascii=False, separators=(",", ":"))


# -- strict deserialization --------------------------------------------------


def _expect_keys(d: Any, path: str, keys: tuple[str, ...]) -> None:
    if not isinstance(d, dict):
        raise SchemaError(path, f"expected object, got {type(d).__name__}")
    for k in d:
        if k not in keys:
            raise SchemaError(f"{path}.{k}" if path else k, "unknown field")
    for k in keys:
        if k not in d:
            raise SchemaError(f"{path}.{k}" if path else k, "missing field")


def _str(v: Any, path: str) -> str:
    if not isinstance(v, str):
        raise SchemaError(path, f"expected string, got {type(v).__name__}")
    return v


def _opt_str(v: Any, path: str) -> Optional[str]:
    return None if v is None else _str(v, path)


def _int(v: Any, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(path, f"expected integer, got {type(v).__name__}")
    return v


def _opt_int(v: Any, path: str) -> Optional[int]:
    return None if v is None else _int(v, path)


def _opt_num(v: Any, path: str) -> Optional[float]:
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(path, f"expected number, got {type(v).__name__}")
    return float(v)


_CITATION_KEYS = (
    "content", "char_index", "name", "url", "source_text",
    "source_code_content_type", "source_code_num_bytes", "source_code_num_chars",
    "source_download_date", "source_download_error", "source_extract_error",
    "source_snippet", "source_quality_label", "source_quality_raw_score",
)


def _citation_from_dict(d: Any, path: str, max_index: Optional[int]) -> Citation:
    _expect_keys(d, path, _CITATION_KEYS)
    char_index = _int(d["char_index"], f"{path}.char_index")
    if char_index < 0 or (max_index is not None and char_index > max_index):
        raise SchemaError(f"{path}.char_index", f"offset {char_index} out of bounds [0, {max_index}]")
    label = _opt_int(d["source_quality_label"], f"{path}.source_quality_label")
    if label is not None and label not in (1, 2, 3, 4, 5):
        raise SchemaError(f"{path}.source_quality_label", f"label {label} outside 1..5")
    c = Citation(
        content=_str(d["content"], f"{path}.content"),
        char_index=char_index,
        name=_opt_str(d["name"], f"{path}.name"),
        url=_opt_str(d["url"], f"{path}.url"),
        source_text=_opt_str(d["source_text"], f"{path}.source_text"),
        source_code_content_type=_opt_str(d["source_code_content_type"], f"{path}.source_code_content_type"),
        source_code_num_bytes=_opt_int(d["source_code_num_bytes"], f"{path}.source_code_num_bytes"),
        source_code_num_chars=_opt_int(d["source_code_num_chars"], f"{path}.source_code_num_chars"),
        source_download_date=_opt_str(d["source_download_date"], f"{path}.source_download_date"),
        source_download_error=_opt_str(d["source_download_error"], f"{path}.source_download_error"),
        source_extract_error=_opt_str(d["source_extract_error"], f"{path}.source_extract_error"),
        source_snippet=_opt_str(d["source_snippet"], f"{path}.source_snippet"),
        source_quality_label=label,
        source_quality_raw_score=_opt_num(d["source_quality_raw_score"], f"{path}.source_quality_raw_score"),
    )
    if c.source_text is not None and (c.source_download_error or c.source_extract_error):
        raise SchemaError(path, "source_text present together with a download/extract error")
    if c.source_quality_label is not None and c.source_text is None:
        raise SchemaError(path, "source_quality_label present without source_text")
    if c.url is None:
        for f_name in ("source_text", "source_code_content_type", "source_code_num_chars",
                       "source_download_date", "source_download_error", "source_extract_error",
                       "source_quality_label", "source_quality_raw_score"):
            if getattr(c, f_name) is not None:
                raise SchemaError(f"{path}.{f_name}", "source field present on a citation without url")
    return c


def _citation_needed_from_dict(d: Any, path: str, max_index: Optional[int]) -> CitationNeeded:
    _expect_keys(d, path, ("type", "content", "char_index"))
    if d["type"] != "citation-needed":
        raise SchemaError(f"{path}.type", f"expected 'citation-needed', got {d['type']!r}")
    char_index = _int(d["char_index"], f"{path}.char_index")
    if char_index < 0 or (max_index is not None and char_index > max_index):
        raise SchemaError(f"{path}.char_index", f"offset {char_index} out of bounds [0, {max_index}]")
    return CitationNeeded(content=_str(d["content"], f"{path}.content"), char_index=char_index)


def _sentence_from_dict(d: Any, path: str) -> Sentence:
    _expect_keys(d, path, ("text", "translated_text", "trailing_whitespace", "citations", "citations_needed"))
    text = _str(d["text"], f"{path}.text")
    ws = _str(d["trailing_whitespace"], f"{path}.trailing_whitespace")
    if ws not in ("", " "):
        raise SchemaError(f"{path}.trailing_whitespace", f"must be '' or ' ', got {ws!r}")
    return Sentence(
        text=text,
        translated_text=_opt_str(d["translated_text"], f"{path}.translated_text"),
        trailing_whitespace=ws,
        citations=_list_of(d["citations"], f"{path}.citations", _citation_from_dict, len(text)),
        citations_needed=_list_of(d["citations_needed"], f"{path}.citations_needed",
                                  _citation_needed_from_dict, len(text)),
    )


def _list_of(v: Any, path: str, item_fn, *args) -> list:
    if not isinstance(v, list):
        raise SchemaError(path, f"expected array, got {type(v).__name__}")
    return [item_fn(item, f"{path}[{i}]", *args) for i, item in enumerate(v)]


def _element_from_dict(d: Any, path: str) -> Element:
    if not isinstance(d, dict):
        raise SchemaError(path, f"expected object, got {type(d).__name__}")
    kind = d.get("type")
    if kind == "heading":
        _expect_keys(d, path, ("type", "text", "translated_text", "level", "citations", "citations_needed"))
        text = _str(d["text"], f"{path}.text")
        level = _int(d["level"], f"{path}.level")
        if not 1 <= level <= 6:
            raise SchemaError(f"{path}.level", f"level {level} outside 1..6")
        return Heading(
            text=text,
            level=level,
            translated_text=_opt_str(d["translated_text"], f"{path}.translated_text"),
            citations=_list_of(d["citations"], f"{path}.citations", _citation_from_dict, len(text)),
            citations_needed=_list_of(d["citations_needed"], f"{path}.citations_needed",
                                      _citation_needed_from_dict, len(text)),
        )
    if kind == "paragraph":
        _expect_keys(d, path, ("type", "sentences"))
        return Paragraph(sentences=_list_of(d["sentences"], f"{path}.sentences", _sentence_from_dict))
    if kind == "code":
        _expect_keys(d, path, ("type", "language", "content"))
        return Code(content=_str(d["content"], f"{path}.content"),
                    language=_opt_str(d["language"], f"{path}.language"))
    if kind in ("table", "infobox", "math", "preformatted"):
        _expect_keys(d, path, ("type", "content"))
        cls = {"table": Table, "infobox": Infobox, "math": Math, "preformatted": Preformatted}[kind]
        return cls(content=_str(d["content"], f"{path}.content"))
    raise SchemaError(f"{path}.type", f"unknown element type {kind!r}")


def _excerpt_from_dict(d: Any, path: str) -> ExcerptWithCitations:
    _expect_keys(d, path, ("text", "translated_text", "citations"))
    text = _str(d["text"], f"{path}.text")
    citations = _list_of(d["citations"], f"{path}.citations", _citation_from_dict, len(text))
    return ExcerptWithCitations(
        text=text,
        translated_text=_opt_str(d["translated_text"], f"{path}.translated_text"),
        citations=citations,
    )


_ARTICLE_KEYS = (
    "title", "wikicode", "hash", "last_revision", "first_revision",
    "first_revision_access_date", "cross_lingual_links", "cross_lingual_links_access_date",
    "text", "elements", "excerpts_with_citations",
)


def article_from_dict(d: Any, path: str = "") -> Article:
    _expect_keys(d, path, _ARTICLE_KEYS)
    links = d["cross_lingual_links"]
    if links is not None:
        if not isinstance(links, dict):
            raise SchemaError(f"{path}.cross_lingual_links" if path else "cross_lingual_links",
                              f"expected object, got {type(links).__name__}")
        for k, v in links.items():
            _str(v, f"{path}.cross_lingual_links.{k}" if path else f"cross_lingual_links.{k}")
        links = dict(links)
    prefix = f"{path}." if path else ""
    return Article(
        title=_str(d["title"], prefix + "title"),
        wikicode=_str(d["wikicode"], prefix + "wikicode"),
        hash=_str(d["hash"], prefix + "hash"),
        last_revision=_str(d["last_revision"], prefix + "last_revision"),
        first_revision=_opt_str(d["first_revision"], prefix + "first_revision"),
        first_revision_access_date=_opt_str(d["first_revision_access_date"],
                                            prefix + "first_revision_access_date"),
        cross_lingual_links=links,
        cross_lingual_links_access_date=_opt_str(d["cross_lingual_links_access_date"],
                                                 prefix + "cross_lingual_links_access_date"),
        text=_str(d["text"], prefix + "text"),
        elements=_list_of(d["elements"], prefix + "elements", _element_from_dict),
        excerpts_with_citations=_list_of(d["excerpts_with_citations"],
                                         prefix + "excerpts_with_citations", _excerpt_from_dict),
    )


def deserialize_article(line: str) -> Article:
    """Parse one chunk-file line back into an Article (strict)."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON: {e}") from e
    return article_from_dict(data)


def read_chunk(path) -> list[Article]:
    """Read every article from a JSONL chunk file."""
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip("\n")
            if line:
                out.append(deserialize_article(line))
    return out


def write_chunk_file(path, articles) -> None:
    """Write articles to a JSONL chunk file, one newline-terminated line each."""
    with open(path, "w", encoding="utf-8") as f:
        for a in articles:
            f.write(serialize_article(a))
            f.write("\n")
