"""Wikitext parsing into the article element structure.

Turns raw article markup into an ordered list of elements: headings,
paragraphs (sentence-segmented), tables, infoboxes, math/code/preformatted
blocks.  Citations and citation-needed markers are removed from the prose
and recorded with character offsets into the cleaned text, measured at the
position where the marker stood after markup removal.

Offsets are tracked by replacing each citation with a sentinel character
(guaranteed absent from the fragment) that rides through every cleaning
step; sentinel positions in the final text become char_index values.

Templates are never expanded.  Infoboxes and tables keep their raw markup;
unparseable blocks degrade to Preformatted rather than raising.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace

from . import textclean
from .excerpts import build_excerpts
from .langconfig import LanguageConfig, load_language_config, matches_prefix
from .schema import (
    Article,
    Citation,
    CitationNeeded,
    Code,
    Element,
    Heading,
    Infobox,
    Math,
    Paragraph,
    Preformatted,
    Table,
    compute_hash,
    paragraph_text,
)
from .segment import assign_offsets, segment_paragraph

log = logging.getLogger(__name__)


@dataclass
class FoundCitation:
    content: str
    name: str | None
    char_index: int


@dataclass
class FoundCitationNeeded:
    content: str
    char_index: int


@dataclass
class ParsedFragment:
    """Cleaned prose with citation marks located by offset."""

    clean_text: str
    citations: list[FoundCitation] = field(default_factory=list)
    citations_needed: list[FoundCitationNeeded] = field(default_factory=list)
    warnings: int = 0


@dataclass
class ParseReport:
    warnings: int = 0
    degraded_blocks: int = 0


# -- low-level matching -------------------------------------------------------

_COMMENT_RE = re.compile(r"<!--.*?(?:-->|\Z)", re.S)
_REF_TOKEN_RE = re.compile(r"<ref\b[^<>]*>|\{\{", re.I)
_REF_CLOSE_RE = re.compile(r"</ref\s*>", re.I)
_NAME_ATTR_RE = re.compile(r"""name\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s"'<>/]+))""", re.I)
_LANG_ATTR_RE = re.compile(r"""lang\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s"'<>/]+))""", re.I)
_HEADING_RE = re.compile(r"^(=+)(.+?)(=+)[ \t]*$")
_LIST_RE = re.compile(r"^[*#;:]+[ \t]*")
_MAGIC_WORD_RE = re.compile(r"__[A-Z]+(?:_[A-Z]+)*__")
_EXTERNAL_LINK_RE = re.compile(r"\[(?:https?:|ftp:)?//[^\s\]]*([^\]]*)\]", re.I)
_BARE_URL_RE = re.compile(r"https?://[^\s<>\"|{}\[\]]+", re.I)
_STRIP_TAG_RE = re.compile(
    r"</?(?:span|div|p|b|i|u|em|strong|small|big|sub|sup|s|del|ins|abbr|mark|q|font|"
    r"center|blockquote|poem|section|ul|ol|li|dl|dt|dd|table|tr|td|th|caption|"
    r"includeonly|noinclude|onlyinclude|ref|references|hr|wbr|time|bdi|data|kbd|samp|"
    r"var|tt|math|code|pre|nowiki|syntaxhighlight|source|gallery|h[1-6])\b[^<>]*>",
    re.I,
)
_BR_RE = re.compile(r"<br\s*/?\s*>", re.I)

# extension-tag regions are pulled out before any other processing so their
# bodies survive verbatim
_EXT_TAG_RE = re.compile(
    r"<(?P<tag>nowiki|pre|math|code|syntaxhighlight|source|references|gallery|"
    r"timeline|imagemap|score|mapframe|maplink|hiero|charinsert|inputbox)\b"
    r"(?P<attrs>[^<>]*?)(?:/\s*>|>(?P<body>.*?)</(?P=tag)\s*>)",
    re.I | re.S,
)
_PLACEHOLDER_RE = re.compile(r"\x02(\d+)\x03")

_CITATION_NEEDED_CORE = ("cn", "fact", "citation required")


def match_template(text: str, start: int) -> int | None:
    """End index just past the '}}' matching the '{{' at start, or None."""
    depth = 0
    i = start
    n = len(text)
    while i < n - 1:
        pair = text[i:i + 2]
        if pair == "{{":
            depth += 1
            i += 2
        elif pair == "}}":
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    return None


def match_wikilink(text: str, start: int) -> int | None:
    depth = 0
    i = start
    n = len(text)
    while i < n - 1:
        pair = text[i:i + 2]
        if pair == "[[":
            depth += 1
            i += 2
        elif pair == "]]":
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    return None


def iter_templates(text: str):
    """Yield (start, end, inner) for every template, including nested ones."""
    pos = 0
    while True:
        i = text.find("{{", pos)
        if i == -1:
            return
        end = match_template(text, i)
        if end is None:
            pos = i + 2
            continue
        yield i, end, text[i + 2:end - 2]
        pos = i + 2


def split_template_params(inner: str) -> list[str]:
    """Split template inner text at top-level pipes."""
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    i = 0
    n = len(inner)
    while i < n:
        pair = inner[i:i + 2]
        if pair in ("{{", "[["):
            depth += 1
            cur.append(pair)
            i += 2
        elif pair in ("}}", "]]"):
            depth -= 1
            cur.append(pair)
            i += 2
        elif inner[i] == "|" and depth <= 0:
            parts.append("".join(cur))
            cur = []
            i += 1
        else:
            cur.append(inner[i])
            i += 1
    parts.append("".join(cur))
    return parts


def template_name(inner: str) -> str:
    name = split_template_params(inner)[0]
    return " ".join(name.split())


def _resolve_template_title(name: str, config: LanguageConfig) -> str:
    head, sep, rest = name.partition(":")
    if sep:
        normalized = head.strip().casefold()
        for p in config.template_prefixes:
            if normalized == p.rstrip(":").casefold():
                return rest.strip()
    return name


def is_infobox_template(name: str, config: LanguageConfig) -> bool:
    """True iff the resolved title matches a configured infobox title.

    An entry matches the whole title or acts as a word prefix of it
    ("Infobox" matches "Infobox person"), case-insensitively.
    """
    title = " ".join(_resolve_template_title(name, config).split()).casefold()
    for entry in config.infobox_template_titles:
        e = " ".join(entry.split()).casefold()
        if title == e or title.startswith(e + " "):
            return True
    return False


def is_citation_template(name: str, config: LanguageConfig | None) -> bool:
    n = " ".join(name.split()).casefold()
    if n == "citation" or n == "rp" or n.startswith("cite"):
        return True
    if config is not None:
        return n in {t.casefold() for t in config.extra_citation_templates}
    return False


def is_citation_needed_template(name: str, config: LanguageConfig | None) -> bool:
    n = " ".join(name.split()).casefold()
    if n in _CITATION_NEEDED_CORE or n.startswith("citation needed"):
        return True
    if config is not None:
        return n in {t.casefold() for t in config.extra_citation_needed_templates}
    return False


def _ref_name(attrs: str) -> str | None:
    m = _NAME_ATTR_RE.search(attrs)
    if not m:
        return None
    return next(g for g in m.groups() if g is not None).strip() or None


def build_ref_registry(text: str) -> dict[str, str]:
    """Map ref names to the full markup of their defining <ref> element."""
    registry: dict[str, str] = {}
    pos = 0
    while True:
        m = _REF_TOKEN_RE.search(text, pos)
        if m is None:
            return registry
        if m.group(0) == "{{":
            pos = m.end()
            continue
        open_tag = m.group(0)
        if re.search(r"/\s*>$", open_tag):
            pos = m.end()
            continue
        close = _REF_CLOSE_RE.search(text, m.end())
        if close is None:
            return registry
        name = _ref_name(open_tag)
        if name:
            registry.setdefault(name, text[m.start():close.end()])
        pos = close.end()


# -- protected extension-tag regions ------------------------------------------


class _Protected:
    """Extension-tag bodies swapped out for placeholder tokens."""

    ELEMENT_KINDS = {"math", "pre", "code", "syntaxhighlight", "source"}
    DROP_KINDS = {"gallery", "timeline", "imagemap", "score", "mapframe",
                  "maplink", "hiero", "charinsert", "inputbox", "references"}

    def __init__(self):
        self.entries: list[tuple[str, str, str, str]] = []  # (tag, attrs, body, raw)

    def extract(self, text: str) -> str:
        def repl(m: re.Match) -> str:
            idx = len(self.entries)
            self.entries.append((m.group("tag").lower(), m.group("attrs") or "",
                                 m.group("body") or "", m.group(0)))
            return f"\x02{idx}\x03"

        text = text.replace("\x02", "").replace("\x03", "")
        return _EXT_TAG_RE.sub(repl, text)

    def restore(self, text: str) -> str:
        return _PLACEHOLDER_RE.sub(lambda m: self.entries[int(m.group(1))][3], text)

    def element_for(self, idx: int) -> Element | None:
        tag, attrs, body, _raw = self.entries[idx]
        if tag == "math":
            return Math(content=body)
        if tag == "pre":
            return Preformatted(content=body)
        if tag in ("code", "syntaxhighlight", "source"):
            lang = None
            m = _LANG_ATTR_RE.search(attrs)
            if m:
                lang = next(g for g in m.groups() if g is not None).strip() or None
            return Code(content=body, language=lang)
        return None

    def kind(self, idx: int) -> str:
        return self.entries[idx][0]


# -- citation marking ----------------------------------------------------------


def _mark_citations(
    text: str,
    registry: dict[str, str],
    config: LanguageConfig | None,
    sent_cit: str,
    sent_need: str,
) -> tuple[str, list[FoundCitation], list[FoundCitationNeeded], int]:
    """Replace citation constructs with sentinel characters.

    Returns the marked text plus found citations/citation-needed marks in
    document order (char_index still unset) and a warning count for
    unbalanced refs.
    """
    out: list[str] = []
    citations: list[FoundCitation] = []
    needed: list[FoundCitationNeeded] = []
    warnings = 0
    pos = 0
    while True:
        m = _REF_TOKEN_RE.search(text, pos)
        if m is None:
            out.append(text[pos:])
            break
        out.append(text[pos:m.start()])
        token = m.group(0)
        if token != "{{":
            if re.search(r"/\s*>$", token):
                # named-ref reuse: resolve to the defining ref's markup
                name = _ref_name(token)
                content = registry.get(name, "") if name else ""
                citations.append(FoundCitation(content=content, name=name, char_index=-1))
                out.append(sent_cit)
                pos = m.end()
            else:
                close = _REF_CLOSE_RE.search(text, m.end())
                if close is None:
                    # unbalanced ref: capture to fragment end
                    citations.append(FoundCitation(content=text[m.start():], name=_ref_name(token),
                                                   char_index=-1))
                    out.append(sent_cit)
                    warnings += 1
                    break
                citations.append(FoundCitation(content=text[m.start():close.end()],
                                               name=_ref_name(token), char_index=-1))
                out.append(sent_cit)
                pos = close.end()
            continue
        end = match_template(text, m.start())
        if end is None:
            out.append("{")
            pos = m.start() + 1
            continue
        name = template_name(text[m.start() + 2:end - 2])
        if is_citation_needed_template(name, config):
            needed.append(FoundCitationNeeded(content=text[m.start():end], char_index=-1))
            out.append(sent_need)
            pos = end
        elif is_citation_template(name, config):
            citations.append(FoundCitation(content=text[m.start():end], name=None, char_index=-1))
            out.append(sent_cit)
            pos = end
        else:
            # non-citation template: step inside so nested refs are found;
            # the markup itself is removed later by _strip_templates
            out.append("{{")
            pos = m.start() + 2
    return "".join(out), citations, needed, warnings


# -- markup removal (sentinel-preserving) --------------------------------------


def _keep_sentinels(span: str, sentinels: str) -> str:
    return "".join(ch for ch in span if ch in sentinels)


def _strip_templates(text: str, sentinels: str) -> str:
    out: list[str] = []
    pos = 0
    while True:
        i = text.find("{{", pos)
        if i == -1:
            out.append(text[pos:])
            return "".join(out)
        out.append(text[pos:i])
        end = match_template(text, i)
        if end is None:
            out.append("{{")
            pos = i + 2
        else:
            out.append(_keep_sentinels(text[i:end], sentinels))
            pos = end


_PAREN_SUFFIX_RE = re.compile(r"\s*\([^()]*\)$")


def _link_display(target: str, rest: str, has_pipe: bool) -> str:
    if has_pipe:
        if rest:
            return rest
        # pipe trick: strip namespace and parenthesized disambiguation
        base = target.rsplit(":", 1)[-1]
        return _PAREN_SUFFIX_RE.sub("", base).strip()
    return target.lstrip(":").strip()


def _strip_wikilinks_impl(text: str, config: LanguageConfig, sentinels: str) -> str:
    out: list[str] = []
    pos = 0
    while True:
        i = text.find("[[", pos)
        if i == -1:
            out.append(text[pos:])
            return "".join(out)
        out.append(text[pos:i])
        end = match_wikilink(text, i)
        if end is None:
            # unbalanced brackets pass through unchanged
            out.append("[[")
            pos = i + 2
            continue
        inner = text[i + 2:end - 2]
        target, sep, rest = inner.partition("|")
        target_stripped = target.strip()
        if matches_prefix(target_stripped, config.file_media_prefixes) and not target_stripped.startswith(":"):
            # file/media links vanish entirely, caption included
            out.append(_keep_sentinels(inner, sentinels))
        elif matches_prefix(target_stripped, config.interwiki_prefixes) and not target_stripped.startswith(":"):
            out.append(rest if sep else _keep_sentinels(inner, sentinels))
        else:
            out.append(_link_display(target_stripped, rest, bool(sep)))
        pos = end


def strip_wikilinks(text: str, config: LanguageConfig) -> str:
    """Public wikilink removal: file/media links deleted, others reduced to
    their display text (or target), interwiki links to display text."""
    return _strip_wikilinks_impl(text, config, sentinels="")


def _strip_external_links(text: str) -> str:
    def repl(m: re.Match) -> str:
        label = m.group(1).strip()
        return label

    return _EXTERNAL_LINK_RE.sub(repl, text)


def _clean_fragment(
    text: str,
    config: LanguageConfig,
    sentinels: str,
    protected: _Protected | None = None,
) -> str:
    """Remove remaining markup, preserving sentinels and newlines.

    Inline extension-tag regions (math/code/nowiki riding in prose) are
    substituted by their literal bodies after markup removal, so their
    contents never get treated as wiki markup; block-level regions were
    already routed to elements by the block scanner.
    """
    text = _strip_templates(text, sentinels)
    text = _strip_wikilinks_impl(text, config, sentinels)
    text = _strip_external_links(text)
    text = _BR_RE.sub(" ", text)
    text = _STRIP_TAG_RE.sub("", text)
    text = text.replace("'''", "").replace("''", "")
    text = _MAGIC_WORD_RE.sub("", text)
    if protected is not None:
        def placeholder(m: re.Match) -> str:
            idx = int(m.group(1))
            if protected.kind(idx) in _Protected.DROP_KINDS:
                return ""
            return protected.entries[idx][2]

        text = _PLACEHOLDER_RE.sub(placeholder, text)
    text = textclean.decode_entities(text)
    text = textclean.fix_mojibake_between(text, sentinels)
    return text


# -- fragment processing --------------------------------------------------------


def _join_visible(parts: list[str], sentinels: str) -> str:
    out = ""
    for part in parts:
        if textclean.visible_len(part, sentinels) == 0:
            out += part
        elif textclean.visible_len(out, sentinels) == 0:
            out = out + part
        else:
            out += " " + part
    return out


def _fragment_units(
    raw: str,
    config: LanguageConfig,
    registry: dict[str, str],
    protected: _Protected | None = None,
) -> tuple[list[str], list[FoundCitation], list[FoundCitationNeeded], int, str]:
    """Clean a prose fragment into display units.

    Returns (units, citations, citations_needed, warnings, sentinels) where
    each unit is cleaned text still carrying sentinel characters.  List
    items form their own units; consecutive plain lines merge into one.
    """
    sentinels = textclean.pick_sentinels(raw, 2)
    sent_cit, sent_need = sentinels[0], sentinels[1]
    marked, citations, needed, warnings = _mark_citations(raw, registry, config, sent_cit, sent_need)
    cleaned = _clean_fragment(marked, config, sentinels, protected)
    units: list[str] = []
    plain_buffer: list[str] = []

    def flush_plain():
        if plain_buffer:
            units.append(_join_visible(plain_buffer, sentinels))
            plain_buffer.clear()

    for line in cleaned.split("\n"):
        m = _LIST_RE.match(line)
        if m:
            flush_plain()
            units.append(textclean.normalize_line_ws(line[m.end():], sentinels))
        else:
            plain_buffer.append(textclean.normalize_line_ws(line, sentinels))
    flush_plain()
    units = [u for u in units if u]
    return units, citations, needed, warnings, sentinels


def extract_citations(
    fragment_wikitext: str,
    config: LanguageConfig | None = None,
    ref_registry: dict[str, str] | None = None,
) -> ParsedFragment:
    """Remove citation constructs from prose-level wikitext.

    Returns the cleaned text with citations and citation-needed marks
    recorded at the offset where each stood after markup removal.  Named
    ref reuses resolve through ref_registry (built article-wide); without a
    definition the citation keeps its name and empty content.
    """
    config = config or load_language_config("generic")
    registry = ref_registry if ref_registry is not None else build_ref_registry(fragment_wikitext)
    units, citations, needed, warnings, sentinels = _fragment_units(
        fragment_wikitext, config, registry)
    joined = _join_visible(units, sentinels)
    clean_text, marks = textclean.strip_sentinels(joined, sentinels)
    cit_iter = iter(citations)
    need_iter = iter(needed)
    for ch, offset in marks:
        if ch == sentinels[0]:
            next(cit_iter).char_index = offset
        else:
            next(need_iter).char_index = offset
    return ParsedFragment(clean_text=clean_text, citations=citations,
                          citations_needed=needed, warnings=warnings)


# -- citation payload extraction -------------------------------------------------

_URL_TRAILING = ".,;:!?\"'”’»"


def _clean_url(value: str) -> str | None:
    url = value.strip()
    if url.startswith("[") and url.endswith("]"):
        url = url[1:-1].strip()
    url = url.split()[0] if url.split() else ""
    while url and url[-1] in _URL_TRAILING:
        url = url[:-1]
    if url.endswith(")") and "(" not in url:
        url = url[:-1]
    if re.match(r"https?://", url, re.I):
        return url
    return None


def _template_param(inner: str, key: str) -> str | None:
    for part in split_template_params(inner)[1:]:
        k, sep, v = part.partition("=")
        if sep and k.strip().casefold() == key:
            return v.strip()
    return None


def extract_url(citation_content: str) -> str | None:
    """The citation's web target: url= parameter of a cite/citation
    template, else the first external-link URL in the ref body."""
    fallback_templates: list[str] = []
    for _s, _e, inner in iter_templates(citation_content):
        name = template_name(inner)
        if is_citation_template(name, None):
            value = _template_param(inner, "url")
            if value:
                url = _clean_url(value)
                if url:
                    return url
        else:
            fallback_templates.append(inner)
    m = _BARE_URL_RE.search(citation_content)
    if m:
        url = _clean_url(m.group(0))
        if url:
            return url
    for inner in fallback_templates:
        value = _template_param(inner, "url")
        if value:
            url = _clean_url(value)
            if url:
                return url
    return None


def extract_snippet(citation_content: str) -> str | None:
    """Editor-provided quote stored in a template parameter named quote."""
    for _s, _e, inner in iter_templates(citation_content):
        value = _template_param(inner, "quote")
        if value:
            stripped = value.strip()
            if stripped:
                return stripped
    return None


# -- article parsing ---------------------------------------------------------------


def _to_schema_citation(found: FoundCitation, protected: _Protected | None) -> Citation:
    content = protected.restore(found.content) if protected else found.content
    return Citation(
        content=content,
        char_index=found.char_index,
        name=found.name,
        url=extract_url(content),
        source_snippet=extract_snippet(content),
    )


def _to_schema_needed(found: FoundCitationNeeded, protected: _Protected | None) -> CitationNeeded:
    content = protected.restore(found.content) if protected else found.content
    return CitationNeeded(content=content, char_index=found.char_index)


def _build_paragraph(
    raw: str,
    config: LanguageConfig,
    registry: dict[str, str],
    protected: _Protected | None,
    report: ParseReport,
) -> Paragraph | None:
    units, citations, needed, warnings, sentinels = _fragment_units(
        raw, config, registry, protected)
    report.warnings += warnings
    cit_iter = iter(citations)
    need_iter = iter(needed)
    unit_records = []  # (clean_text, citations, needed)
    for unit in units:
        clean, marks = textclean.strip_sentinels(unit, sentinels)
        ucits: list[Citation] = []
        uneeds: list[CitationNeeded] = []
        for ch, offset in marks:
            if ch == sentinels[0]:
                found = next(cit_iter)
                found.char_index = offset
                ucits.append(_to_schema_citation(found, protected))
            else:
                found = next(need_iter)
                found.char_index = offset
                uneeds.append(_to_schema_needed(found, protected))
        unit_records.append((clean, ucits, uneeds))
    sentences = []
    visible_after = [False] * len(unit_records)
    seen = False
    for k in range(len(unit_records) - 1, -1, -1):
        visible_after[k] = seen
        if unit_records[k][0]:
            seen = True
    for k, (clean, ucits, uneeds) in enumerate(unit_records):
        segs = segment_paragraph(clean, config.segmenter) if clean else []
        unit_sentences, overflow = assign_offsets(segs, ucits, uneeds)
        report.warnings += overflow
        if unit_sentences and clean and visible_after[k]:
            unit_sentences[-1] = replace(unit_sentences[-1], trailing_whitespace=" ")
        sentences.extend(unit_sentences)
    if not sentences:
        return None
    return Paragraph(sentences=sentences)


def _build_heading(
    body: str,
    level: int,
    config: LanguageConfig,
    registry: dict[str, str],
    protected: _Protected | None,
    report: ParseReport,
) -> Heading:
    units, citations, needed, warnings, sentinels = _fragment_units(
        body, config, registry, protected)
    report.warnings += warnings
    joined = _join_visible(units, sentinels)
    text, marks = textclean.strip_sentinels(joined, sentinels)
    cits: list[Citation] = []
    needs: list[CitationNeeded] = []
    cit_iter = iter(citations)
    need_iter = iter(needed)
    for ch, offset in marks:
        if ch == sentinels[0]:
            found = next(cit_iter)
            found.char_index = offset
            cits.append(_to_schema_citation(found, protected))
        else:
            found = next(need_iter)
            found.char_index = offset
            needs.append(_to_schema_needed(found, protected))
    return Heading(text=text, level=level, citations=cits, citations_needed=needs)


_PLACEHOLDER_ONLY_RE = re.compile(r"^[ \t]*(\x02\d+\x03)[ \t]*$")


def _flush_prose(
    chunk: str,
    config: LanguageConfig,
    registry: dict[str, str],
    protected: _Protected,
    report: ParseReport,
    elements: list[Element],
) -> None:
    if not chunk.strip():
        return
    try:
        paragraph = _build_paragraph(chunk, config, registry, protected, report)
    except Exception:
        log.exception("prose block degraded to preformatted")
        report.degraded_blocks += 1
        elements.append(Preformatted(content=protected.restore(chunk)))
        return
    if paragraph is not None:
        elements.append(paragraph)


def _find_table_end(text: str, start: int) -> int:
    pos = start
    depth = 0
    n = len(text)
    while pos < n:
        eol = text.find("\n", pos)
        if eol == -1:
            eol = n
        line = text[pos:eol].lstrip(" :")
        if line.startswith("{|"):
            depth += 1
        elif line.startswith("|}"):
            depth -= 1
            if depth <= 0:
                return eol
        pos = eol + 1
    return n


def parse_article_report(wikicode: str, config: LanguageConfig) -> tuple[list[Element], ParseReport]:
    """parse_article plus a report of parse warnings and degraded blocks."""
    report = ParseReport()
    try:
        return _parse_article_inner(wikicode, config, report), report
    except Exception:
        log.exception("article parse degraded to a single preformatted block")
        report.degraded_blocks += 1
        if wikicode:
            return [Preformatted(content=wikicode)], report
        return [], report


def parse_article(wikicode: str, config: LanguageConfig) -> list[Element]:
    """Parse article wikicode into its ordered element list (never raises)."""
    elements, _report = parse_article_report(wikicode, config)
    return elements


def _parse_article_inner(wikicode: str, config: LanguageConfig, report: ParseReport) -> list[Element]:
    text = wikicode.replace("\r\n", "\n").replace("\r", "\n")
    protected = _Protected()
    text = protected.extract(text)
    text = _COMMENT_RE.sub("", text)
    registry = build_ref_registry(text)
    for tag, _attrs, body, _raw in protected.entries:
        if tag == "references":
            for name, content in build_ref_registry(body).items():
                registry.setdefault(name, content)

    elements: list[Element] = []
    prose: list[str] = []

    def flush():
        if prose:
            _flush_prose("\n".join(prose), config, registry, protected, report, elements)
            prose.clear()

    pos = 0
    n = len(text)
    while pos < n:
        eol = text.find("\n", pos)
        if eol == -1:
            eol = n
        line = text[pos:eol]
        stripped = line.strip()
        if not stripped:
            flush()
            pos = eol + 1
            continue
        heading = _HEADING_RE.match(line) if line.startswith("=") else None
        if heading:
            left, inner, right = heading.group(1), heading.group(2), heading.group(3)
            level = min(len(left), len(right), 6)
            body = "=" * (len(left) - level) + inner + "=" * (len(right) - level)
            if body.strip():
                flush()
                try:
                    elements.append(_build_heading(body.strip(), level, config, registry,
                                                   protected, report))
                except Exception:
                    log.exception("heading degraded to preformatted")
                    report.degraded_blocks += 1
                    elements.append(Preformatted(content=protected.restore(line)))
                pos = eol + 1
                continue
        if stripped.lstrip(":").startswith("{|"):
            flush()
            end = _find_table_end(text, pos)
            elements.append(Table(content=protected.restore(text[pos:end])))
            pos = end + 1
            continue
        if line.startswith("{{"):
            end = match_template(text, pos)
            if end is not None:
                name = template_name(text[pos + 2:end - 2])
                rest_eol = text.find("\n", end)
                if rest_eol == -1:
                    rest_eol = n
                remainder = text[end:rest_eol]
                if is_infobox_template(name, config):
                    flush()
                    elements.append(Infobox(content=protected.restore(text[pos:end])))
                    if remainder.strip():
                        prose.append(remainder)
                elif is_citation_template(name, config) or is_citation_needed_template(name, config):
                    prose.append(text[pos:end] + remainder)
                else:
                    # standalone non-infobox template: transclusion markup,
                    # dropped (no expansion); refs inside it were already
                    # picked up by the article-wide registry scan
                    flush()
                    if remainder.strip():
                        prose.append(remainder)
                pos = rest_eol + 1
                continue
            prose.append(line)
            pos = eol + 1
            continue
        only_placeholder = _PLACEHOLDER_ONLY_RE.match(line)
        if only_placeholder:
            idx = int(_PLACEHOLDER_RE.match(only_placeholder.group(1)).group(1))
            kind = protected.kind(idx)
            if kind in _Protected.ELEMENT_KINDS:
                flush()
                element = protected.element_for(idx)
                if element is not None:
                    elements.append(element)
                pos = eol + 1
                continue
            if kind in _Protected.DROP_KINDS:
                flush()
                pos = eol + 1
                continue
            # nowiki: falls through as prose
        if line.startswith(" ") and stripped:
            flush()
            pre_lines = []
            while pos < n:
                eol = text.find("\n", pos)
                if eol == -1:
                    eol = n
                line = text[pos:eol]
                if not line.startswith(" ") or not line.strip():
                    break
                pre_lines.append(line[1:])
                pos = eol + 1
            elements.append(Preformatted(content=protected.restore("\n".join(pre_lines))))
            continue
        prose.append(line)
        pos = eol + 1
    flush()
    return elements


def article_from_wikitext(
    title: str,
    wikicode: str,
    last_revision: str,
    config: LanguageConfig,
) -> tuple[Article, ParseReport]:
    """Parse one page into a full Article record (elements, text, excerpts)."""
    elements, report = parse_article_report(wikicode, config)
    parts: list[str] = []
    for element in elements:
        if isinstance(element, Heading):
            parts.append(element.text)
        elif isinstance(element, Paragraph):
            parts.append(paragraph_text(element))
    article = Article(
        title=title,
        wikicode=wikicode,
        hash=compute_hash(title, wikicode),
        last_revision=last_revision,
        text="\n".join(parts),
        elements=elements,
        excerpts_with_citations=build_excerpts(elements),
    )
    return article, report
