"""HTML to markdown-ish plain text linearization.

Boilerplate containers (scripts, styles, navigation, forms) and comments
are dropped; headings, paragraphs, list items, and table rows become text
blocks; hyperlinks are kept as markdown links; table cells in a row are
joined with " | ".  Built on the stdlib parser so arbitrary tag soup never
raises.
"""
from __future__ import annotations

import re
from html.parser import HTMLParser

_SKIP_TAGS = {
    "script", "style", "nav", "header", "footer", "aside", "noscript", "form",
    "iframe", "svg", "head", "button", "select", "option", "template", "canvas",
}
_BLOCK_TAGS = {
    "p", "div", "section", "article", "main", "ul", "ol", "table", "tbody",
    "thead", "blockquote", "pre", "dl", "figure", "figcaption", "hr",
    "address", "details", "summary", "body",
}
_HEADING_TAGS = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}
_WS_RE = re.compile(r"[ \t\r\f\v\xa0]+")


class _Extractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks: list[str] = []
        self._parts: list[str] = []
        self._skip_depth = 0
        self._links: list[tuple[str | None, list[str]]] = []
        self._cells: list[str] | None = None
        self._prefix = ""

    # -- buffer management

    def _sink(self) -> list[str]:
        if self._links:
            return self._links[-1][1]
        return self._parts

    def _flush_block(self):
        while self._links:
            self._close_link()
        text = _WS_RE.sub(" ", "".join(self._parts)).strip()
        self._parts = []
        if text:
            self.blocks.append(self._prefix + text)
        self._prefix = ""

    def _close_link(self):
        href, parts = self._links.pop()
        text = "".join(parts).strip()
        sink = self._sink()
        if text and href and href.lower().startswith(("http://", "https://")):
            sink.append(f"[{text}]({href})")
        else:
            sink.append(text)

    # -- parser callbacks

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if self._skip_depth:
            return
        if tag in _HEADING_TAGS:
            self._flush_block()
            self._prefix = "#" * _HEADING_TAGS[tag] + " "
        elif tag == "li":
            self._flush_block()
            self._prefix = "- "
        elif tag == "tr":
            self._flush_block()
            self._cells = []
        elif tag in ("td", "th"):
            if self._cells is not None and self._parts:
                self._cells.append(_WS_RE.sub(" ", "".join(self._parts)).strip())
                self._parts = []
        elif tag == "br":
            self._sink().append(" ")
        elif tag == "a":
            href = dict(attrs).get("href")
            self._links.append((href, []))
        elif tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_startendtag(self, tag, attrs):
        if tag == "br":
            self._sink().append(" ")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if self._skip_depth:
            return
        if tag == "a":
            if self._links:
                self._close_link()
        elif tag == "tr":
            if self._parts:
                cells = (self._cells or [])
                cells.append(_WS_RE.sub(" ", "".join(self._parts)).strip())
                self._parts = []
                self._cells = cells
            row = " | ".join(c for c in (self._cells or []) if c)
            self._cells = None
            if row:
                self.blocks.append(row)
        elif tag in _HEADING_TAGS or tag == "li" or tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_data(self, data):
        if not self._skip_depth:
            self._sink().append(data)

    # comments are dropped by default (no handle_comment override)


def html_to_text(content: str) -> str:
    """Linearize an HTML document to markdown-ish text blocks."""
    parser = _Extractor()
    parser.feed(content)
    parser.close()
    parser._flush_block()
    return "\n".join(parser.blocks).strip()


def plain_to_text(content: str) -> str:
    """Whitespace normalization for text/plain bodies."""
    lines = [_WS_RE.sub(" ", line).strip() for line in content.splitlines()]
    out: list[str] = []
    for line in lines:
        if line or (out and out[-1]):
            out.append(line)
    return "\n".join(out).strip()
