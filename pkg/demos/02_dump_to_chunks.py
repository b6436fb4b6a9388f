"""Stream a MediaWiki XML dump into 1000-article chunk files.

Builds a small synthetic dump (with a few pages that the filter should
drop), ingests it, and prints the resulting chunk layout.
"""
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

from wikicite.ingest import should_filter, stream_pages, write_chunks

PAGES = [
    ("Quicksort", "'''Quicksort''' is a sorting algorithm. It divides and conquers."),
    ("Red kite", "The '''red kite''' is a bird of prey. It scavenges widely."),
    ("Some redirect", "#REDIRECT [[Quicksort]]"),
    ("Category:Algorithms", "A category page."),
    ("Placeholder", "{{website-stub}}"),
] + [(f"Township {i}", f"Township {i} is a small settlement. It has a mill.")
     for i in range(8)]


def page_xml(title, text):
    return (f"  <page><title>{escape(title)}</title><ns>0</ns><revision>"
            f"<timestamp>2024-05-01T00:00:00Z</timestamp>"
            f"<text>{escape(text)}</text></revision></page>\n")


with tempfile.TemporaryDirectory() as workdir:
    dump = Path(workdir) / "demo-dump.xml"
    dump.write_text(
        '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.11/">\n'
        + "".join(page_xml(t, w) for t, w in PAGES)
        + "</mediawiki>\n", encoding="utf-8")

    kept, dropped = [], []
    for page in stream_pages(dump):
        (dropped if should_filter(page) else kept).append(page)
    print(f"dump pages: {len(kept) + len(dropped)}, kept {len(kept)}, "
          f"filtered {[p.title for p in dropped]}\n")

    # chunk_size=4 here so the chunking is visible at demo scale;
    # production uses the default 1000
    manifest = write_chunks(kept, Path(workdir) / "corpus", "en", chunk_size=4)
    print(f"language: {manifest.language}, articles: {manifest.article_count}")
    for name in manifest.chunk_paths:
        path = Path(workdir) / "corpus" / "en" / name
        lines = path.read_text().count("\n")
        print(f"  {name}: {lines} articles, {path.stat().st_size} bytes")
