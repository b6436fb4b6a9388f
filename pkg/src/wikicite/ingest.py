"""Streaming MediaWiki XML dump reader and 1000-article chunk writer.

stream_pages walks a pages-articles export with constant memory, yielding
title/wikicode/timestamp per page in dump order.  write_chunks filters
nothing itself; callers apply should_filter first.  Chunk files are named
chunk_00000.jsonl, chunk_00001.jsonl, ... under a per-language directory
and only the last chunk may hold fewer than chunk_size articles.
"""
from __future__ import annotations

import bz2
import gzip
import io
import json
import re
import xml.etree.ElementTree as etree
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .schema import Article, compute_hash, serialize_article

CHUNK_SIZE = 1000
CHUNK_NAME = "chunk_%05d.jsonl"
MANIFEST_NAME = "manifest.json"


class MalformedDumpError(ValueError):
    """The dump XML could not be parsed; carries an approximate byte offset."""

    def __init__(self, message: str, byte_offset: int | None = None):
        self.byte_offset = byte_offset
        super().__init__(message)


class DuplicateRunError(RuntimeError):
    """A chunk manifest already exists in the output directory."""


@dataclass(frozen=True)
class RawPage:
    title: str
    wikicode: str
    last_revision: str
    dump_position: int


@dataclass
class ChunkManifest:
    language: str
    chunk_paths: list[str] = field(default_factory=list)
    article_count: int = 0


class _CountingReader(io.RawIOBase):
    """Wraps a binary stream, optionally replaying a sniffed prefix, and
    tracks bytes consumed for error reporting."""

    def __init__(self, raw: IO[bytes], head: bytes = b""):
        self.raw = raw
        self.head = head
        self.consumed = 0

    def readable(self) -> bool:
        return True

    def readinto(self, b) -> int:
        if self.head:
            n = min(len(b), len(self.head))
            b[:n] = self.head[:n]
            self.head = self.head[n:]
        else:
            data = self.raw.read(len(b))
            n = len(data)
            b[:n] = data
        self.consumed += n
        return n


def open_dump(source: str | Path | IO[bytes]) -> IO[bytes]:
    """Open a dump path or stream, transparently decompressing bzip2/gzip."""
    if isinstance(source, (str, Path)):
        source = open(source, "rb")
    if hasattr(source, "peek"):
        magic = source.peek(3)[:3]
    elif source.seekable():
        pos = source.tell()
        magic = source.read(3)
        source.seek(pos)
    else:
        magic = source.read(3)
        source = io.BufferedReader(_CountingReader(source, head=magic))
    if magic.startswith(b"BZh"):
        return bz2.open(source)
    if magic.startswith(b"\x1f\x8b"):
        return gzip.open(source)
    return source


def _local(tag: str) -> str:
    # dump tags carry the export-schema namespace; match on the local part
    _, _, local = tag.rpartition("}")
    return local


def stream_pages(source: str | Path | IO[bytes]) -> Iterator[RawPage]:
    """Yield RawPage records in document order with constant memory."""
    stream = open_dump(source)
    counter = _CountingReader(stream)
    buffered = io.BufferedReader(counter)
    position = 0
    title: str | None = None
    text: str | None = None
    timestamp: str | None = None
    root = None
    try:
        for event, elem in etree.iterparse(buffered, events=("start", "end")):
            if event == "start":
                if root is None:
                    root = elem
                if _local(elem.tag) == "page":
                    title = text = timestamp = None
                continue
            tag = _local(elem.tag)
            if tag == "title":
                title = elem.text or ""
            elif tag == "text":
                text = elem.text or ""
            elif tag == "timestamp":
                timestamp = elem.text or ""
            elif tag == "page":
                yield RawPage(
                    title=title or "",
                    wikicode=text or "",
                    last_revision=timestamp or "",
                    dump_position=position,
                )
                position += 1
                # drop processed subtrees so the root never grows
                if root is not None:
                    root.clear()
            elem.clear()
    except etree.ParseError as e:
        raise MalformedDumpError(
            f"malformed dump XML near byte {counter.consumed}: {e}",
            byte_offset=counter.consumed,
        ) from e


def should_filter(page: RawPage) -> bool:
    """True for redirect/website-stub pages (case-insensitive wikicode
    match) and pages with case-sensitive Category: in the title."""
    code = page.wikicode.casefold()
    if "#redirect" in code or "{{website-stub}}" in code:
        return True
    return "Category:" in page.title


def skeleton_article(page: RawPage) -> Article:
    return Article(
        title=page.title,
        wikicode=page.wikicode,
        hash=compute_hash(page.title, page.wikicode),
        last_revision=page.last_revision,
    )


def write_chunks(
    pages: Iterable[RawPage],
    out_dir: str | Path,
    language: str,
    chunk_size: int = CHUNK_SIZE,
    overwrite: bool = False,
) -> ChunkManifest:
    """Write filtered pages to chunk files of chunk_size skeleton articles.

    Preserves dump order; creates <out_dir>/<language>/chunk_NNNNN.jsonl
    plus a manifest.  An existing manifest means the ingest already ran.
    """
    lang_dir = Path(out_dir) / language
    manifest_path = lang_dir / MANIFEST_NAME
    if manifest_path.exists() and not overwrite:
        raise DuplicateRunError(f"manifest already present at {manifest_path}")
    lang_dir.mkdir(parents=True, exist_ok=True)
    manifest = ChunkManifest(language=language)
    buffer: list[RawPage] = []
    index = 0

    def flush():
        nonlocal index
        if not buffer:
            return
        name = CHUNK_NAME % index
        with open(lang_dir / name, "w", encoding="utf-8") as f:
            for page in buffer:
                f.write(serialize_article(skeleton_article(page)))
                f.write("\n")
        manifest.chunk_paths.append(name)
        manifest.article_count += len(buffer)
        index += 1
        buffer.clear()

    for page in pages:
        buffer.append(page)
        if len(buffer) >= chunk_size:
            flush()
    flush()
    if manifest.article_count:
        manifest_path.write_text(json.dumps({
            "language": manifest.language,
            "chunk_paths": manifest.chunk_paths,
            "article_count": manifest.article_count,
        }, indent=2), encoding="utf-8")
    return manifest


def fetch_dump(source: str, dest_dir: str | Path) -> Path:
    """Resolve a dump location to a local file, downloading http(s) URLs.

    Local paths pass through untouched; an existing download of the same
    URL is reused.
    """
    if not re.match(r"https?://", source, re.I):
        return Path(source)
    import requests

    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)
    name = source.rstrip("/").rsplit("/", 1)[-1] or "dump.xml"
    target = dest_dir / name
    if target.exists():
        return target
    tmp = target.with_suffix(target.suffix + ".part")
    with requests.get(source, stream=True, timeout=60) as resp:
        resp.raise_for_status()
        with open(tmp, "wb") as f:
            for chunk in resp.iter_content(chunk_size=1 << 20):
                f.write(chunk)
    tmp.replace(target)
    return target


def read_manifest(lang_dir: str | Path) -> ChunkManifest | None:
    path = Path(lang_dir) / MANIFEST_NAME
    if not path.exists():
        return None
    data = json.loads(path.read_text(encoding="utf-8"))
    return ChunkManifest(language=data["language"], chunk_paths=list(data["chunk_paths"]),
                         article_count=data["article_count"])
