"""Rate-limited Wikipedia Action API client for article enrichments.

Fetches cross-lingual links and the first-revision (creation) datetime for
each article, stamping the retrieval time.  Redirects are never resolved:
a redirect title returns the redirect page's own data.  Requests are
paced to the configured rate (one in flight at a time) and retried with
exponential backoff on 429/5xx/network errors.

Chunk enrichment is resumable: articles already carrying both access-date
stamps are skipped, and the chunk file is replaced atomically.
"""
from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import requests

from .schema import Article, read_chunk, write_chunk_file

log = logging.getLogger(__name__)

_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


class EnrichmentError(RuntimeError):
    """Request failed after all retries."""


class MalformedResponse(EnrichmentError):
    """The API answered with something outside the expected shape."""


@dataclass(frozen=True)
class LangLinkSet:
    links: dict[str, str]
    access_date: str


@dataclass(frozen=True)
class RevisionInfo:
    first_revision: str
    access_date: str


@dataclass
class EnrichStats:
    articles_seen: int = 0
    articles_enriched: int = 0
    articles_skipped: int = 0
    articles_failed: int = 0
    api_calls: int = 0
    retries: int = 0


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _check_timestamp(value, context: str) -> str:
    if not isinstance(value, str) or not _TIMESTAMP_RE.match(value):
        raise MalformedResponse(f"bad timestamp in {context}: {value!r}")
    return value


class EnrichClient:
    """One Action API endpoint, one in-flight request, paced to a rate."""

    def __init__(
        self,
        api_url: str,
        rate_per_second: float = 1.0,
        max_attempts: int = 5,
        backoff_base: float = 1.0,
        backoff_cap: float = 60.0,
        session: requests.Session | None = None,
        timeout: float = 30.0,
    ):
        if rate_per_second <= 0:
            raise ValueError("rate must be positive")
        self.api_url = api_url
        self.min_interval = 1.0 / rate_per_second
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.backoff_cap = backoff_cap
        self.session = session or requests.Session()
        self.timeout = timeout
        self.stats = EnrichStats()
        self._last_request: float | None = None

    # -- transport

    def _pace(self):
        if self._last_request is not None:
            remaining = self._last_request + self.min_interval - time.monotonic()
            if remaining > 0:
                time.sleep(remaining)
        self._last_request = time.monotonic()

    def _request(self, params: dict) -> dict:
        base = {"action": "query", "format": "json", "formatversion": "2"}
        base.update(params)
        delay = self.backoff_base
        last_error = None
        for attempt in range(self.max_attempts):
            if attempt:
                self.stats.retries += 1
                time.sleep(min(delay, self.backoff_cap))
                delay *= 2
            self._pace()
            self.stats.api_calls += 1
            try:
                resp = self.session.get(self.api_url, params=base, timeout=self.timeout)
            except requests.RequestException as e:
                last_error = f"{type(e).__name__}: {e}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise EnrichmentError(f"API request failed: HTTP {resp.status_code}")
            try:
                return resp.json()
            except ValueError as e:
                raise MalformedResponse(f"API returned non-JSON body: {e}") from e
        raise EnrichmentError(f"API request failed after {self.max_attempts} attempts: {last_error}")

    def _query_pages(self, params: dict) -> dict | None:
        """Run a query, following continuation, merging page props; None for
        missing pages."""
        merged: dict | None = None
        cont: dict = {}
        while True:
            data = self._request({**params, **cont})
            try:
                pages = data["query"]["pages"]
                page = pages[0]
            except (KeyError, IndexError, TypeError) as e:
                raise MalformedResponse(f"unexpected query response shape: {e}") from e
            if page.get("missing"):
                return None
            if merged is None:
                merged = {"langlinks": [], "revisions": []}
            merged["langlinks"].extend(page.get("langlinks", []))
            merged["revisions"].extend(page.get("revisions", []))
            if "continue" in data:
                cont = {k: v for k, v in data["continue"].items() if k != "continue"}
                continue
            return merged

    # -- public fetches

    def _filter_links(self, raw_links: list, language: str) -> dict[str, str]:
        links: dict[str, str] = {}
        for entry in raw_links:
            try:
                lang, title = entry["lang"], entry["title"]
            except (KeyError, TypeError) as e:
                raise MalformedResponse(f"bad langlink entry: {entry!r}") from e
            # project codes only; drop sister/self entries
            if len(lang) == 2 and lang != language:
                links[lang] = title
        return links

    def fetch_langlinks(self, title: str, language: str) -> LangLinkSet | None:
        page = self._query_pages({"titles": title, "prop": "langlinks", "lllimit": "500"})
        if page is None:
            return None
        return LangLinkSet(links=self._filter_links(page["langlinks"], language),
                           access_date=_utcnow_iso())

    def fetch_first_revision(self, title: str, language: str) -> RevisionInfo | None:
        page = self._query_pages({
            "titles": title, "prop": "revisions", "rvlimit": "1",
            "rvdir": "newer", "rvprop": "timestamp"})
        if page is None or not page["revisions"]:
            return None
        ts = _check_timestamp(page["revisions"][0].get("timestamp"), f"revisions for {title!r}")
        return RevisionInfo(first_revision=ts, access_date=_utcnow_iso())

    def fetch_enrichment(self, title: str, language: str) -> tuple[LangLinkSet | None, RevisionInfo | None]:
        """Combined langlinks + first-revision query (one API call)."""
        page = self._query_pages({
            "titles": title, "prop": "langlinks|revisions", "lllimit": "500",
            "rvlimit": "1", "rvdir": "newer", "rvprop": "timestamp"})
        if page is None:
            return None, None
        now = _utcnow_iso()
        links = LangLinkSet(links=self._filter_links(page["langlinks"], language), access_date=now)
        revision = None
        if page["revisions"]:
            ts = _check_timestamp(page["revisions"][0].get("timestamp"), f"revisions for {title!r}")
            revision = RevisionInfo(first_revision=ts, access_date=now)
        return links, revision


def fetch_langlinks(title: str, language: str, api: str) -> LangLinkSet | None:
    return EnrichClient(api).fetch_langlinks(title, language)


def fetch_first_revision(title: str, language: str, api: str) -> RevisionInfo | None:
    return EnrichClient(api).fetch_first_revision(title, language)


def _needs_enrichment(article: Article) -> bool:
    return (article.cross_lingual_links_access_date is None
            or article.first_revision_access_date is None)


def enrich_article(article: Article, client: EnrichClient, language: str) -> Article:
    links, revision = client.fetch_enrichment(article.title, language)
    if links is not None:
        article = replace(article, cross_lingual_links=links.links,
                          cross_lingual_links_access_date=links.access_date)
    if revision is not None:
        article = replace(article, first_revision=revision.first_revision,
                          first_revision_access_date=revision.access_date)
    return article


def enrich_chunk(
    chunk_path: str | Path,
    api: str | EnrichClient,
    rate_per_second: float = 1.0,
    language: str | None = None,
    out_path: str | Path | None = None,
) -> EnrichStats:
    """Enrich every un-stamped article in a chunk file, in place by default.

    Articles already carrying both access dates are skipped (idempotent
    reruns make zero API calls).  Per-article failures are logged and leave
    fields absent; the chunk is written atomically via temp file + rename.
    """
    chunk_path = Path(chunk_path)
    client = api if isinstance(api, EnrichClient) else EnrichClient(api, rate_per_second)
    lang = language or chunk_path.parent.name
    articles = read_chunk(chunk_path)
    client.stats.articles_seen += len(articles)
    out: list[Article] = []
    for article in articles:
        if not _needs_enrichment(article):
            client.stats.articles_skipped += 1
            out.append(article)
            continue
        try:
            out.append(enrich_article(article, client, lang))
            client.stats.articles_enriched += 1
        except EnrichmentError as e:
            log.warning("enrichment failed for %r: %s", article.title, e)
            client.stats.articles_failed += 1
            out.append(article)
    target = Path(out_path) if out_path else chunk_path
    tmp = target.with_suffix(".tmp")
    write_chunk_file(tmp, out)
    tmp.replace(target)
    return client.stats
