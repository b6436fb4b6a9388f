"""Web source scraping: download, text extraction, filters, error taxonomy.

Every failure mode is captured into citation fields rather than raised:
network problems become source_download_error (recorded verbatim), while
HTTP 4xx/5xx statuses, unextractable/empty documents, and too-short text
become source_extract_error.  Exactly one of source_text,
source_download_error, source_extract_error is set per scraped citation.

Downloads honor a per-request timeout and abort once the decoded body
exceeds the character cap.  Bulk scraping runs a bounded worker pool with
per-host serialization and a politeness delay between same-host requests.
"""
from __future__ import annotations

import codecs
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from http.client import responses as _http_reasons
from urllib.parse import urlsplit

import requests

from .excerpts import iter_citations, map_citations
from .htmltext import html_to_text, plain_to_text
from .schema import Article, Citation

log = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "wikicite-scraper/0.1 (research corpus builder; batch citation scraper)"


class ExtractError(Exception):
    """Text extraction failed; str() is the message stored on the citation."""


@dataclass(frozen=True)
class ScrapePolicy:
    timeout_seconds: float = 10.0
    max_chars: int = 1_000_000
    min_tokens: int = 100
    max_concurrent: int = 4
    per_host_delay: float = 1.0
    retries: int = 0
    user_agent: str = DEFAULT_USER_AGENT

    def __post_init__(self):
        if self.timeout_seconds <= 0 or self.max_chars <= 0 or self.min_tokens <= 0:
            raise ValueError("timeout, max_chars, and min_tokens must be positive")
        if self.max_concurrent < 1 or self.per_host_delay <= 0:
            raise ValueError("max_concurrent and per_host_delay must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ScrapePolicy":
        return cls(**data)


@dataclass(frozen=True)
class ScrapeOutcome:
    status: str  # success | download_error | extract_error
    download_date: str
    content_type: str | None = None
    num_chars: int | None = None
    text: str | None = None
    error_message: str | None = None

    def __post_init__(self):
        ok = self.status == "success"
        if ok != (self.text is not None) or ok != (self.error_message is None):
            raise ValueError("success <=> text present <=> no error message")
        if self.status == "download_error" and (self.text is not None or self.num_chars is not None):
            raise ValueError("download errors carry no body-derived fields")


@dataclass(frozen=True)
class DownloadResult:
    ok: bool
    status_code: int | None = None
    reason: str | None = None
    content_type: str | None = None
    text: str | None = None
    error: str | None = None


def _charset_of(content_type: str | None) -> str:
    if content_type and "charset=" in content_type:
        charset = content_type.split("charset=", 1)[1].split(";")[0].strip(" \"'")
        try:
            codecs.lookup(charset)
            return charset
        except LookupError:
            pass
    return "utf-8"


def download(url: str, policy: ScrapePolicy, session: requests.Session | None = None) -> DownloadResult:
    """Fetch a URL under the policy's timeout and decoded-size cap.

    Network failures are recorded verbatim on the result, never raised.
    """
    sess = session or _default_session()
    try:
        resp = sess.get(url, timeout=policy.timeout_seconds, stream=True,
                        headers={"User-Agent": policy.user_agent})
    except requests.RequestException as e:
        return DownloadResult(ok=False, error=f"{type(e).__name__}: {e}")
    with resp:
        content_type = resp.headers.get("Content-Type")
        byte_cap = 4 * policy.max_chars  # 1 char is at most 4 UTF-8 bytes
        chunks: list[bytes] = []
        total = 0
        overflowed = False
        try:
            for chunk in resp.iter_content(chunk_size=65536):
                chunks.append(chunk)
                total += len(chunk)
                if total > byte_cap:
                    overflowed = True
                    break
        except requests.RequestException as e:
            return DownloadResult(ok=False, error=f"{type(e).__name__}: {e}",
                                  content_type=content_type)
        text = b"".join(chunks).decode(_charset_of(content_type), errors="replace")
        if overflowed or len(text) > policy.max_chars:
            return DownloadResult(
                ok=False, content_type=content_type,
                error=f"Download is too large ({total / 1e6:.1f} MB)")
        return DownloadResult(ok=True, status_code=resp.status_code,
                              reason=resp.reason or _http_reasons.get(resp.status_code, ""),
                              content_type=content_type, text=text)


def _default_session() -> requests.Session:
    session = requests.Session()
    session.max_redirects = 5
    return session


def extract_text(content: str, content_type: str | None) -> str:
    """Extract readable text from a response body; raises ExtractError."""
    ct = (content_type or "").split(";")[0].strip().lower()
    if not ct:
        ct = "text/html" if content.lstrip()[:1] == "<" else "text/plain"
    if ct in ("text/html", "application/xhtml+xml", "application/html"):
        try:
            text = html_to_text(content)
        except Exception as e:  # stdlib parser is tolerant; belt and braces
            raise ExtractError(f"Exception: {e}") from e
        if not text:
            raise ExtractError("No text extracted (HTML skeleton or empty document)")
        return text
    if ct.startswith("text/"):
        text = plain_to_text(content)
        if not text:
            raise ExtractError("No text extracted (empty document)")
        return text
    raise ExtractError(f"Unsupported content type: {ct}")


def token_filter(text: str, policy: ScrapePolicy) -> None:
    """Reject extracted text with fewer than min_tokens whitespace tokens."""
    count = len(text.split())
    if count < policy.min_tokens:
        raise ExtractError(f"Text is too short ({count} words)")


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def scrape_url(url: str, policy: ScrapePolicy, session: requests.Session | None = None) -> ScrapeOutcome:
    """Download + extract + filter one URL into a classified outcome."""
    result = download(url, policy, session)
    when = _utcnow_iso()
    if not result.ok:
        return ScrapeOutcome(status="download_error", download_date=when,
                             content_type=result.content_type, error_message=result.error)
    num_chars = len(result.text or "")
    if result.status_code and result.status_code >= 400:
        # body received but unusable: classified as an extraction error
        reason = (result.reason or "").lower()
        return ScrapeOutcome(status="extract_error", download_date=when,
                             content_type=result.content_type, num_chars=num_chars,
                             error_message=f"HTTP {result.status_code} ({reason})")
    try:
        text = extract_text(result.text or "", result.content_type)
        token_filter(text, policy)
    except ExtractError as e:
        return ScrapeOutcome(status="extract_error", download_date=when,
                             content_type=result.content_type, num_chars=num_chars,
                             error_message=str(e))
    return ScrapeOutcome(status="success", download_date=when,
                         content_type=result.content_type, num_chars=num_chars, text=text)


def apply_outcome(citation: Citation, outcome: ScrapeOutcome) -> Citation:
    return replace(
        citation,
        source_text=outcome.text,
        source_code_content_type=outcome.content_type,
        source_code_num_chars=outcome.num_chars,
        source_download_date=outcome.download_date,
        source_download_error=outcome.error_message if outcome.status == "download_error" else None,
        source_extract_error=outcome.error_message if outcome.status == "extract_error" else None,
    )


def scrape_citation(citation: Citation, policy: ScrapePolicy,
                    session: requests.Session | None = None) -> Citation:
    """Populate one web citation's source fields (citation.url required)."""
    if not citation.url:
        raise ValueError("scrape_citation requires a web citation (url present)")
    return apply_outcome(citation, scrape_url(citation.url, policy, session))


class _HostGate:
    """Serializes requests per host and enforces the politeness delay."""

    def __init__(self, delay: float):
        self.delay = delay
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._last: dict[str, float] = {}

    def _lock_for(self, host: str) -> threading.Lock:
        with self._guard:
            if host not in self._locks:
                self._locks[host] = threading.Lock()
            return self._locks[host]

    def run(self, host: str, fn):
        with self._lock_for(host):
            last = self._last.get(host)
            if last is not None:
                remaining = last + self.delay - time.monotonic()
                if remaining > 0:
                    time.sleep(remaining)
            self._last[host] = time.monotonic()
            return fn()


@dataclass
class ScrapeStats:
    attempted: int = 0
    success: int = 0
    download_error: int = 0
    extract_error: int = 0
    by_url: dict[str, str] = field(default_factory=dict)


def scrape_articles(articles: list[Article], policy: ScrapePolicy,
                    session_factory=None) -> tuple[list[Article], ScrapeStats]:
    """Scrape every unscraped web citation across the given articles.

    URLs are deduplicated (one fetch each); downloads run on a worker pool
    of policy.max_concurrent with per-host serialization.  Citations that
    already carry a source_download_date are left untouched, which makes
    re-running a partially scraped chunk cheap.
    """
    pending: list[str] = []
    seen: set[str] = set()
    for article in articles:
        for c in iter_citations(article):
            if c.url and c.source_download_date is None and c.url not in seen:
                seen.add(c.url)
                pending.append(c.url)

    gate = _HostGate(policy.per_host_delay)
    outcomes: dict[str, ScrapeOutcome] = {}
    stats = ScrapeStats(attempted=len(pending))
    make_session = session_factory or _default_session

    def task(url: str) -> tuple[str, ScrapeOutcome]:
        host = urlsplit(url).netloc
        session = make_session()
        return url, gate.run(host, lambda: scrape_url(url, policy, session))

    if pending:
        with ThreadPoolExecutor(max_workers=policy.max_concurrent) as pool:
            for url, outcome in pool.map(task, pending):
                outcomes[url] = outcome
                stats.by_url[url] = outcome.status
                setattr(stats, outcome.status, getattr(stats, outcome.status) + 1)

    def fill(c: Citation) -> Citation:
        if c.url and c.source_download_date is None and c.url in outcomes:
            return apply_outcome(c, outcomes[c.url])
        return c

    return [map_citations(a, fill) for a in articles], stats
