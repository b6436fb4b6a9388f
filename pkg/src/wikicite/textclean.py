"""Plain-text cleanup applied to prose after markup removal.

Citation positions are tracked through cleaning with sentinel characters
(chosen from a pool guaranteed absent from the fragment), so every helper
here must preserve sentinel characters and their relative order.  Helpers
that re-encode text (mojibake repair) are applied segment-wise between
sentinels by the caller-facing functions.
"""
from __future__ import annotations

import html
import re

# Private-use-area candidates for position sentinels; pick_sentinels skips
# any that already occur in the fragment.
_SENTINEL_POOL = ""

_MOJIBAKE_MARKER = re.compile(r"[ÃÂ]|â€")
_HWS = " \t\xa0      "


def pick_sentinels(text: str, n: int = 2) -> str:
    """Return n distinct characters that do not occur in text."""
    out = [c for c in _SENTINEL_POOL if c not in text]
    if len(out) < n:
        raise ValueError("fragment exhausts the sentinel pool")
    return "".join(out[:n])


def decode_entities(text: str) -> str:
    """Decode HTML character references; map no-break spaces to plain spaces."""
    return html.unescape(text).replace("\xa0", " ")


def fix_mojibake(text: str) -> str:
    """Conservatively repair UTF-8 text that was decoded as cp1252/Latin-1.

    Only applied when telltale byte-pair artifacts are present and the
    reverse transcoding round-trips cleanly; anything else passes through.
    """
    if not _MOJIBAKE_MARKER.search(text):
        return text
    for encoding in ("cp1252", "latin-1"):
        try:
            fixed = text.encode(encoding).decode("utf-8")
        except (UnicodeEncodeError, UnicodeDecodeError):
            continue
        # A real repair always shrinks the string; equality means no-op.
        if len(fixed) < len(text):
            return fixed
    return text


def fix_mojibake_between(text: str, sentinels: str) -> str:
    """fix_mojibake applied per segment so sentinel characters survive."""
    if not sentinels or not any(s in text for s in sentinels):
        return fix_mojibake(text)
    pattern = "([" + re.escape(sentinels) + "])"
    parts = re.split(pattern, text)
    return "".join(p if p in sentinels else fix_mojibake(p) for p in parts)


def normalize_line_ws(line: str, sentinels: str = "") -> str:
    """Collapse horizontal whitespace runs to single spaces and trim ends.

    Sentinel characters are treated as zero-width: a run of whitespace
    containing sentinels collapses to the sentinels followed by one space,
    attaching each citation to the end of the word it follows.  Leading and
    trailing runs keep their sentinels but drop the whitespace.
    """
    out: list[str] = []
    pending_ws = False
    pending_sent: list[str] = []
    seen_visible = False
    for ch in line:
        if ch in _HWS:
            pending_ws = True
        elif sentinels and ch in sentinels:
            pending_sent.append(ch)
        else:
            if pending_sent:
                out.extend(pending_sent)
                pending_sent = []
            if pending_ws and seen_visible:
                out.append(" ")
            pending_ws = False
            out.append(ch)
            seen_visible = True
    out.extend(pending_sent)
    return "".join(out)


def visible_len(text: str, sentinels: str) -> int:
    """Length of text not counting sentinel characters."""
    if not sentinels:
        return len(text)
    return sum(1 for ch in text if ch not in sentinels)


def strip_sentinels(text: str, sentinels: str) -> tuple[str, list[tuple[str, int]]]:
    """Remove sentinels, returning clean text and (sentinel, offset) marks.

    Offsets index into the returned clean text at the position where each
    sentinel stood; marks preserve left-to-right order.
    """
    if not sentinels:
        return text, []
    out: list[str] = []
    marks: list[tuple[str, int]] = []
    pos = 0
    for ch in text:
        if ch in sentinels:
            marks.append((ch, pos))
        else:
            out.append(ch)
            pos += 1
    return "".join(out), marks
