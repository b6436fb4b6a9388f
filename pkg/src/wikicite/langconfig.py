"""Per-wiki-project parser configuration.

Each Wikipedia project has its own namespace prefixes (File:/Fichier:/...),
template prefixes, and infobox naming conventions, so the parser takes them
as data.  Configs ship as JSON documents under wikicite/data with the keys:

    language, file_media_prefixes, template_prefixes,
    infobox_template_titles, interwiki_prefixes

plus optional "segmenter" (terminal_punctuation, abbreviation_exceptions),
"extra_citation_templates", and "extra_citation_needed_templates" keys.
Prefix matching is case-insensitive on the prefix part.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .segment import SegmenterRules

log = logging.getLogger(__name__)

BUILTIN_LANGUAGES = ("en", "fr", "de", "es", "ru", "generic")


@dataclass(frozen=True)
class LanguageConfig:
    language: str
    file_media_prefixes: tuple[str, ...]
    template_prefixes: tuple[str, ...]
    infobox_template_titles: tuple[str, ...]
    interwiki_prefixes: tuple[str, ...]
    segmenter: SegmenterRules = field(default_factory=SegmenterRules)
    extra_citation_templates: tuple[str, ...] = ()
    extra_citation_needed_templates: tuple[str, ...] = ()

    def __post_init__(self):
        for group in (self.file_media_prefixes, self.template_prefixes,
                      self.infobox_template_titles, self.interwiki_prefixes):
            if any(not p for p in group):
                raise ValueError("prefixes must be non-empty strings")


def _norm_prefix(prefix: str) -> str:
    return prefix.rstrip(":").strip().casefold()


def prefix_of(link_target: str) -> str | None:
    """The namespace/interwiki prefix of a wikilink target, normalized."""
    head, sep, _ = link_target.lstrip().lstrip(":").partition(":")
    if not sep:
        return None
    return _norm_prefix(head)


def matches_prefix(link_target: str, prefixes: tuple[str, ...]) -> bool:
    head = prefix_of(link_target)
    if head is None:
        return False
    return any(head == _norm_prefix(p) for p in prefixes)


def config_from_dict(data: dict) -> LanguageConfig:
    seg = data.get("segmenter") or {}
    rules = SegmenterRules(
        terminal_punctuation=frozenset(seg["terminal_punctuation"])
        if seg.get("terminal_punctuation") else SegmenterRules.terminal_punctuation,
        abbreviation_exceptions=tuple(seg.get("abbreviation_exceptions", ()))
        if "abbreviation_exceptions" in seg else SegmenterRules.abbreviation_exceptions,
    )
    return LanguageConfig(
        language=data["language"],
        file_media_prefixes=tuple(data["file_media_prefixes"]),
        template_prefixes=tuple(data["template_prefixes"]),
        infobox_template_titles=tuple(data["infobox_template_titles"]),
        interwiki_prefixes=tuple(data["interwiki_prefixes"]),
        segmenter=rules,
        extra_citation_templates=tuple(data.get("extra_citation_templates", ())),
        extra_citation_needed_templates=tuple(data.get("extra_citation_needed_templates", ())),
    )


def load_language_config(language_or_path: str) -> LanguageConfig:
    """Load a packaged config by language code, or any config JSON by path.

    Unknown languages fall back to a generic File:/Template:/Infobox config
    so parsing stays total; project-specific prefixes are then missed.
    """
    p = Path(language_or_path)
    if p.suffix == ".json" or p.exists():
        data = json.loads(p.read_text(encoding="utf-8"))
        return config_from_dict(data)
    name = language_or_path.lower()
    if name in BUILTIN_LANGUAGES:
        text = resources.files("wikicite.data").joinpath(f"{name}.json").read_text("utf-8")
        return config_from_dict(json.loads(text))
    log.warning("no packaged parser config for %r; using generic defaults", language_or_path)
    text = resources.files("wikicite.data").joinpath("generic.json").read_text("utf-8")
    data = json.loads(text)
    data["language"] = language_or_path
    return config_from_dict(data)
