"""Rule-based sentence segmentation with exact-reconstruction guarantees.

The segmenter is deterministic: a sentence break occurs after terminal
punctuation (plus any trailing close-quotes/brackets) followed by
whitespace, unless the text up to the punctuation ends in a configured
abbreviation.  Fullwidth CJK terminals break without requiring whitespace,
since those scripts do not separate sentences with spaces.

Concatenating sentence text + trailing_whitespace always reproduces the
input exactly; only a single ASCII space can be consumed by a break.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .schema import Citation, CitationNeeded, Sentence

#: terminals that need following whitespace (or end of text) to break
_SPACED_TERMINALS = frozenset(".!?…।")
#: fullwidth terminals that break unconditionally
_UNSPACED_TERMINALS = frozenset("。！？")
#: characters allowed between the terminal and the break point
_CLOSERS = frozenset("\"'”’»›)]｝」』】〉》")

DEFAULT_TERMINALS = frozenset(".!?…。！？।")

_EN_ABBREVIATIONS = (
    "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "Jr.", "Sr.", "vs.",
    "etc.", "e.g.", "i.e.", "cf.", "No.", "Vol.", "p.", "pp.", "Inc.",
    "Ltd.", "Co.", "approx.",
)


@dataclass(frozen=True)
class SegmenterRules:
    """Per-language segmentation knobs; see LanguageConfig's "segmenter" key."""

    terminal_punctuation: frozenset[str] = DEFAULT_TERMINALS
    abbreviation_exceptions: tuple[str, ...] = _EN_ABBREVIATIONS

    def __post_init__(self):
        if not self.terminal_punctuation:
            raise ValueError("terminal punctuation set must be non-empty")


def _is_abbreviation(text_through_punct: str, rules: SegmenterRules) -> bool:
    for abbr in rules.abbreviation_exceptions:
        if not text_through_punct.endswith(abbr):
            continue
        start = len(text_through_punct) - len(abbr)
        if start == 0 or not (text_through_punct[start - 1].isalnum()):
            return True
    return False


def segment_paragraph(clean_text: str, rules: SegmenterRules | None = None) -> list[tuple[str, str]]:
    """Split cleaned text into (sentence_text, trailing_whitespace) pairs.

    trailing_whitespace is " " exactly when the break consumed one space;
    the final sentence always carries "".
    """
    rules = rules or SegmenterRules()
    n = len(clean_text)
    if n == 0:
        return []
    out: list[tuple[str, str]] = []
    start = 0
    i = 0
    while i < n:
        ch = clean_text[i]
        if ch not in rules.terminal_punctuation:
            i += 1
            continue
        j = i + 1
        while j < n and clean_text[j] in _CLOSERS:
            j += 1
        if j >= n:
            break  # terminal at end of text: final sentence below
        unconditional = ch in _UNSPACED_TERMINALS
        if not unconditional and not clean_text[j].isspace():
            i += 1
            continue
        if ch == "." and _is_abbreviation(clean_text[start:i + 1], rules):
            i += 1
            continue
        if clean_text[j] == " ":
            out.append((clean_text[start:j], " "))
            start = j + 1
        else:
            # break without consuming (non-space whitespace stays as the
            # next sentence's leading character)
            out.append((clean_text[start:j], ""))
            start = j
        i = start
    if start < n:
        out.append((clean_text[start:], ""))
    return out


def assign_offsets(
    segments: list[tuple[str, str]],
    citations: list[Citation],
    citations_needed: list[CitationNeeded] = (),
) -> tuple[list[Sentence], int]:
    """Attach paragraph-scope citation marks to sentences.

    Input char_index values index the reconstruction (text + whitespace) of
    segments; output citations carry sentence-local offsets.  An offset
    exactly at a sentence end stays with that sentence.  Offsets beyond the
    reconstruction attach to the last sentence's end and count as warnings.
    Returns (sentences, warning_count).
    """
    warnings = 0
    starts: list[int] = []
    pos = 0
    for text, ws in segments:
        starts.append(pos)
        pos += len(text) + len(ws)
    per_sentence: list[tuple[list[Citation], list[CitationNeeded]]] = [
        ([], []) for _ in segments
    ]

    def place(mark, bucket: int):
        nonlocal warnings
        if not segments:
            return
        offset = mark.char_index
        for k, (text, _ws) in enumerate(segments):
            if offset <= starts[k] + len(text):
                local = max(0, offset - starts[k])
                per_sentence[k][bucket].append(replace(mark, char_index=local))
                return
        warnings += 1
        last = len(segments) - 1
        per_sentence[last][bucket].append(replace(mark, char_index=len(segments[last][0])))

    for c in citations:
        place(c, 0)
    for c in citations_needed:
        place(c, 1)
    if segments:
        sentences = [
            Sentence(text=text, trailing_whitespace=ws, citations=per_sentence[k][0],
                     citations_needed=per_sentence[k][1])
            for k, (text, ws) in enumerate(segments)
        ]
    else:
        sentences = []
        if citations or citations_needed:
            # marks with no visible text: keep them on an empty sentence
            sentences = [Sentence(
                text="", trailing_whitespace="",
                citations=[replace(c, char_index=0) for c in citations],
                citations_needed=[replace(c, char_index=0) for c in citations_needed],
            )]
    return sentences, warnings
