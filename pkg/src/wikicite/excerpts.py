"""Derives excerpts-with-citations from parsed article elements.

An excerpt is the span of up to three consecutive sentences of one
paragraph (fewer at paragraph start) whose final sentence carries at least
one citation.  Excerpts may overlap and duplicates are kept; heading
citations never produce excerpts.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Callable, Iterator

from .schema import Article, Citation, Element, ExcerptWithCitations, Heading, Paragraph


def build_excerpts(elements: list[Element]) -> list[ExcerptWithCitations]:
    out: list[ExcerptWithCitations] = []
    for element in elements:
        if not isinstance(element, Paragraph):
            continue
        sentences = element.sentences
        for i, sentence in enumerate(sentences):
            if not sentence.citations:
                continue
            window = sentences[max(0, i - 2):i + 1]
            parts: list[str] = []
            for s in window[:-1]:
                parts.append(s.text)
                parts.append(s.trailing_whitespace)
            parts.append(window[-1].text)
            text = "".join(parts)
            # citation offsets are rebased from the final sentence onto the
            # excerpt text
            shift = len(text) - len(sentence.text)
            citations = [replace(c, char_index=c.char_index + shift) for c in sentence.citations]
            translated = None
            if all(s.translated_text is not None for s in window):
                translated = " ".join(s.translated_text for s in window if s.translated_text)
            out.append(ExcerptWithCitations(text=text, translated_text=translated, citations=citations))
    return out


def iter_citations(article: Article) -> Iterator[Citation]:
    """All citations in sentence/heading elements (excerpt copies excluded)."""
    for element in article.elements:
        if isinstance(element, Paragraph):
            for sentence in element.sentences:
                yield from sentence.citations
        elif isinstance(element, Heading):
            yield from element.citations


def map_citations(article: Article, fn: Callable[[Citation], Citation]) -> Article:
    """Apply fn to every element citation and rebuild the excerpt list.

    Keeping excerpts derived (instead of patching their copies) guarantees
    they stay consistent with the final sentences they came from.
    """
    new_elements: list[Element] = []
    for element in article.elements:
        if isinstance(element, Paragraph):
            new_elements.append(Paragraph(sentences=[
                replace(s, citations=[fn(c) for c in s.citations]) for s in element.sentences]))
        elif isinstance(element, Heading):
            new_elements.append(replace(element, citations=[fn(c) for c in element.citations]))
        else:
            new_elements.append(element)
    return replace(article, elements=new_elements,
                   excerpts_with_citations=build_excerpts(new_elements))
