"""Translation plumbing: extract sentences/headings, reinsert translations.

Uses the string-reverse test translator so the effect is visible without a
real model; excerpt translations are recomputed automatically.
"""
import tempfile
from pathlib import Path

from wikicite.langconfig import load_language_config
from wikicite.pipeline import TRANSLATORS, extract_translatables, insert_translations
from wikicite.schema import Paragraph, write_chunk_file
from wikicite.wikitext import article_from_wikitext

article, _ = article_from_wikitext(
    "Sorrel soup",
    "Sorrel soup is sharp. It is eaten cold or hot.<ref>{{cite web|url=https://e.org/s}}</ref>"
    "\n\n== Variants ==\nPolish cooks add potatoes.",
    "2024-05-01T00:00:00Z", load_language_config("en"))

with tempfile.TemporaryDirectory() as workdir:
    chunk = Path(workdir) / "chunk_00000.jsonl"
    write_chunk_file(chunk, [article])

    records = extract_translatables(chunk)
    print(f"extracted {len(records)} translatable records:")
    for r in records:
        print(f"  {r.kind:8s} path={r.element_path} {r.text!r}")

    translate = TRANSLATORS["reverse"]
    translated = translate([r.text for r in records], "en")
    for record, text in zip(records, translated):
        record.translated_text = text

    inserted = insert_translations(chunk, records)
    print(f"\ninserted {inserted} translations; sentences now read:")
    from wikicite.schema import read_chunk
    for element in read_chunk(chunk)[0].elements:
        if isinstance(element, Paragraph):
            for s in element.sentences:
                print(f"  {s.text!r} -> {s.translated_text!r}")
    for x in read_chunk(chunk)[0].excerpts_with_citations:
        print(f"  excerpt translation: {x.translated_text!r}")
