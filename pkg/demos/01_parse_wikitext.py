"""Parse one article's wikitext into structured elements.

Shows the element list, sentence segmentation, citation offsets, and the
derived excerpts for a small French article.
"""
from wikicite.langconfig import load_language_config
from wikicite.schema import Heading, Paragraph
from wikicite.wikitext import article_from_wikitext

WIKITEXT = """{{Infobox Livre
| titre = Les Hauts de Hurlevent
| auteur = [[Emily Brontë]]
}}
'''''Les Hauts de Hurlevent''''' est l'unique roman d'[[Emily Brontë]],
publié en 1847.<ref name="th">{{ouvrage |auteur=Darcy Thomas |titre=Les
sœurs Brontë |année=2013 |url=https://exemple.org/bronte |quote=Emily
Brontë avait deux sœurs}}</ref> Le roman dérouta la critique. Il est
aujourd'hui un classique.{{référence nécessaire|date=avril 2023}}

== Personnages ==
* Catherine Earnshaw
* Heathcliff, enfant trouvé<ref name="th"/>
"""

config = load_language_config("fr")
article, report = article_from_wikitext(
    "Les Hauts de Hurlevent", WIKITEXT, "2023-12-03T10:50:40Z", config)

print(f"hash: {article.hash[:16]}…   parse warnings: {report.warnings}\n")
for element in article.elements:
    if isinstance(element, Heading):
        print(f"Heading(level {element.level}): {element.text!r}")
    elif isinstance(element, Paragraph):
        print("Paragraph:")
        for s in element.sentences:
            print(f"  {s.text!r} + {s.trailing_whitespace!r}")
            for c in s.citations:
                print(f"    citation @ {c.char_index}: name={c.name} url={c.url}")
                if c.source_snippet:
                    print(f"      snippet: {c.source_snippet!r}")
            for c in s.citations_needed:
                print(f"    citation-needed @ {c.char_index}")
    else:
        print(f"{type(element).__name__}: {element.content[:60]!r}…")

print("\nexcerpts_with_citations:")
for x in article.excerpts_with_citations:
    print(f"  {x.text!r}  <- {len(x.citations)} citation(s)")

print("\narticle.text:")
print(article.text)
