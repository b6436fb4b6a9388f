"""wikicite: MediaWiki dump to cited-corpus extraction toolkit."""

__version__ = "0.1.0"

from .schema import (  # noqa: F401
    Article,
    Citation,
    CitationNeeded,
    Code,
    Element,
    ExcerptWithCitations,
    Heading,
    Infobox,
    Math,
    Paragraph,
    Preformatted,
    SchemaError,
    Sentence,
    Table,
    compute_hash,
    deserialize_article,
    serialize_article,
)
