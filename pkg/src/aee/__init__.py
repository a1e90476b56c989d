"""Answer-engine audit toolkit.

Decomposes source-cited answers into statements, cross-checks citations
against fetched source content, computes eight evaluation metrics, and
emits threshold-classified scorecards per engine.
"""

from .model import (
    AnalyzedAnswer,
    CitationMatrix,
    ConfidenceScore,
    QueryRecord,
    SourceRef,
    Statement,
    SupportMatrix,
    deserialize,
    serialize,
    validate,
)

__all__ = [
    "AnalyzedAnswer",
    "CitationMatrix",
    "ConfidenceScore",
    "QueryRecord",
    "SourceRef",
    "Statement",
    "SupportMatrix",
    "deserialize",
    "serialize",
    "validate",
]

__version__ = "0.1.0"
