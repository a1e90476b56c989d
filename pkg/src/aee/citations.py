"""Inline citation marker parsing.

Recognized grammar: bracketed single markers "[3]", adjacent runs "[1][2]"
(merged into one span), comma lists "[1, 2]", and range shorthand "[1-3]"
(expanded). Superscript-style citations must be normalized to bracket form
by capture adapters before they reach this module.

Parsing is deterministic and pure: the same text always yields the same
markers and spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import CitationMatrix, Statement

# One bracket group whose content could plausibly be a citation marker.
_BRACKET_RE = re.compile(r"\[([^\[\]]*)\]")
# Content of a well-formed group: integers, comma lists, ranges.
_CONTENT_RE = re.compile(r"\s*\d+\s*(?:-\s*\d+\s*)?(?:,\s*\d+\s*(?:-\s*\d+\s*)?)*")

RANGE_EXPANSION_CAP = 100  # a "[1-5000]" is treated as malformed, not a marker


@dataclass(frozen=True)
class Marker:
    """One marker run: its span in the text and the indices it cites."""

    start: int
    end: int
    raw: str
    indices: tuple[int, ...]


@dataclass(frozen=True)
class ParseDiagnostic:
    start: int
    end: int
    raw: str
    reason: str


def _parse_content(content: str) -> tuple[int, ...] | str:
    """Parse one bracket's content; returns indices or a rejection reason."""
    if _CONTENT_RE.fullmatch(content) is None:
        return "bracket content does not match the marker grammar"
    indices: list[int] = []
    for item in content.split(","):
        item = item.strip()
        if "-" in item:
            lo_s, hi_s = item.split("-", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                return f"descending range {item!r}"
            if hi - lo + 1 > RANGE_EXPANSION_CAP:
                return f"range {item!r} expands past the cap"
            indices.extend(range(lo, hi + 1))
        else:
            indices.append(int(item))
    if any(i < 1 for i in indices):
        return "citation indices must be positive"
    return tuple(indices)


def extract_markers(text: str) -> tuple[list[Marker], list[ParseDiagnostic]]:
    """Find all citation markers in text.

    Returns non-overlapping markers sorted by offset, plus diagnostics for
    bracket groups that resemble markers but fail the grammar. Adjacent valid
    groups (no characters between them) merge into a single marker span.
    Indices are not range-checked against the source count here.
    """
    markers: list[Marker] = []
    diagnostics: list[ParseDiagnostic] = []
    run: list[tuple[int, int, tuple[int, ...]]] = []  # adjacent valid groups

    def flush() -> None:
        if not run:
            return
        start, end = run[0][0], run[-1][1]
        indices: list[int] = []
        for _, _, idx in run:
            indices.extend(idx)
        markers.append(Marker(start=start, end=end, raw=text[start:end], indices=tuple(indices)))
        run.clear()

    for m in _BRACKET_RE.finditer(text):
        parsed = _parse_content(m.group(1))
        if isinstance(parsed, str):
            flush()
            diagnostics.append(
                ParseDiagnostic(start=m.start(), end=m.end(), raw=m.group(0), reason=parsed)
            )
            continue
        if run and m.start() != run[-1][1]:
            flush()
        run.append((m.start(), m.end(), parsed))
    flush()
    return markers, diagnostics


_SPACE_BEFORE_PUNCT_RE = re.compile(r" +([.,;:!?])")


def strip_markers(text: str) -> str:
    """Remove recognized markers, collapsing the whitespace they leave behind."""
    markers, _ = extract_markers(text)
    if not markers:
        return text
    out: list[str] = []
    cursor = 0
    for mk in markers:
        out.append(text[cursor : mk.start])
        cursor = mk.end
    out.append(text[cursor:])
    cleaned = "".join(out)
    cleaned = re.sub(r"  +", " ", cleaned)
    cleaned = _SPACE_BEFORE_PUNCT_RE.sub(r"\1", cleaned)
    # a marker at the start or end of the text may leave a stray edge space
    return cleaned.strip(" ") if markers and (markers[0].start == 0 or markers[-1].end == len(text)) else cleaned


def assign_markers_to_statements(
    text: str, spans: list[tuple[int, int]]
) -> list[list[Marker]]:
    """Attach each marker in text to a statement span.

    A marker inside a span belongs to that statement. A marker between spans
    (e.g. trailing a sentence terminator) attaches to the preceding statement;
    a marker before the first span attaches to the first.
    """
    markers, _ = extract_markers(text)
    per_statement: list[list[Marker]] = [[] for _ in spans]
    if not spans:
        return per_statement
    for mk in markers:
        owner = 0
        for i, (start, end) in enumerate(spans):
            if start <= mk.start < end:
                owner = i
                break
            if mk.start >= end:
                owner = i
        per_statement[owner].append(mk)
    return per_statement


def build_citation_matrix(
    statements: list[Statement], k: int
) -> tuple[CitationMatrix, list[tuple[int, int]]]:
    """Materialize the statement x source citation matrix.

    Citations outside 1..k are excluded from the matrix and returned as
    dangling (statement index, cited index) pairs.
    """
    dangling: list[tuple[int, int]] = []
    in_range: list[frozenset[int]] = []
    for st in statements:
        kept = set()
        for cited in sorted(st.cited_sources):
            if 1 <= cited <= k:
                kept.add(cited)
            else:
                dangling.append((st.index, cited))
        in_range.append(frozenset(kept))
    return CitationMatrix.from_statements(in_range, k), dangling
