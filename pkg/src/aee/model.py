"""Core domain types for answer-engine audits.

Everything here is immutable after construction. The two central objects are
the citation matrix and the factual support matrix, both statement x source.
Indices are 1-based throughout, matching the citation numbering engines
display to users.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

QUERY_KINDS = ("expertise", "debate")
DEBATE_FRAMINGS = ("pro", "con")
FETCH_STATUSES = ("pending", "ok", "error_unreachable", "error_paywalled", "empty")
STANCES = ("pro", "con", "neutral", "not_applicable")

CONFIDENCE_LABELS = {
    1: "Strongly Not Confident",
    2: "Not Confident",
    3: "Neutral",
    4: "Confident",
    5: "Strongly Confident",
}

# supported/unsupported/unknown cell states of the support matrix
SUPPORTED = "supported"
UNSUPPORTED = "unsupported"
UNKNOWN = "unknown"

# raw judge verdicts per cell
RAW_JUDGMENTS = ("full", "partial", "none", "unknown")

# How a "partial" judge verdict folds into the binary support matrix.
# "strict" counts only full verdicts as supported; "lenient" also counts partial.
PARTIAL_CREDIT_POLICIES = ("strict", "lenient")


@dataclass(frozen=True)
class QueryRecord:
    id: str
    text: str
    kind: str
    debate_framing: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "text": self.text, "kind": self.kind}
        if self.debate_framing is not None:
            d["debate_framing"] = self.debate_framing
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QueryRecord":
        return cls(
            id=d["id"],
            text=d["text"],
            kind=d["kind"],
            debate_framing=d.get("debate_framing"),
        )


@dataclass(frozen=True)
class SourceRef:
    index: int
    url: str
    title: Optional[str] = None
    fetch_status: str = "pending"
    full_text: Optional[str] = None

    def to_dict(self) -> dict:
        d: dict = {"index": self.index, "url": self.url}
        if self.title is not None:
            d["title"] = self.title
        d["fetch_status"] = self.fetch_status
        if self.full_text is not None:
            d["full_text"] = self.full_text
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SourceRef":
        return cls(
            index=d["index"],
            url=d["url"],
            title=d.get("title"),
            fetch_status=d.get("fetch_status", "pending"),
            full_text=d.get("full_text"),
        )


@dataclass(frozen=True)
class Statement:
    index: int
    text: str
    relevant: bool
    stance: str
    cited_sources: frozenset[int]
    citation_spans: tuple[tuple[int, int, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "text": self.text,
            "relevant": self.relevant,
            "stance": self.stance,
            "cited_sources": sorted(self.cited_sources),
            "citation_spans": [
                {"start": s, "end": e, "raw": raw} for s, e, raw in self.citation_spans
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Statement":
        return cls(
            index=d["index"],
            text=d["text"],
            relevant=d["relevant"],
            stance=d["stance"],
            cited_sources=frozenset(d["cited_sources"]),
            citation_spans=tuple(
                (sp["start"], sp["end"], sp["raw"]) for sp in d.get("citation_spans", [])
            ),
        )


@dataclass(frozen=True)
class ConfidenceScore:
    value: int
    label: str

    @classmethod
    def from_value(cls, value: int) -> "ConfidenceScore":
        return cls(value=value, label=CONFIDENCE_LABELS[value])

    @classmethod
    def from_label(cls, label: str) -> "ConfidenceScore":
        for value, name in CONFIDENCE_LABELS.items():
            if name == label:
                return cls(value=value, label=name)
        raise ValueError(f"unknown confidence label: {label!r}")

    def to_dict(self) -> dict:
        return {"value": self.value, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "ConfidenceScore":
        return cls(value=d["value"], label=d["label"])


@dataclass(frozen=True)
class CitationMatrix:
    rows: int
    cols: int
    cells: tuple[tuple[int, ...], ...]

    def cell(self, s: int, k: int) -> int:
        """1-based lookup."""
        return self.cells[s - 1][k - 1]

    def total(self) -> int:
        return sum(sum(row) for row in self.cells)

    def column_cited(self, k: int) -> bool:
        return any(row[k - 1] for row in self.cells)

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "cells": [list(r) for r in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "CitationMatrix":
        return cls(
            rows=d["rows"],
            cols=d["cols"],
            cells=tuple(tuple(r) for r in d["cells"]),
        )

    @classmethod
    def from_statements(cls, cited: list[frozenset[int]], cols: int) -> "CitationMatrix":
        cells = tuple(
            tuple(1 if k in srcs else 0 for k in range(1, cols + 1)) for srcs in cited
        )
        return cls(rows=len(cited), cols=cols, cells=cells)


@dataclass(frozen=True)
class SupportMatrix:
    rows: int
    cols: int
    cells: tuple[tuple[str, ...], ...]
    raw_judgment: tuple[tuple[str, ...], ...]

    def cell(self, s: int, k: int) -> str:
        return self.cells[s - 1][k - 1]

    def column_known(self, k: int) -> bool:
        return self.rows == 0 or any(row[k - 1] != UNKNOWN for row in self.cells)

    def supported_total(self) -> int:
        return sum(1 for row in self.cells for c in row if c == SUPPORTED)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "cells": [list(r) for r in self.cells],
            "raw_judgment": [list(r) for r in self.raw_judgment],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SupportMatrix":
        return cls(
            rows=d["rows"],
            cols=d["cols"],
            cells=tuple(tuple(r) for r in d["cells"]),
            raw_judgment=tuple(tuple(r) for r in d["raw_judgment"]),
        )

    @classmethod
    def from_raw(
        cls, raw: list[list[str]], policy: str = "strict"
    ) -> "SupportMatrix":
        """Fold full/partial/none/unknown verdicts into the ternary matrix.

        Under the strict policy a partial verdict counts as unsupported;
        under lenient it counts as supported.
        """
        if policy not in PARTIAL_CREDIT_POLICIES:
            raise ValueError(f"unknown partial-credit policy: {policy!r}")
        supported_raw = {"full"} if policy == "strict" else {"full", "partial"}

        def fold(v: str) -> str:
            if v == "unknown":
                return UNKNOWN
            return SUPPORTED if v in supported_raw else UNSUPPORTED

        rows = len(raw)
        cols = len(raw[0]) if rows else 0
        return cls(
            rows=rows,
            cols=cols,
            cells=tuple(tuple(fold(v) for v in row) for row in raw),
            raw_judgment=tuple(tuple(row) for row in raw),
        )


@dataclass(frozen=True)
class AnalyzedAnswer:
    engine_id: str
    query: QueryRecord
    raw_text: str
    statements: tuple[Statement, ...]
    sources: tuple[SourceRef, ...]
    confidence: ConfidenceScore
    citation_matrix: CitationMatrix
    support_matrix: SupportMatrix
    dangling_citations: tuple[tuple[int, int], ...] = ()
    collapsed_duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "engine_id": self.engine_id,
            "query": self.query.to_dict(),
            "raw_text": self.raw_text,
            "statements": [s.to_dict() for s in self.statements],
            "sources": [s.to_dict() for s in self.sources],
            "confidence": self.confidence.to_dict(),
            "citation_matrix": self.citation_matrix.to_dict(),
            "support_matrix": self.support_matrix.to_dict(),
            "dangling_citations": [list(dc) for dc in self.dangling_citations],
            "collapsed_duplicates": self.collapsed_duplicates,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyzedAnswer":
        return cls(
            engine_id=d["engine_id"],
            query=QueryRecord.from_dict(d["query"]),
            raw_text=d["raw_text"],
            statements=tuple(Statement.from_dict(s) for s in d["statements"]),
            sources=tuple(SourceRef.from_dict(s) for s in d["sources"]),
            confidence=ConfidenceScore.from_dict(d["confidence"]),
            citation_matrix=CitationMatrix.from_dict(d["citation_matrix"]),
            support_matrix=SupportMatrix.from_dict(d["support_matrix"]),
            dangling_citations=tuple(tuple(dc) for dc in d.get("dangling_citations", [])),
            collapsed_duplicates=d.get("collapsed_duplicates", 0),
        )


def serialize(answer: AnalyzedAnswer) -> str:
    """Canonical on-disk form; stable so repeated runs are byte-identical."""
    return json.dumps(answer.to_dict(), indent=2, ensure_ascii=False) + "\n"


def deserialize(text: str) -> AnalyzedAnswer:
    return AnalyzedAnswer.from_dict(json.loads(text))


def validate(answer: AnalyzedAnswer) -> list[str]:
    """Check every type invariant; violations are returned, never raised."""
    violations: list[str] = []
    q = answer.query
    if q.kind not in QUERY_KINDS:
        violations.append(f"query kind {q.kind!r} is not one of {QUERY_KINDS}")
    if q.kind == "expertise" and q.debate_framing is not None:
        violations.append("expertise query carries a debate_framing")
    if q.debate_framing is not None and q.debate_framing not in DEBATE_FRAMINGS:
        violations.append(f"unknown debate_framing {q.debate_framing!r}")
    if not q.text.strip():
        violations.append("query text is empty after trimming")

    k = len(answer.sources)
    seen_indices = [src.index for src in answer.sources]
    if seen_indices != list(range(1, k + 1)):
        violations.append(f"source indices {seen_indices} are not contiguous 1..{k}")
    for src in answer.sources:
        if src.fetch_status not in FETCH_STATUSES:
            violations.append(f"source {src.index}: unknown fetch_status {src.fetch_status!r}")
        has_text = bool(src.full_text)
        if (src.fetch_status == "ok") != has_text:
            violations.append(
                f"source {src.index}: fetch_status={src.fetch_status} but "
                f"full_text {'present' if has_text else 'absent'}"
            )

    s = len(answer.statements)
    dangling = {(si, m) for si, m in answer.dangling_citations}
    for i, st in enumerate(answer.statements, start=1):
        if st.index != i:
            violations.append(f"statement at position {i} carries index {st.index}")
        if st.stance not in STANCES:
            violations.append(f"statement {i}: unknown stance {st.stance!r}")
        if st.stance != "not_applicable" and q.kind != "debate":
            violations.append(f"statement {i}: stance set on a non-debate query")
        for cited in st.cited_sources:
            if not (1 <= cited <= k) and (st.index, cited) not in dangling:
                violations.append(
                    f"statement {i}: citation of source {cited} is out of range "
                    f"and not recorded as dangling"
                )

    conf = answer.confidence
    if CONFIDENCE_LABELS.get(conf.value) != conf.label:
        violations.append(f"confidence value {conf.value} does not match label {conf.label!r}")

    cm = answer.citation_matrix
    sm = answer.support_matrix
    if (cm.rows, cm.cols) != (s, k):
        violations.append(f"citation matrix is {cm.rows}x{cm.cols}, expected {s}x{k}")
    if (sm.rows, sm.cols) != (s, k):
        violations.append(f"support matrix is {sm.rows}x{sm.cols}, expected {s}x{k}")

    if (cm.rows, cm.cols) == (s, k):
        for i, st in enumerate(answer.statements, start=1):
            for col in range(1, k + 1):
                expected = 1 if col in st.cited_sources else 0
                if cm.cell(i, col) != expected:
                    violations.append(
                        f"citation matrix cell ({i},{col}) disagrees with cited_sources"
                    )

    if (sm.rows, sm.cols) == (s, k) and s > 0:
        for src in answer.sources:
            if not (1 <= src.index <= k):
                continue  # already reported as a non-contiguous index
            col_unknown = all(sm.cell(i, src.index) == UNKNOWN for i in range(1, s + 1))
            if (src.fetch_status != "ok") != col_unknown:
                violations.append(
                    f"support matrix column {src.index} "
                    f"{'all-unknown' if col_unknown else 'has judged cells'} but source "
                    f"fetch_status={src.fetch_status}"
                )
        for i in range(1, s + 1):
            for col in range(1, k + 1):
                cell, raw = sm.cell(i, col), sm.raw_judgment[i - 1][col - 1]
                if raw not in RAW_JUDGMENTS:
                    violations.append(f"support cell ({i},{col}): unknown raw judgment {raw!r}")
                elif (raw == "unknown") != (cell == UNKNOWN):
                    violations.append(
                        f"support cell ({i},{col}): raw={raw} inconsistent with cell={cell}"
                    )
                # full => supported and none => unsupported under either
                # partial-credit policy; only "partial" is policy-dependent
                elif raw == "full" and cell != SUPPORTED:
                    violations.append(f"support cell ({i},{col}): raw=full but cell={cell}")
                elif raw == "none" and cell != UNSUPPORTED:
                    violations.append(f"support cell ({i},{col}): raw=none but cell={cell}")

    return violations
