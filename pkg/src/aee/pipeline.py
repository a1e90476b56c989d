"""Turn a raw answer capture into a fully analyzed answer.

Steps: decompose the answer into statements, attach citation markers, judge
relevance/stance/confidence, fetch source full text, judge factual support
per (statement, source) pair, then assemble and validate both matrices.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .citations import Marker, assign_markers_to_statements, build_citation_matrix, strip_markers
from .fetcher import FetchConfig, Reader, SourceCache, fetch_all
from .judge import JudgePipeline
from .model import (
    AnalyzedAnswer,
    QueryRecord,
    SourceRef,
    Statement,
    SupportMatrix,
    validate,
)


@dataclass(frozen=True)
class AnswerCapture:
    """Raw engine output, pre-analysis: text plus the ordered source list."""

    engine_id: str
    query: QueryRecord
    raw_text: str
    sources: tuple[SourceRef, ...]

    def to_dict(self) -> dict:
        return {
            "engine_id": self.engine_id,
            "query": self.query.to_dict(),
            "raw_text": self.raw_text,
            "sources": [
                {"index": s.index, "url": s.url, **({"title": s.title} if s.title else {})}
                for s in self.sources
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerCapture":
        return cls(
            engine_id=d["engine_id"],
            query=QueryRecord.from_dict(d["query"]),
            raw_text=d["raw_text"],
            sources=tuple(SourceRef.from_dict(s) for s in d["sources"]),
        )


def load_capture(text: str) -> AnswerCapture:
    return AnswerCapture.from_dict(json.loads(text))


def dump_capture(capture: AnswerCapture) -> str:
    return json.dumps(capture.to_dict(), indent=2, ensure_ascii=False) + "\n"


def locate_sentence_spans(raw_text: str, sentences: list[str]) -> list[tuple[int, int]]:
    """Find each decomposed sentence's span in the raw answer.

    Tolerates whitespace differences between the judge's copy and the raw
    text. Sentences are located left to right; a sentence that cannot be
    found gets a zero-width span at the previous end (markers then attach by
    the preceding-statement rule).
    """
    spans: list[tuple[int, int]] = []
    cursor = 0
    for sentence in sentences:
        pattern = r"\s+".join(re.escape(tok) for tok in sentence.split())
        match = re.compile(pattern).search(raw_text, cursor) if pattern else None
        if match is None:
            spans.append((cursor, cursor))
        else:
            spans.append((match.start(), match.end()))
            cursor = match.end()
    return spans


@dataclass
class AnalysisDiagnostics:
    dangling: list[tuple[int, int]]
    collapsed_duplicates: int
    marker_instances: int


def build_statements(
    raw_text: str,
    sentences: list[tuple[str, bool]],
    stances: Optional[tuple[list[int], list[int], list[int]]],
    k: int,
) -> tuple[list[Statement], AnalysisDiagnostics]:
    """Assemble statements with citations, relevance and stance attached."""
    spans = locate_sentence_spans(raw_text, [s for s, _ in sentences])
    per_statement: list[list[Marker]] = assign_markers_to_statements(raw_text, spans)

    stance_of: dict[int, str] = {}
    if stances is not None:
        agree, disagree, neutral = stances
        for i in agree:
            stance_of[i] = "pro"
        for i in disagree:
            stance_of[i] = "con"
        for i in neutral:
            stance_of[i] = "neutral"

    statements: list[Statement] = []
    instances = 0
    collapsed = 0
    for i, ((sentence, core), markers) in enumerate(zip(sentences, per_statement), start=1):
        cited: list[int] = []
        for mk in markers:
            cited.extend(mk.indices)
        instances += len(cited)
        # repeats of the same index in one statement collapse to a single
        # matrix cell (or dangling record); conservation stays exact:
        # instances == matrix total + collapsed + dangling
        collapsed += len(cited) - len(set(cited))
        statements.append(
            Statement(
                index=i,
                text=strip_markers(sentence),
                relevant=core,
                stance=stance_of.get(i, "not_applicable" if stances is None else "neutral"),
                cited_sources=frozenset(cited),
                citation_spans=tuple((mk.start, mk.end, mk.raw) for mk in markers),
            )
        )
    diagnostics = AnalysisDiagnostics(
        dangling=[], collapsed_duplicates=collapsed, marker_instances=instances
    )
    return statements, diagnostics


def judge_support_matrix(
    judge: JudgePipeline,
    statements: list[Statement],
    sources: list[SourceRef],
    policy: str = "strict",
    truncate_chars: int = FetchConfig().truncate_chars,
) -> SupportMatrix:
    """Judge every (statement, fetched source) pair; unfetched columns stay unknown."""
    raw: list[list[str]] = []
    for st in statements:
        row: list[str] = []
        for src in sources:
            if src.fetch_status != "ok" or not src.full_text:
                row.append("unknown")
            else:
                document = src.full_text[:truncate_chars]
                row.append(judge.judge_support(document, st.text))
        raw.append(row)
    if not raw:
        return SupportMatrix(rows=0, cols=len(sources), cells=(), raw_judgment=())
    return SupportMatrix.from_raw(raw, policy=policy)


class AnalysisError(RuntimeError):
    """One answer could not be analyzed; carries the capture identity."""


def analyze_capture(
    capture: AnswerCapture,
    judge: JudgePipeline,
    reader: Reader,
    source_cache: Optional[SourceCache] = None,
    fetch_config: FetchConfig = FetchConfig(),
    policy: str = "strict",
) -> AnalyzedAnswer:
    query = capture.query

    sentences = judge.decompose(query.text, capture.raw_text)

    stances: Optional[tuple[list[int], list[int], list[int]]] = None
    if query.kind == "debate":
        texts = [strip_markers(s) for s, _ in sentences]
        stances = judge.sort_stance(query.text, texts)

    confidence = judge.score_confidence(query.text, capture.raw_text)

    k = len(capture.sources)
    statements, diagnostics = build_statements(capture.raw_text, sentences, stances, k)
    citation_matrix, dangling = build_citation_matrix(statements, k)

    sources = fetch_all(list(capture.sources), reader, source_cache, fetch_config)
    support_matrix = judge_support_matrix(
        judge, statements, sources, policy=policy, truncate_chars=fetch_config.truncate_chars
    )

    answer = AnalyzedAnswer(
        engine_id=capture.engine_id,
        query=query,
        raw_text=capture.raw_text,
        statements=tuple(statements),
        sources=tuple(sources),
        confidence=confidence,
        citation_matrix=citation_matrix,
        support_matrix=support_matrix,
        dangling_citations=tuple(dangling),
        collapsed_duplicates=diagnostics.collapsed_duplicates,
    )
    violations = validate(answer)
    if violations:
        raise AnalysisError(
            f"analysis of {capture.engine_id}/{query.id} violated invariants: {violations}"
        )
    return answer
