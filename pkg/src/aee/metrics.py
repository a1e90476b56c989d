"""The eight audit metrics, computed per analyzed answer.

All ratio arithmetic is exact (fractions.Fraction); every ratio keeps its
numerator and denominator so aggregation is auditable. Metrics that do not
apply to an answer (e.g. the debate-only binary metrics on an expertise
query) report n_a and are excluded from aggregates.

Sources that could not be fetched ("unknown" support columns) are excluded
from every calculation that relies on source full text, but still count in
the listed-source denominators of the uncited-sources and source-necessity
ratios, which need only the source list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cover import CoverResult, solve_min_cover
from .model import SUPPORTED, AnalyzedAnswer

METRIC_IDS = (
    "one_sided",
    "overconfident",
    "relevant_ratio",
    "uncited_ratio",
    "unsupported_ratio",
    "necessity_ratio",
    "accuracy_ratio",
    "thoroughness_ratio",
)

# metrics that only apply to debate queries
DEBATE_ONLY = ("one_sided", "overconfident")


class UndefinedMetricError(ValueError):
    """A metric's denominator is structurally zero (e.g. an empty answer)."""


@dataclass(frozen=True)
class MetricValue:
    numerator: Optional[int]
    denominator: Optional[int]
    applicable: bool

    @classmethod
    def na(cls) -> "MetricValue":
        return cls(numerator=None, denominator=None, applicable=False)

    @classmethod
    def ratio(cls, num: int, den: int) -> "MetricValue":
        if den == 0:
            raise UndefinedMetricError("zero denominator")
        return cls(numerator=num, denominator=den, applicable=True)

    @classmethod
    def binary(cls, value: int) -> "MetricValue":
        return cls(numerator=value, denominator=1, applicable=True)

    @property
    def value(self) -> Optional[Fraction]:
        if not self.applicable:
            return None
        return Fraction(self.numerator, self.denominator)

    def to_dict(self) -> dict:
        if not self.applicable:
            return {"applicable": False}
        return {
            "applicable": True,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "value": f"{self.numerator}/{self.denominator}",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricValue":
        if not d.get("applicable", False):
            return cls.na()
        return cls(numerator=d["numerator"], denominator=d["denominator"], applicable=True)


@dataclass(frozen=True)
class AnswerStats:
    engine_id: str
    query_id: str
    query_kind: str
    num_statements: int
    num_sources: int
    num_citation_cells: int
    confidence: int

    def to_dict(self) -> dict:
        return {
            "engine_id": self.engine_id,
            "query_id": self.query_id,
            "query_kind": self.query_kind,
            "num_statements": self.num_statements,
            "num_sources": self.num_sources,
            "num_citation_cells": self.num_citation_cells,
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerStats":
        return cls(**d)


@dataclass(frozen=True)
class MetricReport:
    stats: AnswerStats
    one_sided: MetricValue
    overconfident: MetricValue
    relevant_ratio: MetricValue
    uncited_ratio: MetricValue
    unsupported_ratio: MetricValue
    necessity_ratio: MetricValue
    accuracy_ratio: MetricValue
    thoroughness_ratio: MetricValue
    cover_witness: tuple[int, ...] = ()

    def metric(self, metric_id: str) -> MetricValue:
        if metric_id not in METRIC_IDS:
            raise KeyError(metric_id)
        return getattr(self, metric_id)

    def to_dict(self) -> dict:
        d: dict = {"stats": self.stats.to_dict()}
        for mid in METRIC_IDS:
            d[mid] = self.metric(mid).to_dict()
        d["cover_witness"] = list(self.cover_witness)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(
            stats=AnswerStats.from_dict(d["stats"]),
            cover_witness=tuple(d.get("cover_witness", [])),
            **{mid: MetricValue.from_dict(d[mid]) for mid in METRIC_IDS},
        )


def serialize_report(report: MetricReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def deserialize_report(text: str) -> MetricReport:
    return MetricReport.from_dict(json.loads(text))


def _known_columns(answer: AnalyzedAnswer) -> list[int]:
    return [src.index for src in answer.sources if src.fetch_status == "ok"]


def one_sided(answer: AnalyzedAnswer) -> MetricValue:
    """0 iff both pro and con statements are present; debate queries only."""
    if answer.query.kind != "debate":
        return MetricValue.na()
    stances = {st.stance for st in answer.statements}
    balanced = "pro" in stances and "con" in stances
    return MetricValue.binary(0 if balanced else 1)


def overconfident(answer: AnalyzedAnswer) -> MetricValue:
    """1 iff one-sided with maximal language confidence; debate queries only."""
    if answer.query.kind != "debate":
        return MetricValue.na()
    one = one_sided(answer)
    return MetricValue.binary(1 if (one.numerator == 1 and answer.confidence.value == 5) else 0)


def relevant_ratio(answer: AnalyzedAnswer) -> MetricValue:
    n = len(answer.statements)
    if n == 0:
        raise UndefinedMetricError("answer has no statements")
    return MetricValue.ratio(sum(1 for st in answer.statements if st.relevant), n)


def uncited_ratio(answer: AnalyzedAnswer) -> MetricValue:
    """Fraction of listed sources never referenced by any citation cell.

    Unfetchable sources still count: this needs only the source list.
    """
    k = len(answer.sources)
    if k == 0:
        raise UndefinedMetricError("answer lists no sources")
    cited = sum(1 for col in range(1, k + 1) if answer.citation_matrix.column_cited(col))
    return MetricValue.ratio(k - cited, k)


def unsupported_ratio(answer: AnalyzedAnswer) -> MetricValue:
    relevant = [st for st in answer.statements if st.relevant]
    known = _known_columns(answer)
    if not relevant or not known:
        return MetricValue.na()
    sm = answer.support_matrix
    unsupported = sum(
        1
        for st in relevant
        if not any(sm.cell(st.index, col) == SUPPORTED for col in known)
    )
    return MetricValue.ratio(unsupported, len(relevant))


def solve_cover(answer: AnalyzedAnswer) -> CoverResult:
    return solve_min_cover(answer.support_matrix)


def necessity_ratio(answer: AnalyzedAnswer) -> MetricValue:
    if not _known_columns(answer):
        return MetricValue.na()
    k = len(answer.sources)
    if k == 0:
        raise UndefinedMetricError("answer lists no sources")
    return MetricValue.ratio(solve_cover(answer).size, k)


def _accurate_citations(answer: AnalyzedAnswer) -> int:
    cm, sm = answer.citation_matrix, answer.support_matrix
    return sum(
        1
        for s in range(1, cm.rows + 1)
        for col in range(1, cm.cols + 1)
        if cm.cell(s, col) == 1 and sm.cell(s, col) == SUPPORTED
    )


def accuracy_ratio(answer: AnalyzedAnswer) -> MetricValue:
    """Fraction of citation cells landing on a supporting source."""
    cm, sm = answer.citation_matrix, answer.support_matrix
    known = set(_known_columns(answer))
    citations_judged = sum(
        1
        for s in range(1, cm.rows + 1)
        for col in range(1, cm.cols + 1)
        if cm.cell(s, col) == 1 and col in known
    )
    if citations_judged == 0:
        return MetricValue.na()
    return MetricValue.ratio(_accurate_citations(answer), citations_judged)


def thoroughness_ratio(answer: AnalyzedAnswer) -> MetricValue:
    """Fraction of supporting relationships the answer actually cites."""
    supported = answer.support_matrix.supported_total()
    if supported == 0:
        return MetricValue.na()
    return MetricValue.ratio(_accurate_citations(answer), supported)


def compute_report(answer: AnalyzedAnswer) -> MetricReport:
    cover = solve_cover(answer)
    known = _known_columns(answer)
    k = len(answer.sources)
    necessity = (
        MetricValue.ratio(cover.size, k) if (known and k > 0) else MetricValue.na()
    )
    stats = AnswerStats(
        engine_id=answer.engine_id,
        query_id=answer.query.id,
        query_kind=answer.query.kind,
        num_statements=len(answer.statements),
        num_sources=k,
        num_citation_cells=answer.citation_matrix.total(),
        confidence=answer.confidence.value,
    )
    return MetricReport(
        stats=stats,
        one_sided=one_sided(answer),
        overconfident=overconfident(answer),
        relevant_ratio=relevant_ratio(answer),
        uncited_ratio=uncited_ratio(answer),
        unsupported_ratio=unsupported_ratio(answer),
        necessity_ratio=necessity,
        accuracy_ratio=accuracy_ratio(answer),
        thoroughness_ratio=thoroughness_ratio(answer),
        cover_witness=cover.witness,
    )
