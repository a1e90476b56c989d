"""Per-engine aggregation, threshold classification, and scorecard rendering.

Aggregation is mean-of-ratios: every answer weighs equally, and answers where
a metric is n_a are excluded from both numerator and denominator. The
threshold table ships as a data file so deployments can override it as
expectations evolve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .metrics import METRIC_IDS, MetricReport

CLASSIFICATIONS = ("acceptable", "borderline", "problematic")

DEFAULT_GLYPHS = {"acceptable": "▲", "borderline": "●", "problematic": "▼"}

METRIC_TITLES = {
    "one_sided": "% One-Sided Answer",
    "overconfident": "% Overconfident Answer",
    "relevant_ratio": "% Relevant Statements",
    "uncited_ratio": "% Uncited Sources",
    "unsupported_ratio": "% Unsupported Statements",
    "necessity_ratio": "% Source Necessity",
    "accuracy_ratio": "% Citation Accuracy",
    "thoroughness_ratio": "% Citation Thoroughness",
}


class UndefinedAggregateError(ValueError):
    """Aggregation over an empty report list."""


@dataclass(frozen=True)
class ThresholdTable:
    # metric id -> classification -> [low, high) percentage range
    ranges: dict[str, dict[str, tuple[float, float]]]

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdTable":
        ranges = {
            metric: {name: (float(lo), float(hi)) for name, (lo, hi) in bands.items()}
            for metric, bands in data.items()
        }
        table = cls(ranges=ranges)
        table._check_partition()
        return table

    @classmethod
    def load(cls, path: Optional[str | Path] = None) -> "ThresholdTable":
        if path is None:
            text = resources.files("aee.data").joinpath("thresholds.json").read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))

    def _check_partition(self) -> None:
        for metric, bands in self.ranges.items():
            if set(bands) != set(CLASSIFICATIONS):
                raise ValueError(f"{metric}: bands must be exactly {CLASSIFICATIONS}")
            spans = sorted(bands.values())
            if spans[0][0] != 0 or spans[-1][1] != 100:
                raise ValueError(f"{metric}: bands must span [0,100)")
            for (_, hi), (lo, _) in zip(spans, spans[1:]):
                if hi != lo:
                    raise ValueError(f"{metric}: bands must partition [0,100) without gaps")


def classify(metric_id: str, percentage: float, table: ThresholdTable) -> str:
    """Band membership by half-open interval; exactly 100 joins the band
    whose upper bound is 100 (totality over [0,100])."""
    bands = table.ranges.get(metric_id)
    if bands is None:
        raise KeyError(f"unknown metric id {metric_id!r}")
    if not (0 <= percentage <= 100):
        raise ValueError(f"percentage out of range: {percentage}")
    for name, (lo, hi) in bands.items():
        if lo <= percentage < hi or (percentage == 100 and hi == 100):
            return name
    raise AssertionError(f"no band for {metric_id}={percentage}")


@dataclass(frozen=True)
class MetricAggregate:
    percentage: Optional[float]  # None when no applicable samples
    classification: Optional[str]
    sample_count: int
    exact: Optional[Fraction] = None

    def to_dict(self) -> dict:
        return {
            "percentage": self.percentage,
            "classification": self.classification,
            "sample_count": self.sample_count,
        }


@dataclass(frozen=True)
class Scorecard:
    engine_id: str
    metrics: dict[str, MetricAggregate]
    num_answers: int
    mean_sources: float
    mean_statements: float
    citations_per_statement: float
    confidence_histogram: dict[str, dict[int, int]]  # query kind -> value -> count

    def to_dict(self) -> dict:
        return {
            "engine_id": self.engine_id,
            "num_answers": self.num_answers,
            "basic_statistics": {
                "mean_sources": self.mean_sources,
                "mean_statements": self.mean_statements,
                "citations_per_statement": self.citations_per_statement,
            },
            "metrics": {mid: agg.to_dict() for mid, agg in self.metrics.items()},
            "confidence_histogram": {
                kind: {str(v): c for v, c in sorted(hist.items())}
                for kind, hist in sorted(self.confidence_histogram.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scorecard":
        return cls(
            engine_id=d["engine_id"],
            num_answers=d["num_answers"],
            mean_sources=d["basic_statistics"]["mean_sources"],
            mean_statements=d["basic_statistics"]["mean_statements"],
            citations_per_statement=d["basic_statistics"]["citations_per_statement"],
            metrics={
                mid: MetricAggregate(
                    percentage=m["percentage"],
                    classification=m["classification"],
                    sample_count=m["sample_count"],
                )
                for mid, m in d["metrics"].items()
            },
            confidence_histogram={
                kind: {int(v): c for v, c in hist.items()}
                for kind, hist in d["confidence_histogram"].items()
            },
        )


def aggregate(
    reports: list[MetricReport],
    table: Optional[ThresholdTable] = None,
    engine_id: Optional[str] = None,
) -> Scorecard:
    """Mean-of-ratios aggregation of per-answer reports into one scorecard."""
    if not reports:
        raise UndefinedAggregateError("cannot aggregate zero reports")
    if table is None:
        table = ThresholdTable.load()
    if engine_id is None:
        ids = {r.stats.engine_id for r in reports}
        engine_id = ids.pop() if len(ids) == 1 else "combined"

    metrics: dict[str, MetricAggregate] = {}
    for mid in METRIC_IDS:
        values = [r.metric(mid).value for r in reports if r.metric(mid).applicable]
        if not values:
            metrics[mid] = MetricAggregate(
                percentage=None, classification=None, sample_count=0
            )
            continue
        exact = Fraction(sum(values), len(values)) * 100
        pct = float(exact)
        metrics[mid] = MetricAggregate(
            percentage=pct,
            classification=classify(mid, pct, table),
            sample_count=len(values),
            exact=exact,
        )

    histogram: dict[str, dict[int, int]] = {}
    for r in reports:
        kind_hist = histogram.setdefault(r.stats.query_kind, {})
        kind_hist[r.stats.confidence] = kind_hist.get(r.stats.confidence, 0) + 1

    n = len(reports)
    return Scorecard(
        engine_id=engine_id,
        metrics=metrics,
        num_answers=n,
        mean_sources=sum(r.stats.num_sources for r in reports) / n,
        mean_statements=sum(r.stats.num_statements for r in reports) / n,
        citations_per_statement=(
            sum(r.stats.num_citation_cells for r in reports)
            / max(1, sum(r.stats.num_statements for r in reports))
        ),
        confidence_histogram=histogram,
    )


def render_json(scorecard: Scorecard) -> str:
    return json.dumps(scorecard.to_dict(), indent=2, ensure_ascii=False) + "\n"


def render_markdown(
    scorecard: Scorecard, glyphs: Optional[dict[str, str]] = None
) -> str:
    glyphs = glyphs or DEFAULT_GLYPHS
    lines = [
        f"# Scorecard: {scorecard.engine_id}",
        "",
        f"Answers evaluated: {scorecard.num_answers}",
        "",
        "## Basic Statistics",
        "",
        "| Statistic | Value |",
        "| --- | --- |",
        f"| Number of Sources | {scorecard.mean_sources:.1f} |",
        f"| Number of Statements | {scorecard.mean_statements:.1f} |",
        f"| # Citations / Statement | {scorecard.citations_per_statement:.1f} |",
        "",
        "## Metrics",
        "",
        "| Metric | Value | Rating | Samples |",
        "| --- | --- | --- | --- |",
    ]
    for mid in METRIC_IDS:
        agg = scorecard.metrics[mid]
        title = METRIC_TITLES[mid]
        if agg.percentage is None:
            lines.append(f"| {title} | n/a | n/a | 0 |")
        else:
            glyph = glyphs[agg.classification or "problematic"]
            lines.append(
                f"| {title} | {agg.percentage:.1f} | {glyph} {agg.classification} "
                f"| {agg.sample_count} |"
            )
    lines += ["", "## Confidence Distribution", ""]
    lines += ["| Query kind | 1 | 2 | 3 | 4 | 5 |", "| --- | --- | --- | --- | --- | --- |"]
    for kind, hist in sorted(scorecard.confidence_histogram.items()):
        counts = " | ".join(str(hist.get(v, 0)) for v in range(1, 6))
        lines.append(f"| {kind} | {counts} |")
    return "\n".join(lines) + "\n"


def render_comparison(scorecards: list[Scorecard], glyphs: Optional[dict[str, str]] = None) -> str:
    """One markdown table comparing all engines side by side."""
    glyphs = glyphs or DEFAULT_GLYPHS
    header = "| Metric | " + " | ".join(sc.engine_id for sc in scorecards) + " |"
    rule = "| --- |" + " --- |" * len(scorecards)
    lines = ["# Engine comparison", "", header, rule]
    for mid in METRIC_IDS:
        cells = []
        for sc in scorecards:
            agg = sc.metrics[mid]
            if agg.percentage is None:
                cells.append("n/a")
            else:
                cells.append(f"{agg.percentage:.1f} {glyphs[agg.classification or 'problematic']}")
        lines.append(f"| {METRIC_TITLES[mid]} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
