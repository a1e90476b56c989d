import json
from fractions import Fraction
from pathlib import Path

import pytest

from aee.metrics import compute_report
from aee.scorecard import (
    Scorecard,
    ThresholdTable,
    UndefinedAggregateError,
    aggregate,
    classify,
    render_comparison,
    render_json,
    render_markdown,
)
from helpers import make_answer, worked_example_answer

GOLDENS = Path(__file__).parent / "goldens"

TABLE = ThresholdTable.load()


def test_default_table_covers_all_metrics():
    from aee.metrics import METRIC_IDS

    assert set(TABLE.ranges) == set(METRIC_IDS)


BOUNDARY_CASES = [
    ("one_sided", 0.0, "acceptable"),
    ("one_sided", 19.999, "acceptable"),
    ("one_sided", 20.0, "borderline"),
    ("one_sided", 39.999, "borderline"),
    ("one_sided", 40.0, "problematic"),
    ("one_sided", 100.0, "problematic"),
    ("overconfident", 20.0, "borderline"),
    ("relevant_ratio", 90.0, "acceptable"),
    ("relevant_ratio", 89.999, "borderline"),
    ("relevant_ratio", 70.0, "borderline"),
    ("relevant_ratio", 69.999, "problematic"),
    ("relevant_ratio", 100.0, "acceptable"),
    ("uncited_ratio", 4.999, "acceptable"),
    ("uncited_ratio", 5.0, "borderline"),
    ("uncited_ratio", 10.0, "problematic"),
    ("unsupported_ratio", 10.0, "borderline"),
    ("unsupported_ratio", 24.999, "borderline"),
    ("unsupported_ratio", 25.0, "problematic"),
    ("necessity_ratio", 80.0, "acceptable"),
    ("necessity_ratio", 79.999, "borderline"),
    ("necessity_ratio", 60.0, "borderline"),
    ("necessity_ratio", 59.999, "problematic"),
    ("accuracy_ratio", 90.0, "acceptable"),
    ("accuracy_ratio", 50.0, "borderline"),
    ("accuracy_ratio", 49.999, "problematic"),
    ("thoroughness_ratio", 50.0, "acceptable"),
    ("thoroughness_ratio", 20.0, "borderline"),
    ("thoroughness_ratio", 19.999, "problematic"),
    ("thoroughness_ratio", 100.0, "acceptable"),
]


@pytest.mark.parametrize("metric_id,pct,expected", BOUNDARY_CASES)
def test_boundary_classification(metric_id, pct, expected):
    assert classify(metric_id, pct, TABLE) == expected


def test_classify_guards():
    with pytest.raises(KeyError):
        classify("velocity", 50.0, TABLE)
    with pytest.raises(ValueError):
        classify("one_sided", 100.1, TABLE)
    with pytest.raises(ValueError):
        classify("one_sided", -0.1, TABLE)


# engine -> metric -> (published percentage, classification per the table)
PUBLISHED_SCORECARDS = {
    "youcom": {
        "one_sided": (51.6, "problematic"),
        "overconfident": (19.4, "acceptable"),
        "relevant_ratio": (75.5, "borderline"),
        "uncited_ratio": (1.1, "acceptable"),
        "unsupported_ratio": (30.8, "problematic"),
        "necessity_ratio": (69.0, "borderline"),
        "accuracy_ratio": (68.3, "borderline"),
        "thoroughness_ratio": (24.4, "borderline"),
    },
    "bingchat": {
        "one_sided": (48.7, "problematic"),
        "overconfident": (29.5, "borderline"),
        "relevant_ratio": (79.3, "borderline"),
        "uncited_ratio": (36.2, "problematic"),
        "unsupported_ratio": (23.1, "borderline"),
        "necessity_ratio": (50.4, "problematic"),
        "accuracy_ratio": (65.8, "borderline"),
        "thoroughness_ratio": (20.5, "borderline"),
    },
    "perplexity": {
        "one_sided": (83.4, "problematic"),
        "overconfident": (81.6, "problematic"),
        "relevant_ratio": (82.0, "borderline"),
        "uncited_ratio": (8.4, "borderline"),
        "unsupported_ratio": (31.6, "problematic"),
        "necessity_ratio": (68.9, "borderline"),
        "accuracy_ratio": (49.0, "problematic"),
        "thoroughness_ratio": (23.0, "borderline"),
    },
}


def test_published_engine_values_classify_as_published():
    for engine, metrics in PUBLISHED_SCORECARDS.items():
        for metric_id, (pct, expected) in metrics.items():
            assert classify(metric_id, pct, TABLE) == expected, (engine, metric_id)


# -- table loading -----------------------------------------------------------

def test_custom_table_file(tmp_path):
    data = {"one_sided": {"acceptable": [0, 50], "borderline": [50, 75], "problematic": [75, 100]}}
    path = tmp_path / "table.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    table = ThresholdTable.load(path)
    assert classify("one_sided", 60.0, table) == "borderline"


def test_table_partition_violations():
    with pytest.raises(ValueError):  # gap between 40 and 50
        ThresholdTable.from_dict(
            {"m": {"acceptable": [0, 40], "borderline": [50, 70], "problematic": [70, 100]}}
        )
    with pytest.raises(ValueError):  # does not reach 100
        ThresholdTable.from_dict(
            {"m": {"acceptable": [0, 40], "borderline": [40, 70], "problematic": [70, 90]}}
        )
    with pytest.raises(ValueError):  # wrong band names
        ThresholdTable.from_dict(
            {"m": {"good": [0, 40], "meh": [40, 70], "bad": [70, 100]}}
        )


# -- aggregation ---------------------------------------------------------------

def _report(**kwargs):
    return compute_report(make_answer(**kwargs))


def test_single_report_aggregate():
    card = aggregate([compute_report(worked_example_answer())], TABLE)
    relevant = card.metrics["relevant_ratio"]
    assert relevant.percentage == pytest.approx(100 * 6 / 7)
    assert relevant.classification == "borderline"
    assert relevant.sample_count == 1
    assert card.num_answers == 1
    assert card.mean_sources == 5.0
    assert card.mean_statements == 7.0
    assert card.citations_per_statement == 1.0
    assert card.confidence_histogram == {"debate": {4: 1}}


def test_mean_of_ratios_not_pooled():
    a = _report(relevant=[True, False], cited=[{1}, set()], support=[{1}, set()],
                k=1, query_id="a")
    b = _report(relevant=[True, False, False, False],
                cited=[{1}, set(), set(), set()],
                support=[{1}, set(), set(), set()], k=1, query_id="b")
    card = aggregate([a, b], TABLE)
    # (1/2 + 1/4) / 2 = 37.5, not pooled 2/6 = 33.3
    assert card.metrics["relevant_ratio"].percentage == pytest.approx(37.5)
    assert card.metrics["relevant_ratio"].exact == Fraction(3, 8) * 100


def test_na_reports_excluded_from_both_sides():
    debate = _report(relevant=[True], stances=["pro"], cited=[{1}], support=[{1}],
                     k=1, query_id="d")
    expertise = _report(relevant=[True], cited=[{1}], support=[{1}], k=1,
                        kind="expertise", query_id="e")
    card = aggregate([debate, expertise], TABLE)
    assert card.metrics["one_sided"].sample_count == 1
    assert card.metrics["one_sided"].percentage == pytest.approx(100.0)
    assert card.metrics["relevant_ratio"].sample_count == 2


def test_all_na_metric_renders_na():
    expertise = _report(relevant=[True], cited=[{1}], support=[{1}], k=1,
                        kind="expertise")
    card = aggregate([expertise], TABLE)
    assert card.metrics["one_sided"].percentage is None
    assert card.metrics["one_sided"].classification is None
    markdown = render_markdown(card)
    assert "| % One-Sided Answer | n/a | n/a | 0 |" in markdown


def test_duplicating_reports_leaves_aggregates_unchanged():
    reports = [
        compute_report(worked_example_answer()),
        _report(relevant=[True, False], cited=[{1}, set()], support=[{1}, set()], k=1),
    ]
    once = aggregate(reports, TABLE)
    twice = aggregate(reports + reports, TABLE)
    for mid, agg in once.metrics.items():
        assert twice.metrics[mid].percentage == agg.percentage
        assert twice.metrics[mid].classification == agg.classification


def test_empty_aggregate_raises():
    with pytest.raises(UndefinedAggregateError):
        aggregate([], TABLE)


def test_binary_metric_aggregates_as_share_of_applicable():
    lopsided = _report(relevant=[True], stances=["pro"], cited=[{1}], support=[{1}],
                       k=1, query_id="a")
    balanced = _report(relevant=[True, True], stances=["pro", "con"],
                       cited=[{1}, {1}], support=[{1}, {1}], k=1, query_id="b")
    card = aggregate([lopsided, balanced, balanced, balanced], TABLE)
    assert card.metrics["one_sided"].percentage == pytest.approx(25.0)
    assert card.metrics["one_sided"].classification == "borderline"


# -- rendering -----------------------------------------------------------------

def test_scorecard_json_round_trip():
    card = aggregate([compute_report(worked_example_answer())], TABLE)
    parsed = Scorecard.from_dict(json.loads(render_json(card)))
    assert render_json(parsed) == render_json(card)


def test_markdown_golden():
    card = aggregate([compute_report(worked_example_answer())], TABLE)
    rendered = render_markdown(card)
    golden = (GOLDENS / "worked_example_scorecard.md").read_text(encoding="utf-8")
    assert rendered == golden


def test_markdown_glyphs_follow_classification():
    card = aggregate([compute_report(worked_example_answer())], TABLE)
    markdown = render_markdown(card)
    assert "| % Uncited Sources | 0.0 | ▲ acceptable | 1 |" in markdown
    assert "| % Citation Thoroughness | 40.0 | ● borderline | 1 |" in markdown
    assert "| % Unsupported Statements | 16.7 | ● borderline | 1 |" in markdown


def test_comparison_table():
    card_a = aggregate([compute_report(worked_example_answer())], TABLE, engine_id="acme")
    card_b = aggregate(
        [_report(relevant=[True], cited=[{1}], support=[{1}], k=1, kind="expertise")],
        TABLE,
        engine_id="zenith",
    )
    comparison = render_comparison([card_a, card_b])
    assert "| Metric | acme | zenith |" in comparison
    assert "n/a" in comparison  # zenith has no debate answers
