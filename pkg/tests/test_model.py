import dataclasses

import pytest

from aee.model import (
    CONFIDENCE_LABELS,
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
from helpers import make_answer, worked_example_answer


def test_confidence_label_bijection():
    for value, label in CONFIDENCE_LABELS.items():
        assert ConfidenceScore.from_value(value).label == label
        assert ConfidenceScore.from_label(label).value == value


def test_confidence_unknown_label_raises():
    with pytest.raises(ValueError):
        ConfidenceScore.from_label("Sort of Confident")


def test_confidence_unknown_value_raises():
    with pytest.raises(KeyError):
        ConfidenceScore.from_value(6)


def test_citation_matrix_from_statements():
    cm = CitationMatrix.from_statements([frozenset({1, 3}), frozenset()], cols=3)
    assert cm.cells == ((1, 0, 1), (0, 0, 0))
    assert cm.cell(1, 3) == 1
    assert cm.total() == 2
    assert cm.column_cited(1) and not cm.column_cited(2)


def test_support_matrix_partial_folding():
    raw = [["full", "partial", "none", "unknown"]]
    strict = SupportMatrix.from_raw(raw, policy="strict")
    lenient = SupportMatrix.from_raw(raw, policy="lenient")
    assert strict.cells[0] == ("supported", "unsupported", "unsupported", "unknown")
    assert lenient.cells[0] == ("supported", "supported", "unsupported", "unknown")
    assert strict.raw_judgment == lenient.raw_judgment == (tuple(raw[0]),)


def test_support_matrix_unknown_policy_raises():
    with pytest.raises(ValueError):
        SupportMatrix.from_raw([["full"]], policy="generous")


def test_support_matrix_column_known():
    sm = SupportMatrix.from_raw([["unknown", "full"], ["unknown", "none"]])
    assert not sm.column_known(1)
    assert sm.column_known(2)
    assert sm.supported_total() == 1


def test_serialize_round_trip_is_byte_identical():
    answer = worked_example_answer()
    first = serialize(answer)
    second = serialize(deserialize(first))
    assert first == second
    assert deserialize(first) == answer


def test_validate_clean_answer():
    assert validate(worked_example_answer()) == []


def _worked():
    return worked_example_answer()


def test_validate_query_kind():
    answer = _worked()
    bad = dataclasses.replace(answer, query=QueryRecord("q", "text", "opinion"))
    assert any("kind" in v for v in validate(bad))


def test_validate_expertise_with_framing():
    answer = _worked()
    bad = dataclasses.replace(
        answer,
        query=QueryRecord("q", "text", "expertise", debate_framing="pro"),
        statements=tuple(
            dataclasses.replace(st, stance="not_applicable") for st in answer.statements
        ),
    )
    assert any("debate_framing" in v for v in validate(bad))


def test_validate_source_index_gap():
    answer = _worked()
    sources = list(answer.sources)
    sources[2] = dataclasses.replace(sources[2], index=9)
    bad = dataclasses.replace(answer, sources=tuple(sources))
    assert any("contiguous" in v for v in validate(bad))


def test_validate_fetch_status_text_mismatch():
    answer = _worked()
    sources = list(answer.sources)
    sources[0] = dataclasses.replace(sources[0], full_text=None)
    bad = dataclasses.replace(answer, sources=tuple(sources))
    assert any("full_text" in v for v in validate(bad))


def test_validate_statement_order():
    answer = _worked()
    statements = list(answer.statements)
    statements[0] = dataclasses.replace(statements[0], index=3)
    bad = dataclasses.replace(answer, statements=tuple(statements))
    assert any("position" in v for v in validate(bad))


def test_validate_stance_on_expertise_query():
    answer = make_answer(
        relevant=[True], cited=[set()], support=[set()], k=1, kind="expertise"
    )
    statements = (dataclasses.replace(answer.statements[0], stance="pro"),)
    bad = dataclasses.replace(answer, statements=statements)
    assert any("non-debate" in v for v in validate(bad))


def test_validate_out_of_range_citation_needs_dangling_record():
    answer = _worked()
    statements = list(answer.statements)
    statements[0] = dataclasses.replace(statements[0], cited_sources=frozenset({1, 9}))
    bad = dataclasses.replace(answer, statements=tuple(statements))
    assert any("out of range" in v for v in validate(bad))
    ok = dataclasses.replace(bad, dangling_citations=((1, 9),))
    assert not any("out of range" in v for v in validate(ok))


def test_validate_confidence_mismatch():
    answer = _worked()
    bad = dataclasses.replace(answer, confidence=ConfidenceScore(5, "Confident"))
    assert any("confidence" in v for v in validate(bad))


def test_validate_matrix_dimensions():
    answer = _worked()
    bad = dataclasses.replace(
        answer, citation_matrix=CitationMatrix(rows=1, cols=1, cells=((0,),))
    )
    assert any("citation matrix is" in v for v in validate(bad))


def test_validate_matrix_cell_disagreement():
    answer = _worked()
    cells = [list(r) for r in answer.citation_matrix.cells]
    cells[0][1] = 1  # statement 1 does not cite source 2
    bad = dataclasses.replace(
        answer,
        citation_matrix=CitationMatrix(rows=7, cols=5, cells=tuple(tuple(r) for r in cells)),
    )
    assert any("disagrees" in v for v in validate(bad))


def test_validate_unknown_column_against_fetch_status():
    answer = make_answer(
        relevant=[True], cited=[{1}], support=[{1}], k=2, ok_columns={1, 2}
    )
    sources = list(answer.sources)
    sources[1] = SourceRef(index=2, url=sources[1].url, fetch_status="error_unreachable")
    bad = dataclasses.replace(answer, sources=tuple(sources))
    assert any("column 2" in v for v in validate(bad))


def test_validate_raw_judgment_consistency():
    answer = make_answer(relevant=[True], cited=[{1}], support=[{1}], k=1)
    sm = answer.support_matrix
    bad_sm = SupportMatrix(
        rows=sm.rows, cols=sm.cols, cells=(("unsupported",),), raw_judgment=(("full",),)
    )
    bad = dataclasses.replace(answer, support_matrix=bad_sm)
    assert any("raw=full" in v for v in validate(bad))
    bad_sm = SupportMatrix(
        rows=sm.rows, cols=sm.cols, cells=(("supported",),), raw_judgment=(("none",),)
    )
    bad = dataclasses.replace(answer, support_matrix=bad_sm)
    assert any("raw=none" in v for v in validate(bad))


def test_statement_round_trip_keeps_spans():
    st = Statement(
        index=1,
        text="Cats purr.",
        relevant=True,
        stance="neutral",
        cited_sources=frozenset({2}),
        citation_spans=((10, 13, "[2]"),),
    )
    assert Statement.from_dict(st.to_dict()) == st
