"""Shared builders for the test suite.

make_answer constructs a validated AnalyzedAnswer directly from matrix
descriptions, bypassing the judge/fetch pipeline, so metric tests stand on
their own. build_pack writes a deterministic multi-engine fixture pack
(corpus, captures, stub sources) used by the harness and acceptance tests.
"""

from __future__ import annotations

import json
from pathlib import Path

from aee.model import (
    AnalyzedAnswer,
    CitationMatrix,
    ConfidenceScore,
    QueryRecord,
    SourceRef,
    Statement,
    SupportMatrix,
    validate,
)

FIXTURES = Path(__file__).parent / "fixtures"
WORKED_EXAMPLE = FIXTURES / "worked_example"


def make_answer(
    *,
    relevant: list[bool],
    cited: list[set[int]],
    support: list[set[int]],
    k: int,
    kind: str = "debate",
    framing: str = "pro",
    stances: list[str] | None = None,
    confidence: int = 4,
    ok_columns: set[int] | None = None,
    dangling: list[tuple[int, int]] | None = None,
    collapsed_duplicates: int = 0,
    engine_id: str = "test-engine",
    query_id: str = "q-test",
    policy: str = "strict",
) -> AnalyzedAnswer:
    n = len(relevant)
    assert len(cited) == len(support) == n
    ok = set(range(1, k + 1)) if ok_columns is None else set(ok_columns)
    dangling = dangling or []
    dangling_cites = {(s, c) for s, c in dangling}

    sources = tuple(
        SourceRef(
            index=j,
            url=f"https://example.test/{query_id}/{j}",
            fetch_status="ok" if j in ok else "error_unreachable",
            full_text=(f"Reference text for source {j}. " * 20) if j in ok else None,
        )
        for j in range(1, k + 1)
    )

    statements = []
    for i in range(n):
        if kind == "debate":
            stance = stances[i] if stances is not None else "neutral"
        else:
            stance = "not_applicable"
        statements.append(
            Statement(
                index=i + 1,
                text=f"Statement {i + 1} of {query_id}.",
                relevant=relevant[i],
                stance=stance,
                cited_sources=frozenset(cited[i]),
            )
        )

    in_range = [
        frozenset(c for c in st.cited_sources if 1 <= c <= k) for st in statements
    ]
    citation_matrix = CitationMatrix.from_statements(in_range, k)
    raw = [
        [
            "unknown" if j not in ok else ("full" if j in support[i] else "none")
            for j in range(1, k + 1)
        ]
        for i in range(n)
    ]
    if n:
        support_matrix = SupportMatrix.from_raw(raw, policy=policy)
    else:
        support_matrix = SupportMatrix(rows=0, cols=k, cells=(), raw_judgment=())

    answer = AnalyzedAnswer(
        engine_id=engine_id,
        query=QueryRecord(
            id=query_id,
            text=f"Question for {query_id}?",
            kind=kind,
            debate_framing=framing if kind == "debate" else None,
        ),
        raw_text=" ".join(st.text for st in statements),
        statements=tuple(statements),
        sources=sources,
        confidence=ConfidenceScore.from_value(confidence),
        citation_matrix=citation_matrix,
        support_matrix=support_matrix,
        dangling_citations=tuple(sorted(dangling_cites)),
        collapsed_duplicates=collapsed_duplicates,
    )
    violations = validate(answer)
    assert not violations, violations
    return answer


def worked_example_answer() -> AnalyzedAnswer:
    """The canonical 7-statement / 5-source example, built matrix-first."""
    return make_answer(
        relevant=[True, True, True, True, True, True, False],
        stances=["pro", "pro", "pro", "con", "con", "neutral", "neutral"],
        cited=[{1}, {2}, {1, 3}, {2}, {5}, {4}, set()],
        support=[{1, 4}, {2, 5}, set(), {2, 5}, {1, 3, 5}, {3}, set()],
        k=5,
        confidence=4,
    )


# -- deterministic multi-engine fixture pack --------------------------------

PACK_QUERIES = [
    ("q1", "debate", "Is city biking safer than driving?", "pro"),
    ("q2", "debate", "Should homework be abolished?", "pro"),
    ("q3", "debate", "Is remote work better for teams?", "pro"),
    ("q4", "expertise", "How do vaccines train the immune system?", None),
    ("q5", "expertise", "What causes ocean tides?", None),
]

# per (engine, query): number of sources and the raw marker per statement
PACK_CAPTURES: dict[tuple[str, str], dict] = {
    ("alpha", "q1"): {"k": 3, "marks": ["[1]", "[2]", "[1][1]", "[3]"]},
    ("beta", "q1"): {"k": 3, "marks": ["[1]", "[2]", "[3]", ""]},
    ("alpha", "q2"): {"k": 4, "marks": ["[1]", "[7]", "[2]", "[3]", "[4]"]},
    ("beta", "q2"): {"k": 4, "marks": ["[1, 2]", "[3]", "[4]", ""]},
    ("alpha", "q3"): {"k": 3, "marks": ["[1-2]", "[3]", "[1]"]},
    ("beta", "q3"): {"k": 3, "marks": ["[1]", "[2]", ""], "filler": True},
    ("alpha", "q4"): {"k": 3, "marks": ["[1]", "[2]", "[3]", "[1]"]},
    ("beta", "q4"): {"k": 3, "marks": ["[3]", "[1]", "", "[2]"]},
    ("alpha", "q5"): {"k": 3, "marks": ["[1]", "[2]", "[3]"]},
    ("beta", "q5"): {"k": 2, "marks": ["[1]", "[2]", ""]},
}


def _pack_body(engine: str, qid: str, i: int) -> str:
    return f"Finding {i} from {engine} on topic {qid} shows a steady effect"


def _pack_sentence(engine: str, qid: str, i: int, mark: str) -> str:
    body = _pack_body(engine, qid, i)
    return f"{body} {mark}." if mark else f"{body}."


def _pack_urls(engine: str, qid: str, k: int) -> list[str]:
    # beta's q5 sources are engine-specific so they can stay unmapped
    stem = "q5b" if (engine, qid) == ("beta", "q5") else qid
    return [f"https://fix.example/{stem}/{j}" for j in range(1, k + 1)]


def build_pack(root: Path) -> dict:
    """Write the 10-answer fixture pack; returns config-ready path strings."""
    captures_dir = root / "captures"
    stub_dir = root / "stub_sources"
    captures_dir.mkdir(parents=True, exist_ok=True)
    stub_dir.mkdir(parents=True, exist_ok=True)

    corpus_path = root / "corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for qid, kind, text, framing in PACK_QUERIES:
            record = {"id": qid, "text": text, "kind": kind}
            if framing:
                record["debate_framing"] = framing
            fh.write(json.dumps(record) + "\n")

    queries = {qid: (kind, text, framing) for qid, kind, text, framing in PACK_QUERIES}
    # statement texts per (qid, source position), gathered across engines
    doc_sentences: dict[tuple[str, int], list[str]] = {}

    for (engine, qid), spec in sorted(PACK_CAPTURES.items()):
        kind, text, framing = queries[qid]
        k = spec["k"]
        sentences = [
            _pack_sentence(engine, qid, i, mark)
            for i, mark in enumerate(spec["marks"], start=1)
        ]
        if spec.get("filler"):
            sentences.append("Hope this helps!")
        urls = _pack_urls(engine, qid, k)
        capture = {
            "engine_id": engine,
            "query": {"id": qid, "text": text, "kind": kind,
                      **({"debate_framing": framing} if framing else {})},
            "raw_text": " ".join(sentences),
            "sources": [{"index": j, "url": url} for j, url in enumerate(urls, start=1)],
        }
        (captures_dir / f"{engine}-{qid}.json").write_text(
            json.dumps(capture, indent=2) + "\n", encoding="utf-8"
        )
        if (engine, qid) == ("beta", "q5"):
            continue  # stays unmapped: every source unreachable
        for j in range(1, k + 1):
            bucket = doc_sentences.setdefault((qid, j), [])
            for i in range(1, len(spec["marks"]) + 1):
                if (i + j) % 2 == 0 or i == j:
                    bucket.append(f"{_pack_body(engine, qid, i)}.")

    mapping: dict[str, str] = {}
    for (qid, j), sentences in sorted(doc_sentences.items()):
        url = f"https://fix.example/{qid}/{j}"
        filename = f"{qid}-src{j}.txt"
        if (qid, j) == ("q3", 3):
            continue  # unmapped on purpose: 404 -> error_unreachable
        if (qid, j) == ("q4", 2):
            (stub_dir / filename).write_text("Too short.", encoding="utf-8")
        elif (qid, j) == ("q5", 3):
            (stub_dir / filename).write_text(
                "Subscribe to read the rest of this article. " * 10, encoding="utf-8"
            )
        else:
            padding = f"Background material for {qid} source {j}. " * 8
            (stub_dir / filename).write_text(
                padding + "\n" + "\n".join(sentences) + "\n", encoding="utf-8"
            )
        mapping[url] = filename
    (stub_dir / "urls.json").write_text(
        json.dumps(mapping, indent=2) + "\n", encoding="utf-8"
    )

    return {
        "corpus_path": str(corpus_path),
        "captures_dir": str(captures_dir),
        "stub_reader_dir": str(stub_dir),
    }
