"""Run orchestration: corpus loading, batch evaluation, report emission.

Storage layout under the output directory:

    {out}/{engine}/{query_id}/analysis.json
    {out}/{engine}/{query_id}/metrics.json
    {out}/manifest.json
    {out}/scorecards/{engine}.json / .md, comparison.md

Runs are resumable: an answer whose metrics.json already exists is skipped,
and judge verdicts / source texts come from their caches, so a warm rerun
makes zero judge or network calls.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import metrics as metrics_mod
from .fetcher import FetchConfig, HttpReader, Reader, SourceCache, StubReader
from .judge import JudgePipeline, RemoteJudge, ScriptedJudge, VerdictCache
from .model import QueryRecord, serialize
from .pipeline import AnswerCapture, analyze_capture, load_capture
from .scorecard import (
    Scorecard,
    ThresholdTable,
    aggregate,
    render_comparison,
    render_json,
    render_markdown,
)

log = logging.getLogger("aee")

EXIT_OK = 0
EXIT_PARTIAL_FAILURES = 2
EXIT_CONFIG_ERROR = 3


class ConfigError(ValueError):
    pass


class CorpusError(ValueError):
    pass


@dataclass
class RunConfig:
    corpus_path: str
    captures_dir: str
    output_dir: str
    judge_cache_dir: str
    source_cache_dir: str
    judge_endpoint: Optional[str] = None
    judge_model: str = "scripted"
    judge_auth_env_var: Optional[str] = None
    reader_prefix: str = FetchConfig().reader_prefix
    stub_reader_dir: Optional[str] = None
    use_scripted_judge: bool = False
    workers: int = 1
    partial_credit_policy: str = "strict"
    threshold_table_path: Optional[str] = None
    max_failure_fraction: float = 0.2
    fetch_min_chars: int = FetchConfig().min_chars
    fetch_truncate_chars: int = FetchConfig().truncate_chars

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        config.check()
        return config

    def check(self) -> None:
        if not Path(self.corpus_path).is_file():
            raise ConfigError(f"corpus file not found: {self.corpus_path}")
        if not Path(self.captures_dir).is_dir():
            raise ConfigError(f"captures directory not found: {self.captures_dir}")
        if self.partial_credit_policy not in ("strict", "lenient"):
            raise ConfigError(f"unknown partial_credit_policy {self.partial_credit_policy!r}")
        if not self.use_scripted_judge and not self.judge_endpoint:
            raise ConfigError("judge_endpoint is required unless use_scripted_judge is set")
        if self.stub_reader_dir and not Path(self.stub_reader_dir).is_dir():
            raise ConfigError(f"stub reader directory not found: {self.stub_reader_dir}")

    def content_hash(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


def load_corpus(path: str | Path) -> list[QueryRecord]:
    """Line-delimited JSON of query records; duplicate ids are rejected."""
    records: list[QueryRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = QueryRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusError(f"{path}:{lineno}: cannot parse query record: {exc}") from exc
            if record.id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate query id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    if not records:
        log.warning("corpus %s is empty", path)
    counts: dict[str, int] = {}
    for r in records:
        counts[r.kind] = counts.get(r.kind, 0) + 1
    log.info("loaded %d queries from %s (%s)", len(records), path,
             ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return records


def discover_captures(captures_dir: str | Path) -> list[Path]:
    return sorted(Path(captures_dir).rglob("*.json"))


def _build_judge(config: RunConfig) -> JudgePipeline:
    cache = VerdictCache(config.judge_cache_dir)
    if config.use_scripted_judge:
        return JudgePipeline(ScriptedJudge(), cache)
    backend = RemoteJudge(
        endpoint=config.judge_endpoint or "",
        model_name=config.judge_model,
        auth_env_var=config.judge_auth_env_var,
    )
    return JudgePipeline(backend, cache)


def _build_reader(config: RunConfig) -> Reader:
    if config.stub_reader_dir:
        return StubReader(config.stub_reader_dir)
    return HttpReader(FetchConfig(reader_prefix=config.reader_prefix,
                                  min_chars=config.fetch_min_chars,
                                  truncate_chars=config.fetch_truncate_chars))


@dataclass
class RunSummary:
    evaluated: int = 0
    skipped: int = 0
    failed: int = 0
    failures: list[dict] = field(default_factory=list)
    judge_backend_calls: int = 0
    judge_cache_hits: int = 0

    @property
    def total(self) -> int:
        return self.evaluated + self.skipped + self.failed

    def exit_code(self, max_failure_fraction: float) -> int:
        if self.total and self.failed / self.total > max_failure_fraction:
            return EXIT_PARTIAL_FAILURES
        return EXIT_OK


def evaluate(config: RunConfig, judge: Optional[JudgePipeline] = None,
             reader: Optional[Reader] = None) -> RunSummary:
    """Analyze every capture and write per-answer analysis + metric files."""
    corpus = {q.id: q for q in load_corpus(config.corpus_path)}
    judge = judge or _build_judge(config)
    reader = reader or _build_reader(config)
    source_cache = SourceCache(config.source_cache_dir)
    fetch_config = FetchConfig(
        reader_prefix=config.reader_prefix,
        min_chars=config.fetch_min_chars,
        truncate_chars=config.fetch_truncate_chars,
    )
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = RunSummary()
    capture_paths = discover_captures(config.captures_dir)
    started = time.time()

    def process(path: Path) -> None:
        try:
            capture = load_capture(path.read_text(encoding="utf-8"))
        except (ValueError, KeyError) as exc:
            summary.failed += 1
            summary.failures.append({"capture": str(path), "error": f"unreadable capture: {exc}"})
            log.error("skipping %s: %s", path, exc)
            return
        if capture.query.id in corpus:
            # the corpus copy is authoritative for query text/kind
            capture = AnswerCapture(
                engine_id=capture.engine_id,
                query=corpus[capture.query.id],
                raw_text=capture.raw_text,
                sources=capture.sources,
            )
        answer_dir = out / capture.engine_id / capture.query.id
        metrics_path = answer_dir / "metrics.json"
        if metrics_path.exists():
            summary.skipped += 1
            return
        try:
            answer = analyze_capture(
                capture, judge, reader, source_cache, fetch_config,
                policy=config.partial_credit_policy,
            )
            report = metrics_mod.compute_report(answer)
        except Exception as exc:  # noqa: BLE001 - per-answer isolation
            summary.failed += 1
            summary.failures.append({"capture": str(path), "error": str(exc)})
            log.error("analysis failed for %s: %s", path, exc)
            return
        answer_dir.mkdir(parents=True, exist_ok=True)
        (answer_dir / "analysis.json").write_text(serialize(answer), encoding="utf-8")
        metrics_path.write_text(metrics_mod.serialize_report(report), encoding="utf-8")
        summary.evaluated += 1

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(process, capture_paths))
    else:
        for path in capture_paths:
            process(path)

    summary.judge_backend_calls = judge.stats.backend_calls
    summary.judge_cache_hits = judge.stats.cache_hits
    manifest = {
        "config_hash": config.content_hash(),
        "judge_model": judge.backend.model_name,
        "started_at": started,
        "finished_at": time.time(),
        "captures": len(capture_paths),
        "evaluated": summary.evaluated,
        "skipped": summary.skipped,
        "failed": summary.failed,
        "failures": summary.failures,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return summary


def load_reports(output_dir: str | Path, engine_id: str) -> list[metrics_mod.MetricReport]:
    engine_dir = Path(output_dir) / engine_id
    if not engine_dir.is_dir():
        raise FileNotFoundError(f"no report directory for engine {engine_id!r}: {engine_dir}")
    reports = []
    for path in sorted(engine_dir.glob("*/metrics.json")):
        reports.append(metrics_mod.deserialize_report(path.read_text(encoding="utf-8")))
    return reports


def report(config: RunConfig) -> list[Scorecard]:
    """Aggregate per-answer reports into one scorecard per engine."""
    out = Path(config.output_dir)
    table = ThresholdTable.load(config.threshold_table_path)
    engines = sorted(
        p.name for p in out.iterdir() if p.is_dir() and p.name != "scorecards"
    )
    if not engines:
        raise FileNotFoundError(f"no engine directories under {out}")
    scorecards = []
    card_dir = out / "scorecards"
    card_dir.mkdir(parents=True, exist_ok=True)
    for engine in engines:
        reports = load_reports(out, engine)
        card = aggregate(reports, table, engine_id=engine)
        (card_dir / f"{engine}.json").write_text(render_json(card), encoding="utf-8")
        (card_dir / f"{engine}.md").write_text(render_markdown(card), encoding="utf-8")
        scorecards.append(card)
    (card_dir / "comparison.md").write_text(render_comparison(scorecards), encoding="utf-8")
    return scorecards
