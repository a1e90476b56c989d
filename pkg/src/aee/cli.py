"""Command-line entry points.

    aee validate-corpus --config run.json
    aee fetch-sources   --config run.json
    aee evaluate        --config run.json [--scripted-judge] [--stub-reader DIR]
    aee report          --config run.json

Exit codes: 0 ok, 2 failures above the configured fraction, 3 config error.
"""

from __future__ import annotations

import dataclasses
import logging
import sys
from pathlib import Path

import click

from . import harness
from .fetcher import FetchConfig, SourceCache, dedupe_report, fetch_all, fetch_summary
from .harness import ConfigError, CorpusError, RunConfig
from .pipeline import load_capture


def _load_config(path: str, scripted_judge: bool, stub_reader: str | None) -> RunConfig:
    config = RunConfig.from_file(path)
    if scripted_judge:
        config = dataclasses.replace(config, use_scripted_judge=True, judge_model="scripted")
    if stub_reader:
        config = dataclasses.replace(config, stub_reader_dir=stub_reader)
    config.check()
    return config


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command("validate-corpus")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def validate_corpus(config_path: str) -> None:
    """Parse the corpus file and report query-kind counts."""
    try:
        config = RunConfig.from_file(config_path)
        records = harness.load_corpus(config.corpus_path)
    except (ConfigError, CorpusError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(harness.EXIT_CONFIG_ERROR)
    kinds: dict[str, int] = {}
    for r in records:
        kinds[r.kind] = kinds.get(r.kind, 0) + 1
    click.echo(f"{len(records)} queries: " + ", ".join(f"{k}={v}" for k, v in sorted(kinds.items())))


@main.command("fetch-sources")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--stub-reader", type=click.Path(exists=True), default=None)
@click.option("--dedupe/--no-dedupe", default=True, help="Report near-duplicate source content.")
def fetch_sources(config_path: str, stub_reader: str | None, dedupe: bool) -> None:
    """Resolve every source URL referenced by the captures, warming the cache."""
    try:
        config = _load_config(config_path, scripted_judge=True, stub_reader=stub_reader)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(harness.EXIT_CONFIG_ERROR)
    reader = harness._build_reader(config)
    cache = SourceCache(config.source_cache_dir)
    fetch_config = FetchConfig(reader_prefix=config.reader_prefix,
                               min_chars=config.fetch_min_chars)
    for path in harness.discover_captures(config.captures_dir):
        capture = load_capture(Path(path).read_text(encoding="utf-8"))
        fetched = fetch_all(list(capture.sources), reader, cache, fetch_config)
        click.echo(f"{capture.engine_id}/{capture.query.id}: {fetch_summary(fetched)}")
        if dedupe:
            groups = dedupe_report(fetched)
            for group in groups:
                click.echo(f"  near-duplicate sources: {group}")


@main.command("evaluate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--scripted-judge", is_flag=True, help="Use the deterministic scripted judge.")
@click.option("--stub-reader", type=click.Path(exists=True), default=None,
              help="Serve source text from a local directory instead of the reader service.")
def evaluate(config_path: str, scripted_judge: bool, stub_reader: str | None) -> None:
    """Analyze all captures and write per-answer analysis and metric files."""
    try:
        config = _load_config(config_path, scripted_judge, stub_reader)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(harness.EXIT_CONFIG_ERROR)
    summary = harness.evaluate(config)
    click.echo(
        f"evaluated={summary.evaluated} skipped={summary.skipped} failed={summary.failed} "
        f"judge_calls={summary.judge_backend_calls} cache_hits={summary.judge_cache_hits}"
    )
    sys.exit(summary.exit_code(config.max_failure_fraction))


@main.command("report")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def report(config_path: str) -> None:
    """Aggregate metric files into per-engine scorecards."""
    try:
        config = RunConfig.from_file(config_path)
        scorecards = harness.report(config)
    except (ConfigError, FileNotFoundError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(harness.EXIT_CONFIG_ERROR)
    for card in scorecards:
        click.echo(f"wrote scorecard for {card.engine_id} ({card.num_answers} answers)")


if __name__ == "__main__":
    main()
