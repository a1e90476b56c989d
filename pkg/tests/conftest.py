import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import WORKED_EXAMPLE  # noqa: E402

from aee.fetcher import StubReader
from aee.judge import JudgePipeline, ScriptedJudge
from aee.pipeline import analyze_capture, load_capture


@pytest.fixture
def worked_capture():
    path = WORKED_EXAMPLE / "captures" / "acme-zoos-exist.json"
    return load_capture(path.read_text(encoding="utf-8"))


@pytest.fixture
def worked_answer(worked_capture):
    judge = JudgePipeline(ScriptedJudge())
    reader = StubReader(WORKED_EXAMPLE / "stub_sources")
    return analyze_capture(worked_capture, judge, reader)
