"""Judge abstraction: four judged operations behind one pipeline.

Backends produce raw completion text for a filled prompt; the pipeline owns
template filling, verdict caching, JSON extraction (tolerant of surrounding
prose and code fences), schema validation, and a single repair re-prompt
before giving up with a format error.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Protocol

from ..model import CONFIDENCE_LABELS, ConfidenceScore
from .cache import VerdictCache

TASK_DECOMPOSE = "decompose_relevance"
TASK_CONFIDENCE = "confidence"
TASK_STANCE = "stance_sort"
TASK_SUPPORT = "factual_support"

_TEMPLATE_FILES = {
    TASK_DECOMPOSE: "decompose.txt",
    TASK_CONFIDENCE: "confidence.txt",
    TASK_STANCE: "stance.txt",
    TASK_SUPPORT: "support.txt",
}

_REPAIR_SUFFIX = (
    "\n\nYour previous response could not be parsed. "
    "Respond again with only the JSON object in the requested format."
)


class JudgeTransportError(RuntimeError):
    """The judge backend could not be reached; retryable."""


class JudgeFormatError(RuntimeError):
    """The judge's verdict did not parse or validate, even after repair."""


class JudgeBackend(Protocol):
    model_name: str

    def complete(self, task: str, prompt: str) -> str: ...


def load_template(task: str) -> str:
    filename = _TEMPLATE_FILES[task]
    return resources.files("aee.judge.prompts").joinpath(filename).read_text(encoding="utf-8")


def fill_template(task: str, **placeholders: str) -> str:
    text = load_template(task)
    for key, value in placeholders.items():
        text = text.replace(f"[[{key}]]", value)
    if "[[" in text:
        raise ValueError(f"unresolved placeholder in {task} prompt: {text[text.index('[['):][:40]!r}")
    return text


def extract_json_object(text: str) -> dict:
    """Take the first balanced JSON object, ignoring prose and code fences."""
    depth = 0
    start = None
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0 and start is not None:
                    return json.loads(text[start : i + 1])
    raise ValueError("no balanced JSON object in judge response")


_WS_RE = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


@dataclass
class JudgeStats:
    backend_calls: int = 0
    cache_hits: int = 0
    repairs: int = 0


class JudgePipeline:
    """High-level judged operations over a backend, with a persistent cache.

    Cached verdicts are keyed by (task, filled prompt) and returned verbatim
    without touching the backend, so large re-runs are resumable.
    """

    def __init__(self, backend: JudgeBackend, cache: Optional[VerdictCache] = None):
        self.backend = backend
        self.cache = cache
        self.stats = JudgeStats()

    # -- plumbing ---------------------------------------------------------

    def _complete(self, task: str, prompt: str) -> str:
        if self.cache is not None:
            cached = self.cache.get(task, prompt)
            if cached is not None:
                self.stats.cache_hits += 1
                return cached
        self.stats.backend_calls += 1
        response = self.backend.complete(task, prompt)
        if self.cache is not None:
            self.cache.put(task, prompt, response)
        return response

    def _judged(self, task: str, prompt: str, validate) -> object:
        """Run a prompt; on a bad verdict, try one repair round, then raise."""
        response = self._complete(task, prompt)
        try:
            return validate(extract_json_object(response))
        except (ValueError, KeyError, TypeError) as first_error:
            self.stats.repairs += 1
            self.stats.backend_calls += 1
            response = self.backend.complete(task, prompt + _REPAIR_SUFFIX)
            try:
                verdict = validate(extract_json_object(response))
            except (ValueError, KeyError, TypeError) as second_error:
                raise JudgeFormatError(
                    f"{task} verdict unusable after repair: {second_error}"
                ) from first_error
            if self.cache is not None:
                self.cache.put(task, prompt, response)
            return verdict

    # -- the four operations ----------------------------------------------

    def decompose(self, query_text: str, answer_text: str) -> list[tuple[str, bool]]:
        """Split an answer into (sentence, core) pairs, verbatim and in order."""
        if not answer_text.strip():
            raise ValueError("answer text is empty")
        prompt = fill_template(TASK_DECOMPOSE, QUESTION=query_text, ANSWER=answer_text)

        def validate(payload: dict) -> list[tuple[str, bool]]:
            raw = payload["sentences"]
            if isinstance(raw, dict):
                raw = [raw]
            sentences = []
            for entry in raw:
                core = entry["core"]
                core_flag = str(core).strip() in ("1", "true", "True")
                sentences.append((entry["sentence"], core_flag))
            if not sentences:
                raise ValueError("decompose returned no sentences")
            joined = normalize_ws(" ".join(s for s, _ in sentences))
            if joined != normalize_ws(answer_text):
                raise ValueError("decomposed sentences do not reproduce the answer text")
            return sentences

        return self._judged(TASK_DECOMPOSE, prompt, validate)  # type: ignore[return-value]

    def score_confidence(self, query_text: str, answer_text: str) -> ConfidenceScore:
        prompt = fill_template(TASK_CONFIDENCE, QUERY=query_text, ANSWER=answer_text)

        def validate(payload: dict) -> ConfidenceScore:
            label = payload["confidence"]
            if label not in CONFIDENCE_LABELS.values():
                raise ValueError(f"unknown confidence label {label!r}")
            return ConfidenceScore.from_label(label)

        return self._judged(TASK_CONFIDENCE, prompt, validate)  # type: ignore[return-value]

    def sort_stance(
        self, query_text: str, statement_texts: list[str]
    ) -> tuple[list[int], list[int], list[int]]:
        """Sort statements into (agree, disagree, neutral) 1-based index lists.

        The three lists must partition 1..S; a non-partition verdict goes
        through the repair round and then fails.
        """
        numbered = "\n".join(f"{i}. {t}" for i, t in enumerate(statement_texts, start=1))
        prompt = fill_template(TASK_STANCE, QUERY=query_text, STATEMENTS=numbered)
        expected = set(range(1, len(statement_texts) + 1))

        def validate(payload: dict) -> tuple[list[int], list[int], list[int]]:
            agree = [int(i) for i in payload["agree_statements"]]
            disagree = [int(i) for i in payload["disagree_statements"]]
            neutral = [int(i) for i in payload["neutral_statements"]]
            combined = agree + disagree + neutral
            if len(combined) != len(set(combined)) or set(combined) != expected:
                raise ValueError(
                    f"stance lists do not partition 1..{len(statement_texts)}: {payload}"
                )
            return sorted(agree), sorted(disagree), sorted(neutral)

        return self._judged(TASK_STANCE, prompt, validate)  # type: ignore[return-value]

    def judge_support(self, document: str, statement: str) -> str:
        """Ternary verdict: is the statement full/partial/none supported."""
        prompt = fill_template(TASK_SUPPORT, DOCUMENT=document, STATEMENT=statement)

        def validate(payload: dict) -> str:
            verdict = payload["support"]
            if verdict not in ("full", "partial", "none"):
                raise ValueError(f"unknown support verdict {verdict!r}")
            return verdict

        return self._judged(TASK_SUPPORT, prompt, validate)  # type: ignore[return-value]
