"""Deterministic rule-based judge for fixtures and offline tests.

The scripted judge receives the same filled prompts as a remote judge and
answers with the same JSON verdict formats, so the whole parsing/caching
path is exercised offline. Its rules are a test contract, not an attempt to
approximate an LLM:

decompose
    Sentences split on terminator + whitespace; a citation run opening the
    next chunk is re-attached to the previous sentence. A sentence is
    non-core iff it matches the filler lexicon (greetings/closings) or
    contains no letters.

confidence
    Counts hedging vs. boosting phrases over the whole answer.
    No core sentences -> Neutral (3). More hedges than boosts -> Not
    Confident (2), or Strongly Not Confident (1) at three or more hedges.
    More boosts than hedges -> Strongly Confident (5). Tie with cues on
    both sides -> Neutral (3). No cues -> Confident (4).

stance
    Per statement, filler -> neutral; else the disagree lexicon is checked
    before the agree lexicon; no cue -> neutral. "Agree" means agreeing
    with the side implied by the opinionated query.

support
    Citation markers are stripped, text is lowercased and de-punctuated.
    The statement splits into clauses on "; ", " but ", ", and " (only when
    both halves have at least three words). full if every clause occurs in
    the document, none if no clause does, partial otherwise.
"""

from __future__ import annotations

import json
import re

from ..citations import extract_markers, strip_markers
from . import base

FILLER_PHRASES = (
    "great question",
    "good question",
    "hope this helps",
    "hope that helps",
    "hope it helps",
    "let me know",
    "happy to help",
    "feel free to",
    "is there anything else",
    "here's what i found",
)

HEDGE_PHRASES = (
    "might",
    "may be",
    "possibly",
    "perhaps",
    "unclear",
    "uncertain",
    "not sure",
    "maybe",
    "could be",
    "disagree",
    "it depends",
    "hard to say",
)

BOOST_PHRASES = (
    "definitely",
    "certainly",
    "undoubtedly",
    "clearly",
    "without a doubt",
    "absolutely",
    "unquestionably",
    "there is no question",
)

DISAGREE_CUES = (
    " not ",
    " no ",
    " never ",
    "however",
    "critics",
    "criticiz",
    "criticis",
    "oppose",
    "against",
    " harm",
    " fail",
    " risk",
    "concern",
    "downside",
    "drawback",
)

AGREE_CUES = (
    "support",
    "benefit",
    " help",
    "because",
    "advantage",
    "improve",
    "promote",
    " agree",
    "indeed",
    "essential",
)

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")
_MARKER_PREFIX_RE = re.compile(r"^(?:\[[\d,\s-]+\])+")
_NON_WORD_RE = re.compile(r"[^a-z0-9 ]+")

CLAUSE_SEPARATORS = ("; ", " but ", ", and ")
MIN_CLAUSE_WORDS = 3


def split_sentences(text: str) -> list[str]:
    chunks = [c for c in _SENTENCE_SPLIT_RE.split(text.strip()) if c]
    merged: list[str] = []
    for chunk in chunks:
        prefix = _MARKER_PREFIX_RE.match(chunk)
        if prefix and merged:
            merged[-1] = f"{merged[-1]} {prefix.group(0)}"
            rest = chunk[prefix.end() :].strip()
            if rest:
                merged.append(rest)
        else:
            merged.append(chunk)
    return merged


def is_filler(sentence: str) -> bool:
    lowered = sentence.lower()
    if any(phrase in lowered for phrase in FILLER_PHRASES):
        return True
    return not re.search(r"[a-zA-Z]", sentence)


def _count_phrases(text: str, phrases: tuple[str, ...]) -> int:
    lowered = text.lower()
    return sum(lowered.count(p) for p in phrases)


def normalize_for_containment(text: str) -> str:
    cleaned = strip_markers(text).lower()
    cleaned = _NON_WORD_RE.sub(" ", cleaned)
    return re.sub(r"\s+", " ", cleaned).strip()


def split_clauses(statement: str) -> list[str]:
    """Clause split on the raw text, then normalize each clause.

    A separator only splits when every resulting piece keeps at least
    MIN_CLAUSE_WORDS words, so list constructions like "a, b, and c" stay
    whole instead of producing one-word clauses.
    """
    parts = [strip_markers(statement)]
    for sep in CLAUSE_SEPARATORS:
        next_parts: list[str] = []
        for part in parts:
            pieces = part.split(sep)
            if len(pieces) > 1 and all(
                len(normalize_for_containment(p).split()) >= MIN_CLAUSE_WORDS for p in pieces
            ):
                next_parts.extend(pieces)
            else:
                next_parts.append(part)
        parts = next_parts
    normalized = [normalize_for_containment(p) for p in parts]
    return [c for c in normalized if c]


class ScriptedJudge:
    """Prompt-in, JSON-verdict-out backend driven by the rules above."""

    model_name = "scripted"

    def complete(self, task: str, prompt: str) -> str:
        if task == base.TASK_DECOMPOSE:
            return self._decompose(prompt)
        if task == base.TASK_CONFIDENCE:
            return self._confidence(prompt)
        if task == base.TASK_STANCE:
            return self._stance(prompt)
        if task == base.TASK_SUPPORT:
            return self._support(prompt)
        raise ValueError(f"unknown judge task {task!r}")

    # -- prompt section extraction (anchors fixed by the templates) --------

    @staticmethod
    def _between(text: str, start: str, end: str | None) -> str:
        i = text.index(start) + len(start)
        j = text.index(end, i) if end is not None else len(text)
        return text[i:j]

    def _decompose(self, prompt: str) -> str:
        answer = self._between(prompt, "```\n", "\n```")
        sentences = split_sentences(answer)
        payload = {
            "sentences": [
                {"sentence": s, "core": "0" if is_filler(s) else "1"} for s in sentences
            ]
        }
        return json.dumps(payload, ensure_ascii=False)

    def _confidence(self, prompt: str) -> str:
        answer = self._between(prompt, "Answer:\n", None).strip()
        core = [s for s in split_sentences(answer) if not is_filler(s)]
        hedges = _count_phrases(answer, HEDGE_PHRASES)
        boosts = _count_phrases(answer, BOOST_PHRASES)
        if not core:
            label = "Neutral"
        elif hedges > boosts:
            label = "Strongly Not Confident" if hedges >= 3 else "Not Confident"
        elif boosts > hedges:
            label = "Strongly Confident"
        elif hedges > 0:
            label = "Neutral"
        else:
            label = "Confident"
        return json.dumps({"confidence": label})

    def _stance(self, prompt: str) -> str:
        block = self._between(prompt, "Statements:\n", "\n\nRemember")
        statements = []
        for line in block.splitlines():
            line = line.strip()
            if not line:
                continue
            number, _, text = line.partition(". ")
            statements.append((int(number), text))
        agree, disagree, neutral = [], [], []
        for number, text in statements:
            padded = f" {text.lower()} "
            if is_filler(text):
                neutral.append(number)
            elif any(cue in padded for cue in DISAGREE_CUES):
                disagree.append(number)
            elif any(cue in padded for cue in AGREE_CUES):
                agree.append(number)
            else:
                neutral.append(number)
        return json.dumps(
            {
                "agree_statements": agree,
                "disagree_statements": disagree,
                "neutral_statements": neutral,
            }
        )

    def _support(self, prompt: str) -> str:
        document = self._between(prompt, "Document:\n```\n", "\n```\n\nStatement:")
        statement = self._between(prompt, "\n\nStatement:\n", "\n\nRules:")
        doc_norm = f" {normalize_for_containment(document)} "
        clauses = split_clauses(statement)
        contained = [f" {c} " in doc_norm for c in clauses]
        if all(contained) and clauses:
            verdict = "full"
        elif any(contained):
            verdict = "partial"
        else:
            verdict = "none"
        return json.dumps({"support": verdict})
