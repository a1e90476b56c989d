"""Resolve source URLs to extracted full text via a reader-style service.

The reader indirection is a URL-prefix convention: GET {prefix}{url} returns
the page's main content as plain text. Results are cached on disk by URL
hash so repeated runs never refetch. Failures are classified into
unreachable / paywalled / empty; downstream, any non-ok source becomes an
all-unknown support-matrix column.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

import httpx

from .model import SourceRef

DEFAULT_READER_PREFIX = "https://r.jina.ai/"
DEFAULT_MIN_CHARS = 200
DEFAULT_TRUNCATE_CHARS = 48_000

PAYWALL_KEYWORDS = (
    "paywall",
    "subscribe to read",
    "subscribers only",
    "subscription required",
    "sign in to continue reading",
    "log in to read",
)


@dataclass(frozen=True)
class FetchConfig:
    reader_prefix: str = DEFAULT_READER_PREFIX
    min_chars: int = DEFAULT_MIN_CHARS
    truncate_chars: int = DEFAULT_TRUNCATE_CHARS
    timeout: float = 30.0
    retries: int = 2
    backoff: float = 0.5


class Reader(Protocol):
    def get(self, url: str) -> tuple[int, str]:
        """Return (status_code, body_text) for a URL; may raise httpx errors."""
        ...


class HttpReader:
    def __init__(self, config: FetchConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout, transport=transport,
                                    follow_redirects=True)

    def get(self, url: str) -> tuple[int, str]:
        response = self._client.get(self.config.reader_prefix + url)
        return response.status_code, response.text

    def close(self) -> None:
        self._client.close()


class StubReader:
    """Offline reader backed by a directory: urls.json maps URL -> text file.

    Unmapped URLs behave like a 404 so failure paths are testable offline.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        with open(self.directory / "urls.json", encoding="utf-8") as fh:
            self.mapping: dict[str, str] = json.load(fh)

    def get(self, url: str) -> tuple[int, str]:
        filename = self.mapping.get(url)
        if filename is None:
            return 404, "not found"
        return 200, (self.directory / filename).read_text(encoding="utf-8")


def _url_key(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()


class SourceCache:
    """{cache_dir}/{sha256(url)}.txt with a .status.json sidecar."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def get(self, url: str) -> Optional[tuple[str, str]]:
        key = _url_key(url)
        status_path = self.directory / f"{key}.status.json"
        try:
            with open(status_path, encoding="utf-8") as fh:
                record = json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        text = ""
        text_path = self.directory / f"{key}.txt"
        if record["fetch_status"] == "ok":
            text = text_path.read_text(encoding="utf-8")
        return record["fetch_status"], text

    def put(self, url: str, fetch_status: str, text: str) -> None:
        key = _url_key(url)
        with self._lock:
            if fetch_status == "ok":
                (self.directory / f"{key}.txt").write_text(text, encoding="utf-8")
            record = {"url": url, "fetch_status": fetch_status}
            with open(self.directory / f"{key}.status.json", "w", encoding="utf-8") as fh:
                json.dump(record, fh, ensure_ascii=False)


def classify_response(status_code: int, body: str, min_chars: int) -> tuple[str, str]:
    """Map a reader response to (fetch_status, text)."""
    lowered = body.lower()
    if status_code >= 400:
        if any(kw in lowered for kw in PAYWALL_KEYWORDS):
            return "error_paywalled", ""
        return "error_unreachable", ""
    if any(kw in lowered[:2000] for kw in PAYWALL_KEYWORDS):
        return "error_paywalled", ""
    if len(body.strip()) < min_chars:
        return "empty", ""
    return "ok", body


def fetch(
    source: SourceRef,
    reader: Reader,
    cache: Optional[SourceCache] = None,
    config: FetchConfig = FetchConfig(),
) -> SourceRef:
    """Resolve one source; idempotent, cache-first, failure-classifying."""
    if not source.url.startswith(("http://", "https://")):
        raise ValueError(f"source {source.index}: url must be absolute http(s): {source.url!r}")

    if cache is not None:
        hit = cache.get(source.url)
        if hit is not None:
            status, text = hit
            return _finish(source, status, text)

    status_code, body = 0, ""
    last_error: Exception | None = None
    for attempt in range(config.retries + 1):
        if attempt:
            time.sleep(config.backoff * 2 ** (attempt - 1))
        try:
            status_code, body = reader.get(source.url)
            last_error = None
            break
        except httpx.HTTPError as exc:
            last_error = exc
    if last_error is not None:
        status, text = "error_unreachable", ""
    else:
        status, text = classify_response(status_code, body, config.min_chars)

    if cache is not None:
        cache.put(source.url, status, text)
    return _finish(source, status, text)


def _finish(source: SourceRef, status: str, text: str) -> SourceRef:
    return SourceRef(
        index=source.index,
        url=source.url,
        title=source.title,
        fetch_status=status,
        full_text=text if status == "ok" else None,
    )


def fetch_all(
    sources: list[SourceRef],
    reader: Reader,
    cache: Optional[SourceCache] = None,
    config: FetchConfig = FetchConfig(),
) -> list[SourceRef]:
    return [fetch(src, reader, cache, config) for src in sources]


def fetch_summary(sources: list[SourceRef]) -> dict[str, int]:
    """Per-run status counts; live corpora see roughly 15% failures."""
    summary: dict[str, int] = {}
    for src in sources:
        summary[src.fetch_status] = summary.get(src.fetch_status, 0) + 1
    return summary


# -- duplicate-content diagnostics ----------------------------------------

DEDUPE_SHINGLE_WORDS = 5
DEDUPE_THRESHOLD = 0.8


def _shingles(text: str, n: int) -> frozenset[tuple[str, ...]]:
    words = text.lower().split()
    if len(words) < n:
        return frozenset([tuple(words)]) if words else frozenset()
    return frozenset(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def dedupe_report(
    sources: list[SourceRef],
    threshold: float = DEDUPE_THRESHOLD,
    shingle_words: int = DEDUPE_SHINGLE_WORDS,
) -> list[list[int]]:
    """Group fetched sources with near-identical content. Report-only.

    Similarity is the overlap coefficient on word shingles, which stays high
    when one copy merely adds boilerplate around the same article.
    """
    fetched = [s for s in sources if s.fetch_status == "ok" and s.full_text]
    shingle_sets = {s.index: _shingles(s.full_text or "", shingle_words) for s in fetched}

    parent = {s.index: s.index for s in fetched}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    indices = [s.index for s in fetched]
    for i, a in enumerate(indices):
        for b in indices[i + 1 :]:
            sa, sb = shingle_sets[a], shingle_sets[b]
            smaller = min(len(sa), len(sb))
            if smaller == 0:
                continue
            overlap = len(sa & sb) / smaller
            if overlap >= threshold:
                parent[find(a)] = find(b)

    groups: dict[int, list[int]] = {}
    for idx in indices:
        groups.setdefault(find(idx), []).append(idx)
    return sorted([sorted(g) for g in groups.values() if len(g) > 1])
