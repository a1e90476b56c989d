"""Disk cache for judge verdicts.

Keyed by a content hash of (task, filled prompt). Values are deterministic
per key, so concurrent last-writer-wins is safe. Large evaluation runs rely
on this cache to be resumable without re-spending judge calls.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Optional


def verdict_key(task: str, prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(task.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.encode("utf-8"))
    return digest.hexdigest()


class VerdictCache:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, task: str, prompt: str) -> Optional[str]:
        path = self._path(verdict_key(task, prompt))
        try:
            with open(path, encoding="utf-8") as fh:
                record = json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        return record["response"]

    def put(self, task: str, prompt: str, response: str) -> None:
        key = verdict_key(task, prompt)
        record = {"task": task, "key": key, "response": response}
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        with self._lock:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(record, fh, ensure_ascii=False)
            os.replace(tmp, path)

    def __len__(self) -> int:
        return sum(1 for _ in self.directory.glob("*.json"))
