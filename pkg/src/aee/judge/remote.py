"""Remote judge over a chat-completion-style HTTP JSON protocol.

Temperature is pinned at 0 for determinism. Transport failures retry with
exponential backoff up to a configured limit; authentication comes from an
environment variable so tokens never land in config files. Concurrent use
is bounded by an in-flight semaphore.
"""

from __future__ import annotations

import os
import threading
import time
from typing import Optional

import httpx

from .base import JudgeTransportError

DEFAULT_TIMEOUT = 60.0
DEFAULT_RETRIES = 3
DEFAULT_BACKOFF = 1.0
DEFAULT_MAX_IN_FLIGHT = 4


class RemoteJudge:
    def __init__(
        self,
        endpoint: str,
        model_name: str,
        auth_env_var: Optional[str] = None,
        timeout: float = DEFAULT_TIMEOUT,
        retries: int = DEFAULT_RETRIES,
        backoff: float = DEFAULT_BACKOFF,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.endpoint = endpoint
        self.model_name = model_name
        self.retries = retries
        self.backoff = backoff
        self._in_flight = threading.Semaphore(max_in_flight)
        headers = {}
        if auth_env_var:
            token = os.environ.get(auth_env_var)
            if not token:
                raise ValueError(f"auth environment variable {auth_env_var} is not set")
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def complete(self, task: str, prompt: str) -> str:
        payload = {
            "model": self.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                with self._in_flight:
                    response = self._client.post(self.endpoint, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = JudgeTransportError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise JudgeTransportError(
                    f"judge endpoint returned {response.status_code}: {response.text[:200]}"
                )
            body = response.json()
            return body["choices"][0]["message"]["content"]
        raise JudgeTransportError(f"judge unreachable after {self.retries + 1} attempts: {last_error}")

    def close(self) -> None:
        self._client.close()
