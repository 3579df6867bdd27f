"""Live and scripted chat-completion clients.

The live client speaks the ubiquitous chat-completions HTTP shape (base URL +
model + bearer credential from an environment variable), retrying transient
transport failures with exponential backoff. Nothing vendor-specific leaks
above this module.
"""

from __future__ import annotations

import os
import time
from typing import Callable

import requests

from ..errors import TransportError
from .base import ChatRequest, LlmClient

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class LiveLlmClient(LlmClient):
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "DSR_LLM_API_KEY",
        retries: int = 3,
        backoff_seconds: float = 0.5,
        timeout: float = 120.0,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.retries = retries
        self.backoff_seconds = backoff_seconds
        self.timeout = timeout
        self.session = session or requests.Session()
        self.sleep = sleep

    def complete(self, request: ChatRequest) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.decoding.temperature,
            "max_tokens": request.decoding.max_tokens,
        }
        url = f"{self.base_url}/chat/completions"
        last_failure = "no attempt made"
        for attempt in range(self.retries + 1):
            try:
                response = self.session.post(url, json=payload, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_failure = str(exc)
            else:
                if response.status_code == 200:
                    return self._extract_text(response.json())
                last_failure = f"HTTP {response.status_code}: {response.text[:200]}"
                if response.status_code not in RETRYABLE_STATUS:
                    raise TransportError(last_failure)
            if attempt < self.retries:
                self.sleep(self.backoff_seconds * (2**attempt))
        raise TransportError(f"retries exhausted: {last_failure}")

    @staticmethod
    def _extract_text(payload: dict) -> str:
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"unexpected completion payload: {payload}") from exc


class ScriptedLlmClient(LlmClient):
    """Offline double driven by a handler function of the request."""

    def __init__(self, handler: Callable[[ChatRequest], str]):
        self.handler = handler
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        return self.handler(request)
