"""Consistency judge clients.

The judge scores how faithfully a formal statement renders its natural
language original; internals are opaque behind the score. The recommended
pass threshold is 0.6, inclusive at the boundary.
"""

from __future__ import annotations

import os
from typing import Callable

import requests

from ..errors import JudgeUnavailable
from .base import JudgeClient, JudgeVerdict

DEFAULT_THRESHOLD = 0.6


class HttpJudge(JudgeClient):
    def __init__(
        self,
        endpoint: str,
        threshold: float = DEFAULT_THRESHOLD,
        api_key_env: str = "DSR_JUDGE_API_KEY",
        timeout: float = 120.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.threshold = threshold
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.session = session or requests.Session()

    def judge(self, nl_statement: str, fl_statement: str) -> JudgeVerdict:
        headers = {}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = self.session.post(
                self.endpoint,
                json={"nl_statement": nl_statement, "fl_statement": fl_statement},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise JudgeUnavailable(str(exc)) from exc
        if response.status_code != 200:
            raise JudgeUnavailable(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            score = float(response.json()["score"])
        except (ValueError, KeyError, TypeError) as exc:
            raise JudgeUnavailable(f"bad judge payload: {exc}") from exc
        return JudgeVerdict.from_score(score, self.threshold)


class ScriptedJudge(JudgeClient):
    """Offline double: fixed score or a scoring function of (nl, fl)."""

    def __init__(
        self,
        score: float | Callable[[str, str], float] = 1.0,
        threshold: float = DEFAULT_THRESHOLD,
    ):
        self.score = score
        self.threshold = threshold
        self.calls: list[tuple[str, str]] = []

    def judge(self, nl_statement: str, fl_statement: str) -> JudgeVerdict:
        self.calls.append((nl_statement, fl_statement))
        score = self.score(nl_statement, fl_statement) if callable(self.score) else self.score
        return JudgeVerdict.from_score(score, self.threshold)
