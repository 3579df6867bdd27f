"""Record/replay cassettes for the LLM, verifier, and judge.

A cassette is a JSON-lines file. LLM entries are
``{"kind": "llm", "fingerprint": ..., "purpose_tag": ..., "response": ...}``;
verifier entries fingerprint the Lean source and carry the report; judge
entries fingerprint the (nl, fl) pair and carry the verdict. Fingerprints are
content hashes, so editing a prompt invalidates stale recordings loudly with
a CassetteMiss instead of replaying the wrong answer.

When the same fingerprint was recorded more than once, replay hands the
recordings back in recorded order and sticks at the last one.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from ..errors import CassetteMiss
from .base import (
    ChatRequest,
    JudgeClient,
    JudgeVerdict,
    LlmClient,
    VerifierClient,
    VerifierReport,
)


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def llm_fingerprint(prompt: str, purpose_tag: str) -> str:
    return _digest(purpose_tag, prompt)


def verify_fingerprint(source: str) -> str:
    return _digest(source)


def judge_fingerprint(nl_statement: str, fl_statement: str) -> str:
    return _digest(nl_statement, fl_statement)


class Cassette:
    """In-memory view of a cassette with per-fingerprint replay cursors."""

    def __init__(self, entries: list[dict] | None = None):
        self._recordings: dict[tuple[str, str], list[dict]] = {}
        self._cursors: dict[tuple[str, str], int] = {}
        self._lock = threading.Lock()
        self.entries: list[dict] = []
        for entry in entries or []:
            self.add(entry)

    def add(self, entry: dict) -> None:
        kind = entry.get("kind", "llm")
        key = (kind, entry["fingerprint"])
        self._recordings.setdefault(key, []).append(entry)
        self.entries.append(dict(entry, kind=kind))

    def replay(self, kind: str, fingerprint: str, detail: str = "") -> dict:
        key = (kind, fingerprint)
        with self._lock:
            recordings = self._recordings.get(key)
            if not recordings:
                raise CassetteMiss(kind, fingerprint, detail)
            cursor = self._cursors.get(key, 0)
            self._cursors[key] = cursor + 1
            return recordings[min(cursor, len(recordings) - 1)]

    def rewind(self) -> None:
        with self._lock:
            self._cursors.clear()

    @classmethod
    def load(cls, path: str | Path) -> "Cassette":
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return cls(entries)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for entry in self.entries:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


class ReplayLlmClient(LlmClient):
    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def complete(self, request: ChatRequest) -> str:
        fp = llm_fingerprint(request.prompt, request.purpose_tag.value)
        entry = self.cassette.replay("llm", fp, f"(purpose {request.purpose_tag.value})")
        return entry["response"]


class RecordingLlmClient(LlmClient):
    """Pass-through that appends each completion to the cassette file."""

    def __init__(self, inner: LlmClient, cassette: Cassette, path: str | Path | None = None):
        self.inner = inner
        self.cassette = cassette
        self.path = Path(path) if path else None
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        response = self.inner.complete(request)
        entry = {
            "kind": "llm",
            "fingerprint": llm_fingerprint(request.prompt, request.purpose_tag.value),
            "purpose_tag": request.purpose_tag.value,
            "response": response,
        }
        self._append(entry)
        return response

    def _append(self, entry: dict) -> None:
        with self._lock:
            self.cassette.add(entry)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


class ReplayVerifier(VerifierClient):
    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def verify(self, lean_source: str) -> VerifierReport:
        entry = self.cassette.replay("verify", verify_fingerprint(lean_source))
        return VerifierReport.from_payload(entry["report"])


class RecordingVerifier(VerifierClient):
    def __init__(self, inner: VerifierClient, cassette: Cassette, path: str | Path | None = None):
        self.inner = inner
        self.cassette = cassette
        self.path = Path(path) if path else None
        self._lock = threading.Lock()

    def verify(self, lean_source: str) -> VerifierReport:
        report = self.inner.verify(lean_source)
        entry = {
            "kind": "verify",
            "fingerprint": verify_fingerprint(lean_source),
            "report": report.to_payload(),
        }
        with self._lock:
            self.cassette.add(entry)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return report


class ReplayJudge(JudgeClient):
    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def judge(self, nl_statement: str, fl_statement: str) -> JudgeVerdict:
        entry = self.cassette.replay("judge", judge_fingerprint(nl_statement, fl_statement))
        return JudgeVerdict.from_payload(entry["verdict"])


class RecordingJudge(JudgeClient):
    def __init__(self, inner: JudgeClient, cassette: Cassette, path: str | Path | None = None):
        self.inner = inner
        self.cassette = cassette
        self.path = Path(path) if path else None
        self._lock = threading.Lock()

    def judge(self, nl_statement: str, fl_statement: str) -> JudgeVerdict:
        verdict = self.inner.judge(nl_statement, fl_statement)
        entry = {
            "kind": "judge",
            "fingerprint": judge_fingerprint(nl_statement, fl_statement),
            "verdict": verdict.to_payload(),
        }
        with self._lock:
            self.cassette.add(entry)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return verdict
