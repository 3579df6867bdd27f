"""Shared client datatypes and interfaces.

Three external dependencies sit behind uniform contracts: a chat-completion
LLM, a Lean verifier, and a consistency judge. Each has a live implementation
and a deterministic record/replay double, so every pipeline above this layer
runs offline.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from enum import Enum


class PurposeTag(str, Enum):
    """What an LLM call is for; drives budget accounting."""

    DECOMPOSE = "decompose"
    FORMALIZE = "formalize"
    REPAIR_SUB = "repair_sub"
    REPAIR_COMP = "repair_comp"
    REPAIR_STMT = "repair_stmt"
    BACKTRANSLATE = "backtranslate"


REPAIR_TAGS = {PurposeTag.REPAIR_SUB, PurposeTag.REPAIR_COMP, PurposeTag.REPAIR_STMT}


@dataclass(frozen=True)
class Decoding:
    temperature: float = 0.0
    max_tokens: int = 1024


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    decoding: Decoding
    purpose_tag: PurposeTag

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.decoding.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.decoding.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    line: int  # 1-based
    column: int  # 0-based
    message: str

    def __post_init__(self):
        if self.line < 1:
            raise ValueError("line is 1-based")
        if self.column < 0:
            raise ValueError("column is 0-based")

    def to_payload(self) -> dict:
        return {
            "severity": self.severity.value,
            "line": self.line,
            "column": self.column,
            "message": self.message,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Diagnostic":
        return cls(
            severity=Severity(payload["severity"]),
            line=int(payload["line"]),
            column=int(payload["column"]),
            message=str(payload["message"]),
        )


@dataclass(frozen=True)
class VerifierReport:
    compiles: bool
    diagnostics: tuple[Diagnostic, ...]
    toolchain: str

    def __post_init__(self):
        has_error = any(d.severity is Severity.ERROR for d in self.diagnostics)
        if self.compiles == has_error:
            raise ValueError("compiles must hold exactly when no error diagnostics exist")

    @classmethod
    def from_diagnostics(cls, diagnostics: list[Diagnostic], toolchain: str) -> "VerifierReport":
        compiles = not any(d.severity is Severity.ERROR for d in diagnostics)
        return cls(compiles=compiles, diagnostics=tuple(diagnostics), toolchain=toolchain)

    def first_error(self) -> Diagnostic | None:
        for diagnostic in self.diagnostics:
            if diagnostic.severity is Severity.ERROR:
                return diagnostic
        return None

    def to_payload(self) -> dict:
        return {
            "compiles": self.compiles,
            "diagnostics": [d.to_payload() for d in self.diagnostics],
            "toolchain": self.toolchain,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "VerifierReport":
        return cls.from_diagnostics(
            [Diagnostic.from_payload(d) for d in payload["diagnostics"]],
            toolchain=payload.get("toolchain", ""),
        )


@dataclass(frozen=True)
class JudgeVerdict:
    score: float
    threshold: float
    passed: bool

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0 and 0.0 <= self.threshold <= 1.0):
            raise ValueError("score and threshold live in [0, 1]")
        if self.passed != (self.score >= self.threshold):
            raise ValueError("passed must hold exactly when score >= threshold")

    @classmethod
    def from_score(cls, score: float, threshold: float) -> "JudgeVerdict":
        return cls(score=score, threshold=threshold, passed=score >= threshold)

    def to_payload(self) -> dict:
        return {"score": self.score, "threshold": self.threshold, "passed": self.passed}

    @classmethod
    def from_payload(cls, payload: dict) -> "JudgeVerdict":
        return cls(
            score=float(payload["score"]),
            threshold=float(payload["threshold"]),
            passed=bool(payload["passed"]),
        )


class LlmClient:
    """Interface: pipelines call .complete(request) and get the model text."""

    def complete(self, request: ChatRequest) -> str:
        raise NotImplementedError


class VerifierClient:
    """Interface: .verify(source) compiles Lean source and reports diagnostics."""

    def verify(self, lean_source: str) -> VerifierReport:
        raise NotImplementedError


class JudgeClient:
    """Interface: .judge(nl, fl) scores semantic consistency."""

    def judge(self, nl_statement: str, fl_statement: str) -> JudgeVerdict:
        raise NotImplementedError


class CallCounter(LlmClient):
    """Wrapper that tallies completions per purpose tag.

    The per-tag sums are what budget accounting checks against a trajectory's
    calls_used.
    """

    def __init__(self, inner: LlmClient):
        self.inner = inner
        self.counts: Counter[PurposeTag] = Counter()
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.counts[request.purpose_tag] += 1
        return self.inner.complete(request)

    def total(self, tags=None) -> int:
        if tags is None:
            return sum(self.counts.values())
        return sum(count for tag, count in self.counts.items() if tag in tags)


@dataclass
class PipelineClients:
    """The bundle a pipeline stage needs."""

    llm: LlmClient
    verifier: VerifierClient
    judge: JudgeClient | None = None
