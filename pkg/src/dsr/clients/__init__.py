"""Pluggable clients: LLM, Lean verifier, consistency judge.

Each contract has a live implementation plus deterministic record/replay and
scripted doubles, so everything above this package runs offline.
"""

from .base import (
    CallCounter,
    ChatRequest,
    Decoding,
    Diagnostic,
    JudgeClient,
    JudgeVerdict,
    LlmClient,
    PipelineClients,
    PurposeTag,
    REPAIR_TAGS,
    Severity,
    VerifierClient,
    VerifierReport,
)
from .cassette import (
    Cassette,
    RecordingJudge,
    RecordingLlmClient,
    RecordingVerifier,
    ReplayJudge,
    ReplayLlmClient,
    ReplayVerifier,
    judge_fingerprint,
    llm_fingerprint,
    verify_fingerprint,
)
from .judge import DEFAULT_THRESHOLD, HttpJudge, ScriptedJudge
from .llm import LiveLlmClient, ScriptedLlmClient
from .verifier import (
    DEFAULT_TOOLCHAIN,
    SORRY_WARNING,
    CommandVerifier,
    HttpVerifier,
    ScriptedVerifier,
    clean_report,
)

__all__ = [
    "CallCounter",
    "Cassette",
    "ChatRequest",
    "CommandVerifier",
    "Decoding",
    "DEFAULT_THRESHOLD",
    "DEFAULT_TOOLCHAIN",
    "Diagnostic",
    "HttpJudge",
    "HttpVerifier",
    "JudgeClient",
    "JudgeVerdict",
    "LiveLlmClient",
    "LlmClient",
    "PipelineClients",
    "PurposeTag",
    "RecordingJudge",
    "RecordingLlmClient",
    "RecordingVerifier",
    "REPAIR_TAGS",
    "ReplayJudge",
    "ReplayLlmClient",
    "ReplayVerifier",
    "ScriptedJudge",
    "ScriptedLlmClient",
    "ScriptedVerifier",
    "Severity",
    "SORRY_WARNING",
    "VerifierClient",
    "VerifierReport",
    "clean_report",
    "judge_fingerprint",
    "llm_fingerprint",
    "verify_fingerprint",
]
