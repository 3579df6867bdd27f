"""Pipeline configuration: one JSON file wires every client.

Credentials never live in the file; each client names the environment
variable that holds its key. A cassette path switches any client to replay
(or, with record=True, wraps the live client with a recorder).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .clients import (
    Cassette,
    CommandVerifier,
    Decoding,
    HttpJudge,
    HttpVerifier,
    LiveLlmClient,
    PipelineClients,
    PurposeTag,
    RecordingJudge,
    RecordingLlmClient,
    RecordingVerifier,
    ReplayJudge,
    ReplayLlmClient,
    ReplayVerifier,
    ScriptedJudge,
    ScriptedVerifier,
)
from .repair import AccountingMode, RepairConfig

DEFAULT_DECODINGS: dict[PurposeTag, Decoding] = {
    PurposeTag.DECOMPOSE: Decoding(temperature=0.0, max_tokens=1024),
    PurposeTag.FORMALIZE: Decoding(temperature=0.0, max_tokens=2048),
    PurposeTag.REPAIR_SUB: Decoding(temperature=0.0, max_tokens=1024),
    PurposeTag.REPAIR_COMP: Decoding(temperature=0.0, max_tokens=1024),
    PurposeTag.REPAIR_STMT: Decoding(temperature=0.0, max_tokens=1024),
    PurposeTag.BACKTRANSLATE: Decoding(temperature=0.0, max_tokens=2048),
}


@dataclass
class LlmSettings:
    base_url: str = ""
    model: str = ""
    api_key_env: str = "DSR_LLM_API_KEY"
    retries: int = 3
    backoff_seconds: float = 0.5
    timeout: float = 120.0
    decodings: dict[PurposeTag, Decoding] = field(
        default_factory=lambda: dict(DEFAULT_DECODINGS)
    )

    def decoding_for(self, tag: PurposeTag) -> Decoding:
        return self.decodings.get(tag, Decoding())


@dataclass
class VerifierSettings:
    mode: str = "clean"  # command | http | clean
    command_template: str = ""
    endpoint: str = ""
    permits: int = 2
    toolchain: str = "v4.15.0"
    timeout: float = 300.0


@dataclass
class JudgeSettings:
    mode: str = "constant"  # http | constant
    endpoint: str = ""
    threshold: float = 0.6
    api_key_env: str = "DSR_JUDGE_API_KEY"
    constant_score: float = 1.0


@dataclass
class PipelineConfig:
    llm: LlmSettings = field(default_factory=LlmSettings)
    verifier: VerifierSettings = field(default_factory=VerifierSettings)
    judge: JudgeSettings = field(default_factory=JudgeSettings)
    repair: RepairConfig = field(default_factory=RepairConfig)
    workers: int = 4
    theorem_name: str = "test"

    @classmethod
    def from_payload(cls, payload: dict) -> "PipelineConfig":
        config = cls()
        llm = payload.get("llm", {})
        config.llm = LlmSettings(
            base_url=llm.get("base_url", ""),
            model=llm.get("model", ""),
            api_key_env=llm.get("api_key_env", "DSR_LLM_API_KEY"),
            retries=int(llm.get("retries", 3)),
            backoff_seconds=float(llm.get("backoff_seconds", 0.5)),
            timeout=float(llm.get("timeout", 120.0)),
            decodings=_parse_decodings(llm.get("decodings", {})),
        )
        verifier = payload.get("verifier", {})
        config.verifier = VerifierSettings(
            mode=verifier.get("mode", "clean"),
            command_template=verifier.get("command_template", ""),
            endpoint=verifier.get("endpoint", ""),
            permits=int(verifier.get("permits", 2)),
            toolchain=verifier.get("toolchain", "v4.15.0"),
            timeout=float(verifier.get("timeout", 300.0)),
        )
        judge = payload.get("judge", {})
        config.judge = JudgeSettings(
            mode=judge.get("mode", "constant"),
            endpoint=judge.get("endpoint", ""),
            threshold=float(judge.get("threshold", 0.6)),
            api_key_env=judge.get("api_key_env", "DSR_JUDGE_API_KEY"),
            constant_score=float(judge.get("constant_score", 1.0)),
        )
        repair = payload.get("repair", {})
        config.repair = RepairConfig(
            budget=int(repair.get("budget", 4)),
            accounting=AccountingMode(repair.get("accounting", "repairs_only")),
            judge_threshold=config.judge.threshold,
        )
        config.workers = int(payload.get("workers", 4))
        config.theorem_name = payload.get("theorem_name", "test")
        return config

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))


def _parse_decodings(payload: dict) -> dict[PurposeTag, Decoding]:
    decodings = dict(DEFAULT_DECODINGS)
    for key, value in payload.items():
        tag = PurposeTag(key)
        base = decodings[tag]
        decodings[tag] = Decoding(
            temperature=float(value.get("temperature", base.temperature)),
            max_tokens=int(value.get("max_tokens", base.max_tokens)),
        )
    return decodings


def build_clients(
    config: PipelineConfig,
    cassette: Cassette | None = None,
    record_path: str | Path | None = None,
) -> PipelineClients:
    """Assemble the client bundle.

    With a cassette and no record path, every client replays (the verifier
    and judge fall back to their configured modes when the tape has no
    entries of their kind). With a record path, live clients are wrapped
    with recorders appending to that file.
    """
    replaying = cassette is not None and record_path is None
    kinds = {entry.get("kind", "llm") for entry in cassette.entries} if cassette else set()

    if replaying:
        llm = ReplayLlmClient(cassette)
    else:
        llm = LiveLlmClient(
            base_url=config.llm.base_url,
            model=config.llm.model,
            api_key_env=config.llm.api_key_env,
            retries=config.llm.retries,
            backoff_seconds=config.llm.backoff_seconds,
            timeout=config.llm.timeout,
        )

    if replaying and "verify" in kinds:
        verifier = ReplayVerifier(cassette)
    elif config.verifier.mode == "command":
        verifier = CommandVerifier(
            command_template=config.verifier.command_template,
            toolchain=config.verifier.toolchain,
            permits=config.verifier.permits,
            timeout=config.verifier.timeout,
        )
    elif config.verifier.mode == "http":
        verifier = HttpVerifier(
            endpoint=config.verifier.endpoint,
            toolchain=config.verifier.toolchain,
            permits=config.verifier.permits,
            timeout=config.verifier.timeout,
        )
    else:
        verifier = ScriptedVerifier(toolchain=config.verifier.toolchain)

    if replaying and "judge" in kinds:
        judge = ReplayJudge(cassette)
    elif config.judge.mode == "http":
        judge = HttpJudge(
            endpoint=config.judge.endpoint,
            threshold=config.judge.threshold,
            api_key_env=config.judge.api_key_env,
        )
    else:
        judge = ScriptedJudge(score=config.judge.constant_score, threshold=config.judge.threshold)

    if record_path is not None:
        tape = cassette or Cassette()
        llm = RecordingLlmClient(llm, tape, record_path)
        verifier = RecordingVerifier(verifier, tape, record_path)
        judge = RecordingJudge(judge, tape, record_path)

    return PipelineClients(llm=llm, verifier=verifier, judge=judge)
