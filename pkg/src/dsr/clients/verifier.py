"""Lean verifier clients.

The default is a command template that receives a scratch .lean file path and
emits machine-readable JSON-lines diagnostics on stdout (the Lean toolchain's
--json mode); an HTTP mode exists for pooled compile servers. Compilation is
expensive, so in-flight runs are limited by a permit semaphore.

`sorry` surfaces as a warning, never an error, so a statement ending in
`by sorry` reports compiles=true.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import tempfile
import threading
from pathlib import Path
from typing import Callable

import requests

from ..errors import DiagnosticParseError, VerifierUnavailable
from .base import Diagnostic, Severity, VerifierClient, VerifierReport

DEFAULT_TOOLCHAIN = "v4.15.0"


def _parse_severity(raw: str) -> Severity:
    # Lean also emits "information"; anything non-fatal folds into warning.
    return Severity.ERROR if raw == "error" else Severity.WARNING


def parse_diagnostic_lines(output: str) -> list[Diagnostic]:
    """Parse JSON-lines diagnostics, tolerating non-JSON build noise."""
    diagnostics = []
    for line in output.splitlines():
        line = line.strip()
        if not line.startswith("{"):
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DiagnosticParseError(f"bad diagnostic line: {line[:120]}") from exc
        diagnostics.append(_diagnostic_from_payload(payload))
    return diagnostics


def _diagnostic_from_payload(payload: dict) -> Diagnostic:
    try:
        if "pos" in payload:  # Lean's native shape
            return Diagnostic(
                severity=_parse_severity(payload.get("severity", "error")),
                line=int(payload["pos"]["line"]),
                column=int(payload["pos"]["column"]),
                message=str(payload.get("data", payload.get("message", ""))),
            )
        return Diagnostic(
            severity=_parse_severity(payload.get("severity", "error")),
            line=int(payload["line"]),
            column=int(payload["column"]),
            message=str(payload["message"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagnosticParseError(f"diagnostic missing fields: {payload}") from exc


class CommandVerifier(VerifierClient):
    def __init__(
        self,
        command_template: str,
        toolchain: str = DEFAULT_TOOLCHAIN,
        permits: int = 2,
        timeout: float = 300.0,
        workdir: str | None = None,
    ):
        self.command_template = command_template
        self.toolchain = toolchain
        self.timeout = timeout
        self.workdir = workdir
        self._permits = threading.Semaphore(permits)

    def verify(self, lean_source: str) -> VerifierReport:
        with self._permits:
            with tempfile.NamedTemporaryFile(
                "w", suffix=".lean", encoding="utf-8", delete=False, dir=self.workdir
            ) as fh:
                fh.write(lean_source if lean_source.endswith("\n") else lean_source + "\n")
                scratch = Path(fh.name)
            try:
                command = [
                    part.replace("{file}", str(scratch))
                    for part in shlex.split(self.command_template)
                ]
                try:
                    proc = subprocess.run(
                        command,
                        capture_output=True,
                        text=True,
                        timeout=self.timeout,
                        cwd=self.workdir,
                    )
                except (OSError, subprocess.TimeoutExpired) as exc:
                    raise VerifierUnavailable(str(exc)) from exc
                diagnostics = parse_diagnostic_lines(proc.stdout)
                # non-zero exit with zero parsed errors means the tool itself broke
                if proc.returncode != 0 and not any(
                    d.severity is Severity.ERROR for d in diagnostics
                ):
                    raise VerifierUnavailable(
                        f"exit {proc.returncode} without error diagnostics: {proc.stderr[:200]}"
                    )
                return VerifierReport.from_diagnostics(diagnostics, self.toolchain)
            finally:
                scratch.unlink(missing_ok=True)


class HttpVerifier(VerifierClient):
    def __init__(
        self,
        endpoint: str,
        toolchain: str = DEFAULT_TOOLCHAIN,
        permits: int = 2,
        timeout: float = 300.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.toolchain = toolchain
        self.timeout = timeout
        self.session = session or requests.Session()
        self._permits = threading.Semaphore(permits)

    def verify(self, lean_source: str) -> VerifierReport:
        with self._permits:
            try:
                response = self.session.post(
                    self.endpoint, json={"source": lean_source}, timeout=self.timeout
                )
            except requests.RequestException as exc:
                raise VerifierUnavailable(str(exc)) from exc
        if response.status_code != 200:
            raise VerifierUnavailable(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            payload = response.json()
            diagnostics = [_diagnostic_from_payload(d) for d in payload["diagnostics"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise DiagnosticParseError(str(exc)) from exc
        return VerifierReport.from_diagnostics(
            diagnostics, payload.get("toolchain", self.toolchain)
        )


SORRY_WARNING = "declaration uses 'sorry'"


def clean_report(source: str, toolchain: str = DEFAULT_TOOLCHAIN) -> VerifierReport:
    """Report for a source accepted as-is, warning about any sorry placeholder."""
    diagnostics = []
    index = source.find("sorry")
    if index >= 0:
        line = source.count("\n", 0, index) + 1
        column = index - (source.rfind("\n", 0, index) + 1)
        diagnostics.append(
            Diagnostic(severity=Severity.WARNING, line=line, column=column, message=SORRY_WARNING)
        )
    return VerifierReport.from_diagnostics(diagnostics, toolchain)


class ScriptedVerifier(VerifierClient):
    """Offline double: a rule function maps source text to its report.

    Content-addressed rather than call-ordered, so replays stay deterministic
    no matter how many times a pipeline re-verifies.
    """

    def __init__(
        self,
        rule: Callable[[str], VerifierReport] | None = None,
        toolchain: str = DEFAULT_TOOLCHAIN,
    ):
        self.toolchain = toolchain
        self.rule = rule or (lambda source: clean_report(source, toolchain))
        self.calls: list[str] = []

    def verify(self, lean_source: str) -> VerifierReport:
        self.calls.append(lean_source)
        return self.rule(lean_source)
