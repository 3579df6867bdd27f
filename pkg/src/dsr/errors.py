"""Exception hierarchy for the dsr pipeline.

Every failure mode that callers are expected to branch on gets its own
class; generic bugs surface as plain Python exceptions.
"""

from __future__ import annotations


class DsrError(Exception):
    """Base class for all pipeline errors."""


# ---------------------------------------------------------------------------
# Operator tree errors


class MalformedJson(DsrError):
    """Tree payload is not parseable JSON."""


class SchemaViolation(DsrError):
    """Tree payload parsed but keys are missing, ill-typed, or empty."""


class InvalidArity(DsrError):
    """A node's slot count does not match its child count."""

    def __init__(self, path: tuple[int, ...], message: str | None = None):
        self.path = path
        super().__init__(message or f"slot/child count mismatch at path {list(path)}")


class InvalidPath(DsrError):
    """A node path does not exist in the tree."""


class OffsetOutOfRange(DsrError):
    """Character offset falls outside the assembled text."""


class PositionOutOfRange(DsrError):
    """(line, column) does not address an existing character."""


# ---------------------------------------------------------------------------
# Client errors


class TransportError(DsrError):
    """Live HTTP call failed after exhausting retries."""


class CassetteMiss(DsrError):
    """Replay client has no recording for the request fingerprint."""

    def __init__(self, kind: str, fingerprint: str, detail: str = ""):
        self.kind = kind
        self.fingerprint = fingerprint
        super().__init__(f"no {kind} recording for fingerprint {fingerprint[:12]}... {detail}".rstrip())


class VerifierUnavailable(DsrError):
    """The verifier command or endpoint could not be reached."""


class DiagnosticParseError(DsrError):
    """Verifier output could not be parsed into diagnostics."""


class JudgeUnavailable(DsrError):
    """The consistency judge could not be reached."""


# ---------------------------------------------------------------------------
# Structured-response parse errors


class MissingSection(DsrError):
    """A required heading is absent from a model response."""

    def __init__(self, heading: str):
        self.heading = heading
        super().__init__(f"missing section heading {heading!r}")


class MultipleConclusions(DsrError):
    """More than one conclusion where exactly one is allowed."""


class EmptyConclusion(DsrError):
    """Conclusion section present but empty."""


class NoCodeBlock(DsrError):
    """Formalizer response carries no fenced code block."""


class MalformedRepairResponse(DsrError):
    """Repair response lacks the expected output headings."""


class UnmappedLine(DsrError):
    """Back-translation line lacks the arrow mapping."""

    def __init__(self, line: str):
        self.line = line
        super().__init__(f"line has no '-->' mapping: {line!r}")


# ---------------------------------------------------------------------------
# Statement building / corpus / evaluation errors


class NoConclusion(DsrError):
    """Component list carries no conclusion."""


class MissingOpt(DsrError):
    """A non-atomic corpus triple has no operator tree."""


class EmptyTier(DsrError):
    """A curriculum phase requests samples from an empty tier."""

    def __init__(self, tier: str):
        self.tier = tier
        super().__init__(f"tier {tier} is empty but has a non-zero quota")


class EmptyBenchmark(DsrError):
    """Benchmark run invoked with no items."""
