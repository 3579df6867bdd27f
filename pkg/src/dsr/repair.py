"""Tree-guided repair: bottom-up subtree surgery with escalation.

The engine verifies the draft, maps the first error-severity diagnostic to
the deepest tree node covering the compiler position, and repairs at the
located node's immediate parent with a single inference pass. A repair
attempt counts as fixed when re-verification compiles or the first error's
message changes; otherwise the splice is reverted and the scope widens to
the grandparent, then the whole component, then the whole statement. Each
attempt at any granularity is one inference call against the budget.

After a statement-level rewrite the span map is gone (rebuilding trees from
repaired text would need a Lean parser), so later errors go straight to
statement level. Once the source compiles, a mandatory statement-level pass
runs in semantic-audit mode; its output is adopted if changed, and the
consistency judge's verdict is recorded alongside.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .clients import (
    ChatRequest,
    Decoding,
    Diagnostic,
    JudgeVerdict,
    PipelineClients,
    PurposeTag,
    VerifierReport,
)
from .decomposer import Role
from .errors import (
    MalformedRepairResponse,
    PositionOutOfRange,
    TransportError,
    VerifierUnavailable,
)
from .formalizer import FormalizedComponent
from .opt_tree import SLOT, NodePath, assemble, leaf, replace_subtree, subtree_at
from .prompts import (
    build_component_repair_prompt,
    build_statement_repair_prompt,
    build_subcomponent_repair_prompt,
    serialize_error,
)
from .statement import (
    HEADER,
    TheoremDraft,
    build_statement,
    component_fragment,
    locate_in_draft,
)

REPAIR_DECODING = Decoding(temperature=0.0, max_tokens=1024)

SKIP_SUMMARY = "No compilation errors found. Skipped"


class RepairLevel(str, Enum):
    SUBCOMPONENT = "Subcomponent"
    COMPONENT = "Component"
    STATEMENT = "Statement"
    SEMANTIC_CHECK = "SemanticCheck"


class StepOutcome(str, Enum):
    FIXED = "fixed"
    FAILED = "failed"
    SKIPPED = "skipped"


class AccountingMode(str, Enum):
    REPAIRS_ONLY = "repairs_only"
    ALL_LLM_CALLS = "all_llm_calls"


class FinalStatus(str, Enum):
    VERIFIED_CONSISTENT = "verified_consistent"
    VERIFIED_ONLY = "verified_only"
    FAILED = "failed"


@dataclass(frozen=True)
class RepairConfig:
    budget: int = 4
    accounting: AccountingMode = AccountingMode.REPAIRS_ONLY
    judge_threshold: float = 0.6
    decoding: Decoding = REPAIR_DECODING

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass(frozen=True)
class RepairStep:
    level: RepairLevel
    target: tuple[int, NodePath] | None
    broken_code: str
    diagnostic: Diagnostic | None
    response_summary: str
    outcome: StepOutcome
    round: int
    corrected: str | None = None

    def to_payload(self) -> dict:
        return {
            "level": self.level.value,
            "target": None
            if self.target is None
            else {"component": self.target[0], "path": list(self.target[1])},
            "broken_code": self.broken_code,
            "diagnostic": self.diagnostic.to_payload() if self.diagnostic else None,
            "response_summary": self.response_summary,
            "outcome": self.outcome.value,
            "round": self.round,
            "corrected": self.corrected,
        }


@dataclass
class RepairTrajectory:
    steps: list[RepairStep]
    calls_used: int
    final_source: str
    final_status: FinalStatus
    budget: int
    accounting: AccountingMode
    judge_verdict: JudgeVerdict | None = None
    failure_reason: str | None = None

    def to_payload(self) -> dict:
        return {
            "steps": [step.to_payload() for step in self.steps],
            "calls_used": self.calls_used,
            "final_source": self.final_source,
            "final_status": self.final_status.value,
            "budget": self.budget,
            "accounting": self.accounting.value,
            "judge_verdict": self.judge_verdict.to_payload() if self.judge_verdict else None,
            "failure_reason": self.failure_reason,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_payload(), ensure_ascii=False)


_FENCE_RE = re.compile(r"```[A-Za-z0-9_+-]*[ \t]*\n(.*?)\n?```", re.DOTALL)

_REASON_HEADING = "**Error Reason:**"
_SNIPPET_HEADING = "**Corrected Code Snippet:**"
_STATEMENT_HEADING = "**Corrected Formal Statement:**"


def parse_repair_response(level: RepairLevel, response: str) -> tuple[str, str]:
    """Extract (error_reason, corrected) from a repair response."""
    heading = (
        _STATEMENT_HEADING
        if level in (RepairLevel.STATEMENT, RepairLevel.SEMANTIC_CHECK)
        else _SNIPPET_HEADING
    )
    idx = response.find(heading)
    if idx < 0:
        raise MalformedRepairResponse(f"missing heading {heading!r}")
    corrected = response[idx + len(heading) :].strip()
    fence = _FENCE_RE.match(corrected)
    if fence:
        corrected = fence.group(1).strip()
    if not corrected:
        raise MalformedRepairResponse("empty corrected code")
    reason = ""
    reason_idx = response.find(_REASON_HEADING)
    if 0 <= reason_idx < idx:
        reason = response[reason_idx + len(_REASON_HEADING) : idx].strip().splitlines()
        reason = reason[0].strip() if reason else ""
    return reason, corrected


def build_repair_prompt(
    level: RepairLevel,
    broken_code: str,
    diagnostic: Diagnostic | None,
    informal: str,
    declared_variables: str,
) -> str:
    """Level-appropriate prompt; a missing diagnostic means the semantic branch."""
    error_json = (
        serialize_error(
            diagnostic.severity.value, diagnostic.line, diagnostic.column, diagnostic.message
        )
        if diagnostic
        else None
    )
    if level is RepairLevel.SUBCOMPONENT:
        return build_subcomponent_repair_prompt(broken_code, error_json or "NULL", declared_variables)
    if level is RepairLevel.COMPONENT:
        return build_component_repair_prompt(
            informal, broken_code, error_json or "NULL", declared_variables
        )
    return build_statement_repair_prompt(informal, broken_code, error_json)


_LEVEL_TAG = {
    RepairLevel.SUBCOMPONENT: PurposeTag.REPAIR_SUB,
    RepairLevel.COMPONENT: PurposeTag.REPAIR_COMP,
    RepairLevel.STATEMENT: PurposeTag.REPAIR_STMT,
    RepairLevel.SEMANTIC_CHECK: PurposeTag.REPAIR_STMT,
}


@dataclass
class _State:
    """Working source, structured while the span map is still trustworthy."""

    source: str
    draft: TheoremDraft | None

    @property
    def statement_text(self) -> str:
        return self.source[len(HEADER) :] if self.source.startswith(HEADER) else self.source


def _full_source(statement: str) -> str:
    return statement if statement.lstrip().startswith("import ") else HEADER + statement


def _declared_variables(draft: TheoremDraft, component_index: int) -> str:
    target_start = None
    for entry in draft.layout:
        if entry.component == component_index:
            target_start = entry.interval.start
            break
    fragments = []
    for entry in draft.layout:
        if target_start is not None and entry.interval.start >= target_start:
            continue
        if draft.components[entry.component].nl.role is Role.CONDITION:
            fragments.append(draft.source[entry.interval.start : entry.interval.end].strip())
    return "\n".join(fragments) if fragments else "NULL"


def _build_ladder(state: _State, diagnostic: Diagnostic):
    if state.draft is None:
        return [(RepairLevel.STATEMENT, None)]
    try:
        location = locate_in_draft(state.draft, diagnostic)
    except PositionOutOfRange:
        return [(RepairLevel.STATEMENT, None)]
    if location.is_statement:
        return [(RepairLevel.STATEMENT, None)]
    component = state.draft.components[location.component]
    rungs: list[tuple[RepairLevel, tuple[int, NodePath] | None]] = []
    if component.opt is not None and location.path:
        parent = location.path[:-1]
        for length in range(len(parent), 0, -1):
            rungs.append((RepairLevel.SUBCOMPONENT, (location.component, parent[:length])))
    rungs.append((RepairLevel.COMPONENT, (location.component, ())))
    rungs.append((RepairLevel.STATEMENT, None))
    return rungs


def _apply_candidate(state: _State, level: RepairLevel, target, corrected: str) -> _State | None:
    """New state with the corrected text spliced in; None when unusable."""
    if level is RepairLevel.STATEMENT:
        return _State(source=_full_source(corrected), draft=None)
    if SLOT in corrected:
        return None  # a raw-text leaf holding a slot marker would break arity
    component_index, path = target
    draft = state.draft
    component = draft.components[component_index]
    if level is RepairLevel.SUBCOMPONENT:
        new_opt = replace_subtree(component.opt, path, leaf(corrected))
        new_component = replace(
            component, fl_code=assemble(new_opt)[0], opt=new_opt, used_fallback=False
        )
    elif component.opt is not None:
        new_component = replace(
            component, fl_code=corrected, opt=leaf(corrected), used_fallback=False
        )
    else:
        new_component = replace(component, fl_code=corrected)
    components = list(draft.components)
    components[component_index] = new_component
    new_draft = build_statement(components, draft.name)
    return _State(source=new_draft.source, draft=new_draft)


def run_repair(
    draft: TheoremDraft,
    nl_statement: str,
    clients: PipelineClients,
    config: RepairConfig | None = None,
    initial_calls: int = 0,
) -> RepairTrajectory:
    """Drive the repair state machine to a final source and status.

    Model and compile failures are recorded in the trajectory; only transport
    and verifier outages abort, and those also come back as status=failed.
    """
    config = config or RepairConfig()
    try:
        return _run_repair(draft, nl_statement, clients, config, initial_calls)
    except (TransportError, VerifierUnavailable) as exc:
        return RepairTrajectory(
            steps=[],
            calls_used=initial_calls,
            final_source=draft.source,
            final_status=FinalStatus.FAILED,
            budget=config.budget,
            accounting=config.accounting,
            failure_reason=f"{type(exc).__name__}: {exc}",
        )


def _run_repair(draft, nl_statement, clients, config, initial_calls) -> RepairTrajectory:
    state = _State(source=draft.source, draft=draft)
    steps: list[RepairStep] = []
    calls = initial_calls
    budget = config.budget
    round_no = 0
    last_good: str | None = None
    status: FinalStatus | None = None

    def complete(level: RepairLevel, prompt: str) -> str:
        return clients.llm.complete(
            ChatRequest(prompt=prompt, decoding=config.decoding, purpose_tag=_LEVEL_TAG[level])
        )

    report = clients.verifier.verify(state.source)

    while status is None:
        diagnostic = report.first_error()

        if diagnostic is None:
            last_good = state.source
            if calls >= budget:
                status = FinalStatus.VERIFIED_ONLY
                break
            round_no += 1
            steps.append(
                RepairStep(
                    level=RepairLevel.SUBCOMPONENT,
                    target=None,
                    broken_code="",
                    diagnostic=None,
                    response_summary=SKIP_SUMMARY,
                    outcome=StepOutcome.SKIPPED,
                    round=round_no,
                )
            )
            statement_text = state.statement_text
            calls += 1
            prompt = build_repair_prompt(
                RepairLevel.SEMANTIC_CHECK, statement_text, None, nl_statement, "NULL"
            )
            response = complete(RepairLevel.SEMANTIC_CHECK, prompt)
            try:
                reason, corrected = parse_repair_response(RepairLevel.SEMANTIC_CHECK, response)
            except MalformedRepairResponse as exc:
                steps.append(
                    RepairStep(
                        level=RepairLevel.SEMANTIC_CHECK,
                        target=None,
                        broken_code=statement_text,
                        diagnostic=None,
                        response_summary=str(exc),
                        outcome=StepOutcome.FAILED,
                        round=round_no,
                    )
                )
                status = FinalStatus.VERIFIED_ONLY
                break
            if corrected == statement_text:
                steps.append(
                    RepairStep(
                        level=RepairLevel.SEMANTIC_CHECK,
                        target=None,
                        broken_code=statement_text,
                        diagnostic=None,
                        response_summary=reason,
                        outcome=StepOutcome.SKIPPED,
                        round=round_no,
                        corrected=corrected,
                    )
                )
                status = FinalStatus.VERIFIED_CONSISTENT
                break
            candidate = _State(source=_full_source(corrected), draft=None)
            candidate_report = clients.verifier.verify(candidate.source)
            state = candidate  # semantic edits are adopted either way
            if candidate_report.compiles:
                steps.append(
                    RepairStep(
                        level=RepairLevel.SEMANTIC_CHECK,
                        target=None,
                        broken_code=statement_text,
                        diagnostic=None,
                        response_summary=reason,
                        outcome=StepOutcome.FIXED,
                        round=round_no,
                        corrected=corrected,
                    )
                )
                last_good = state.source
                status = FinalStatus.VERIFIED_CONSISTENT
                break
            steps.append(
                RepairStep(
                    level=RepairLevel.SEMANTIC_CHECK,
                    target=None,
                    broken_code=statement_text,
                    diagnostic=None,
                    response_summary=reason,
                    outcome=StepOutcome.FAILED,
                    round=round_no,
                    corrected=corrected,
                )
            )
            report = candidate_report
            continue

        if calls >= budget:
            status = FinalStatus.FAILED
            break

        round_no += 1
        handled = False
        for level, target in _build_ladder(state, diagnostic):
            if calls >= budget:
                break
            if level is RepairLevel.SUBCOMPONENT:
                component = state.draft.components[target[0]]
                broken = assemble(subtree_at(component.opt, target[1]))[0]
                declared = _declared_variables(state.draft, target[0])
                informal = component.nl.text
            elif level is RepairLevel.COMPONENT:
                component = state.draft.components[target[0]]
                broken = component_fragment(component)[0]
                declared = _declared_variables(state.draft, target[0])
                informal = component.nl.text
            else:
                broken = state.statement_text
                declared = "NULL"
                informal = nl_statement

            calls += 1
            prompt = build_repair_prompt(level, broken, diagnostic, informal, declared)
            response = complete(level, prompt)
            try:
                reason, corrected = parse_repair_response(level, response)
            except MalformedRepairResponse as exc:
                steps.append(
                    RepairStep(
                        level=level,
                        target=target,
                        broken_code=broken,
                        diagnostic=diagnostic,
                        response_summary=str(exc),
                        outcome=StepOutcome.FAILED,
                        round=round_no,
                    )
                )
                continue

            candidate = _apply_candidate(state, level, target, corrected)
            if candidate is None:
                steps.append(
                    RepairStep(
                        level=level,
                        target=target,
                        broken_code=broken,
                        diagnostic=diagnostic,
                        response_summary=f"{reason} (snippet rejected: contains {SLOT})".strip(),
                        outcome=StepOutcome.FAILED,
                        round=round_no,
                        corrected=corrected,
                    )
                )
                continue
            candidate_report = clients.verifier.verify(candidate.source)
            first = candidate_report.first_error()
            fixed = first is None or first.message != diagnostic.message
            steps.append(
                RepairStep(
                    level=level,
                    target=target,
                    broken_code=broken,
                    diagnostic=diagnostic,
                    response_summary=reason,
                    outcome=StepOutcome.FIXED if fixed else StepOutcome.FAILED,
                    round=round_no,
                    corrected=corrected,
                )
            )
            if fixed:
                state = candidate
                report = candidate_report
                handled = True
                break
            if level is RepairLevel.STATEMENT:
                # keep the adopted statement so the next prompt sees it
                state = candidate
                report = candidate_report
        if handled:
            continue
        # ladder exhausted or budget gone; the outer loop re-checks both

    final_source = state.source
    if status is FinalStatus.FAILED and last_good is not None:
        # a semantic edit broke a once-compiling source; hand back the good one
        final_source = last_good
        status = FinalStatus.VERIFIED_ONLY

    trajectory = RepairTrajectory(
        steps=steps,
        calls_used=calls,
        final_source=final_source,
        final_status=status,
        budget=budget,
        accounting=config.accounting,
    )
    if status is not FinalStatus.FAILED and clients.judge is not None:
        trajectory.judge_verdict = clients.judge.judge(nl_statement, final_source)
    return trajectory


def trajectory_transcript(trajectory: RepairTrajectory) -> str:
    """Human-readable transcript, one numbered block per step."""
    lines: list[str] = []
    for number, step in enumerate(trajectory.steps, start=1):
        if step.level is RepairLevel.SEMANTIC_CHECK:
            title = "Statement-Level Repair"
        elif step.outcome is StepOutcome.SKIPPED and step.diagnostic is None and not step.corrected:
            title = "Subcomponent/Component-Level Repair"
        else:
            title = f"{step.level.value}-Level Repair"
        lines.append(f"{number}. {title}")
        if step.broken_code:
            lines.append(f"   {step.broken_code}")
        if step.diagnostic is not None:
            lines.append(f"   x Error: {step.diagnostic.message}")
        if step.corrected and step.outcome is not StepOutcome.SKIPPED:
            lines.append(f"   -> {step.corrected}")
        note = step.response_summary or step.outcome.value
        if step.level is RepairLevel.SEMANTIC_CHECK and step.outcome is not StepOutcome.FAILED:
            note = f"{note + ' ' if note else ''}Consistency check passed."
        lines.append(f"   {'ok' if step.outcome is not StepOutcome.FAILED else 'failed'}: {note}")
        lines.append("")
    lines.append(f"Final status: {trajectory.final_status.value}")
    lines.append(f"Calls used: {trajectory.calls_used} / {trajectory.budget}")
    lines.append("")
    lines.append("Final code:")
    lines.append(trajectory.final_source)
    return "\n".join(lines)
