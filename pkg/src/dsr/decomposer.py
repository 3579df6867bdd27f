"""Decomposition of a natural-language statement into logical components.

One LLM pass canonicalizes the statement and splits it into numbered
conditions plus exactly one conclusion. Parsing is total over the documented
response format: heading strings are matched exactly, numbering and blank
lines are treated leniently because model formatting drifts, and a missing
heading is a hard error rather than a silent default.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .clients import ChatRequest, Decoding, LlmClient, PurposeTag
from .errors import EmptyConclusion, MissingSection, MultipleConclusions
from .prompts import build_decompose_prompt


class Role(str, Enum):
    CONDITION = "Condition"
    CONCLUSION = "Conclusion"


@dataclass(frozen=True)
class LogicalComponent:
    text: str
    role: Role
    index: int  # 1-based ordinal within the role

    def __post_init__(self):
        if not self.text:
            raise ValueError("component text must be non-empty")


@dataclass(frozen=True)
class Decomposition:
    source_nl: str
    conditions: tuple[LogicalComponent, ...]
    conclusion: LogicalComponent

    def __post_init__(self):
        if self.conclusion.role is not Role.CONCLUSION:
            raise ValueError("conclusion component must carry the Conclusion role")
        if any(c.role is not Role.CONDITION for c in self.conditions):
            raise ValueError("condition components must carry the Condition role")

    @property
    def components(self) -> tuple[LogicalComponent, ...]:
        return self.conditions + (self.conclusion,)


CONDITIONS_HEADING = "**Conditions:**"
CONCLUSION_HEADING = "**Conclusion:**"
NO_CONDITIONS_RE = re.compile(r"^no conditions\.?$", re.IGNORECASE)
NUMBERED_RE = re.compile(r"^\s*\d+[.)]\s*(.*)$")
BULLET_RE = re.compile(r"^\s*[-*]\s+(.*)$")


def parse_decomposition(response: str, source_nl: str) -> Decomposition:
    cond_idx = response.find(CONDITIONS_HEADING)
    if cond_idx < 0:
        raise MissingSection(CONDITIONS_HEADING)
    concl_idx = response.find(CONCLUSION_HEADING)
    if concl_idx < 0:
        raise MissingSection(CONCLUSION_HEADING)

    if cond_idx < concl_idx:
        cond_block = response[cond_idx + len(CONDITIONS_HEADING) : concl_idx]
        concl_block = response[concl_idx + len(CONCLUSION_HEADING) :]
    else:
        concl_block = response[concl_idx + len(CONCLUSION_HEADING) : cond_idx]
        cond_block = response[cond_idx + len(CONDITIONS_HEADING) :]

    condition_texts = _parse_conditions(cond_block)
    conclusion_text = _parse_conclusion(concl_block)

    conditions = tuple(
        LogicalComponent(text=text, role=Role.CONDITION, index=i + 1)
        for i, text in enumerate(condition_texts)
    )
    conclusion = LogicalComponent(text=conclusion_text, role=Role.CONCLUSION, index=1)
    return Decomposition(source_nl=source_nl, conditions=conditions, conclusion=conclusion)


def _parse_conditions(block: str) -> list[str]:
    texts: list[str] = []
    saw_sentinel = False
    for raw_line in block.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if NO_CONDITIONS_RE.match(line):
            saw_sentinel = True
            continue
        numbered = NUMBERED_RE.match(line)
        if numbered:
            texts.append(numbered.group(1).strip())
        elif texts:
            # soft-wrapped continuation of the previous condition
            texts[-1] = f"{texts[-1]} {line}"
        # lines before the first number are model preamble; ignored
    if saw_sentinel and not texts:
        return []
    return texts


def _parse_conclusion(block: str) -> str:
    bullets: list[str] = []
    plain: list[str] = []
    for raw_line in block.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        bullet = BULLET_RE.match(line)
        if bullet:
            bullets.append(bullet.group(1).strip())
        elif bullets:
            bullets[-1] = f"{bullets[-1]} {line}"
        else:
            plain.append(line)
    if len(bullets) > 1:
        raise MultipleConclusions(f"{len(bullets)} conclusion bullets")
    if bullets:
        return bullets[0]
    if len(plain) > 1:
        raise MultipleConclusions(f"{len(plain)} conclusion lines")
    if plain:
        return plain[0]
    raise EmptyConclusion("conclusion section is empty")


def decompose(
    llm: LlmClient, nl_statement: str, decoding: Decoding | None = None
) -> Decomposition:
    """One decomposition call plus structured parsing."""
    prompt = build_decompose_prompt(nl_statement)
    response = llm.complete(
        ChatRequest(prompt=prompt, decoding=decoding or Decoding(), purpose_tag=PurposeTag.DECOMPOSE)
    )
    return parse_decomposition(response, nl_statement)
