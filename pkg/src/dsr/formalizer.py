"""Component formalization: Lean fragment plus operator tree per component.

The model answers with one ```lean fenced block (the linear fragment)
followed by one ```json fenced block (the tree). Structure comes first: when
the tree is valid, its assembly is the authoritative fragment and overwrites
the linear code. An invalid tree is discarded and the linear fragment stands
alone, so a usable output string always exists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .clients import ChatRequest, Decoding, LlmClient, PurposeTag
from .decomposer import LogicalComponent
from .errors import InvalidArity, MalformedJson, NoCodeBlock, SchemaViolation
from .opt_tree import OptNode, assemble, parse_opt
from .prompts import build_structure_prompt

FORMALIZE_DECODING = Decoding(temperature=0.0, max_tokens=2048)

FENCE_RE = re.compile(r"```([A-Za-z0-9_+-]*)[ \t]*\n(.*?)\n?```", re.DOTALL)


@dataclass(frozen=True)
class FormalizedComponent:
    nl: LogicalComponent
    fl_code: str
    opt: OptNode | None
    used_fallback: bool

    def __post_init__(self):
        if self.used_fallback != (self.opt is None):
            raise ValueError("used_fallback must hold exactly when the tree is absent")
        if not self.fl_code:
            raise ValueError("fl_code must be non-empty")


def parse_formalizer_output(response: str) -> tuple[str, str | None]:
    """Extract (fl_code, opt_json) from the fenced-block response.

    The first non-json fence is the code; the first json fence is the tree.
    """
    fl_code: str | None = None
    opt_json: str | None = None
    for match in FENCE_RE.finditer(response):
        language = match.group(1).lower()
        if language == "json":
            if opt_json is None:
                opt_json = match.group(2)
        elif fl_code is None:
            fl_code = match.group(2).strip()
    if not fl_code:
        raise NoCodeBlock("response carries no fenced code block")
    return fl_code, opt_json


def formalize_component(
    llm: LlmClient,
    component: LogicalComponent,
    decoding: Decoding | None = None,
) -> FormalizedComponent:
    """One formalization call; malformed trees fall back to the linear code."""
    prompt = build_structure_prompt(component.text, component.role.value)
    response = llm.complete(
        ChatRequest(
            prompt=prompt,
            decoding=decoding or FORMALIZE_DECODING,
            purpose_tag=PurposeTag.FORMALIZE,
        )
    )
    fl_code, opt_json = parse_formalizer_output(response)
    opt: OptNode | None = None
    if opt_json is not None:
        try:
            opt = parse_opt(opt_json)
        except (MalformedJson, SchemaViolation, InvalidArity):
            opt = None  # failsafe: discard the malformed tree, keep the code
    if opt is not None:
        fl_code, _ = assemble(opt)  # structure-first: assembly wins over the linear code
    return FormalizedComponent(nl=component, fl_code=fl_code, opt=opt, used_fallback=opt is None)
