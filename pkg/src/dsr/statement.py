"""Deterministic assembly of formalized components into one Lean theorem.

The grammar is fixed:

    import Mathlib\n\ntheorem <name> <cond> <cond> ... : <conclusion> := by sorry

Condition fragments that are pure bracketed binder groups — `(...)`, `{...}`,
`[...]`, possibly several in a row — go in verbatim; a bare proposition at
condition ordinal i is wrapped as `(h{i} : ...)`. Fragments that declare new
type variables are accepted as-is and left to Lean's auto-bound implicits.

The draft keeps a layout of component intervals plus every component's span
map rebased into statement coordinates, so a compiler position maps straight
to the deepest tree node that produced the text.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clients import Diagnostic
from .decomposer import Role
from .errors import MultipleConclusions, NoConclusion
from .formalizer import FormalizedComponent
from .opt_tree import NodePath, Span, SpanMap, assemble, position_to_offset

HEADER = "import Mathlib\n\n"
DEFAULT_THEOREM_NAME = "test"

_OPEN_TO_CLOSE = {"(": ")", "{": "}", "[": "]"}


def is_binder_sequence(fragment: str) -> bool:
    """True when the fragment is one or more whole bracketed groups."""
    i = 0
    n = len(fragment)
    groups = 0
    while i < n:
        if fragment[i] not in _OPEN_TO_CLOSE:
            return False
        stack = [fragment[i]]
        i += 1
        while i < n and stack:
            ch = fragment[i]
            if ch in _OPEN_TO_CLOSE:
                stack.append(ch)
            elif ch in _OPEN_TO_CLOSE.values():
                if not stack or _OPEN_TO_CLOSE[stack[-1]] != ch:
                    return False
                stack.pop()
            i += 1
        if stack:
            return False
        groups += 1
        while i < n and fragment[i] == " ":
            i += 1
    return groups > 0


@dataclass(frozen=True)
class ComponentLayout:
    component: int  # index into the draft's component tuple
    interval: Span  # full inserted text, wrapper included
    fragment: Span  # the component's own fragment text


@dataclass(frozen=True)
class TheoremDraft:
    name: str
    header: str
    source: str
    layout: tuple[ComponentLayout, ...]
    span_maps: dict[int, SpanMap]  # component index -> rebased spans
    components: tuple[FormalizedComponent, ...]

    @property
    def statement_text(self) -> str:
        """The theorem statement without the import header."""
        return self.source[len(self.header) :]

    def rendered_condition_fragments(self) -> list[str]:
        """Condition texts exactly as inserted, in statement order."""
        return [
            self.source[entry.interval.start : entry.interval.end]
            for entry in self.layout
            if self.components[entry.component].nl.role is Role.CONDITION
        ]


@dataclass(frozen=True)
class DraftLocation:
    """Either statement plumbing or a (component, node path) target."""

    component: int | None
    path: NodePath = ()

    @property
    def is_statement(self) -> bool:
        return self.component is None


STATEMENT_LOCATION = DraftLocation(component=None)


def component_fragment(component: FormalizedComponent) -> tuple[str, SpanMap | None]:
    """Authoritative fragment text: tree assembly when a tree exists."""
    if component.opt is not None:
        return assemble(component.opt)
    return component.fl_code, None


def build_statement(
    components: list[FormalizedComponent] | tuple[FormalizedComponent, ...],
    name: str = DEFAULT_THEOREM_NAME,
) -> TheoremDraft:
    components = tuple(components)
    conclusion_indices = [
        i for i, c in enumerate(components) if c.nl.role is Role.CONCLUSION
    ]
    if not conclusion_indices:
        raise NoConclusion("statement needs exactly one conclusion component")
    if len(conclusion_indices) > 1:
        raise MultipleConclusions(f"{len(conclusion_indices)} conclusion components")
    conclusion_index = conclusion_indices[0]
    condition_indices = [i for i, c in enumerate(components) if i != conclusion_index]

    parts: list[str] = [HEADER, "theorem ", name]
    pos = len(HEADER) + len("theorem ") + len(name)
    layout: list[ComponentLayout] = []
    span_maps: dict[int, SpanMap] = {}

    def place(index: int, rendered: str, fragment_offset: int, fragment_len: int, smap):
        nonlocal pos
        parts.append(rendered)
        start = pos
        frag_start = start + fragment_offset
        layout.append(
            ComponentLayout(
                component=index,
                interval=Span(start, start + len(rendered)),
                fragment=Span(frag_start, frag_start + fragment_len),
            )
        )
        if smap is not None:
            span_maps[index] = smap.shifted(frag_start)
        else:
            span_maps[index] = SpanMap((((), Span(frag_start, frag_start + fragment_len)),))
        pos += len(rendered)

    for ordinal, index in enumerate(condition_indices, start=1):
        fragment, smap = component_fragment(components[index])
        if is_binder_sequence(fragment):
            rendered = f" {fragment}"
            place(index, rendered, 1, len(fragment), smap)
        else:
            prefix = f" (h{ordinal} : "
            rendered = f"{prefix}{fragment})"
            place(index, rendered, len(prefix), len(fragment), smap)

    parts.append(" : ")
    pos += len(" : ")
    fragment, smap = component_fragment(components[conclusion_index])
    place(conclusion_index, fragment, 0, len(fragment), smap)
    parts.append(" := by sorry")

    return TheoremDraft(
        name=name,
        header=HEADER,
        source="".join(parts),
        layout=tuple(layout),
        span_maps=span_maps,
        components=components,
    )


def locate_offset_in_draft(draft: TheoremDraft, offset: int) -> DraftLocation:
    for entry in draft.layout:
        if entry.interval.contains(offset):
            component = draft.components[entry.component]
            if component.opt is None:
                return DraftLocation(component=entry.component)
            best: NodePath | None = None
            for path, span in draft.span_maps[entry.component].entries:
                if span.contains(offset) and (best is None or len(path) > len(best)):
                    best = path
            # offsets inside the auto-named wrapper carry no node span
            return DraftLocation(component=entry.component, path=best or ())
    return STATEMENT_LOCATION


def locate_in_draft(draft: TheoremDraft, diagnostic: Diagnostic) -> DraftLocation:
    """Map a compiler position to statement plumbing or a component's node."""
    offset = position_to_offset(draft.source, diagnostic.line, diagnostic.column)
    return locate_offset_in_draft(draft, offset)


def write_lean_file(draft_source: str, path) -> None:
    """Emit UTF-8, LF newlines, exactly one trailing newline."""
    text = draft_source.replace("\r\n", "\n").rstrip("\n") + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
