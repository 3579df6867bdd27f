"""Operator trees for formal-language fragments.

A tree node holds a piece of formal text in which each occurrence of the
literal marker ``<SLOT>`` stands for one child, in order. Assembling a tree
substitutes children into their slots recursively, producing the linear code
together with a span map from node paths to character intervals. The span
map is what lets compiler positions be traced back to the node that produced
the offending text.

Offsets everywhere are Unicode scalar-value offsets (Python string indices),
not bytes: Lean sources are full of non-ASCII math symbols. Parenthesis
wrappers are ordinary nodes and are never elided, so the concatenation of
leaf texts always reproduces the assembled code exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    InvalidArity,
    InvalidPath,
    MalformedJson,
    OffsetOutOfRange,
    PositionOutOfRange,
    SchemaViolation,
)

SLOT = "<SLOT>"

NodePath = tuple[int, ...]


@dataclass(frozen=True)
class OptNode:
    """One tree node: formal text with slot markers plus ordered children.

    Construction does not validate, so that tests and the failsafe path can
    build deliberately broken trees; :func:`validate` and :func:`parse_opt`
    enforce the arity rule.
    """

    formal_content: str
    children: tuple["OptNode", ...] = ()

    @property
    def slot_count(self) -> int:
        return self.formal_content.count(SLOT)

    @property
    def is_leaf(self) -> bool:
        return self.slot_count == 0 and not self.children


def leaf(text: str) -> OptNode:
    return OptNode(text)


@dataclass(frozen=True)
class Span:
    """Half-open character interval [start, end)."""

    start: int
    end: int

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end

    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class SpanMap:
    """Node paths mapped to their intervals in the assembled text, pre-order."""

    entries: tuple[tuple[NodePath, Span], ...]

    def span_of(self, path: NodePath) -> Span:
        for entry_path, span in self.entries:
            if entry_path == path:
                return span
        raise InvalidPath(f"no span recorded for path {list(path)}")

    def root_span(self) -> Span:
        return self.entries[0][1]

    def shifted(self, delta: int) -> "SpanMap":
        return SpanMap(
            tuple((path, Span(span.start + delta, span.end + delta)) for path, span in self.entries)
        )


@dataclass(frozen=True)
class TreeMetrics:
    depth: int
    width: int
    node_count: int


def validate(node: OptNode, path: NodePath = ()) -> None:
    """Check the arity rule and non-empty content on every node."""
    if not isinstance(node.formal_content, str):
        raise SchemaViolation(f"ill-typed formal_content at path {list(path)}")
    if node.slot_count != len(node.children):
        raise InvalidArity(path)
    if not node.formal_content:
        raise SchemaViolation(f"empty formal_content at path {list(path)}")
    for i, child in enumerate(node.children):
        validate(child, path + (i,))


def parse_opt(json_text: str) -> OptNode:
    """Parse the JSON tree payload and validate it."""
    try:
        payload = json.loads(json_text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedJson(str(exc)) from exc
    node = _node_from_payload(payload, ())
    validate(node)
    return node


def node_from_payload(payload: object) -> OptNode:
    """Build and validate a tree from an already-decoded payload."""
    node = _node_from_payload(payload, ())
    validate(node)
    return node


def _node_from_payload(payload: object, path: NodePath) -> OptNode:
    if not isinstance(payload, dict):
        raise SchemaViolation(f"node at path {list(path)} is not an object")
    content = payload.get("formal_content")
    if not isinstance(content, str):
        raise SchemaViolation(f"missing or ill-typed formal_content at path {list(path)}")
    raw_children = payload.get("children", [])
    if not isinstance(raw_children, list):
        raise SchemaViolation(f"ill-typed children at path {list(path)}")
    children = tuple(
        _node_from_payload(child, path + (i,)) for i, child in enumerate(raw_children)
    )
    return OptNode(content, children)


def node_to_payload(node: OptNode) -> dict:
    payload: dict = {"formal_content": node.formal_content}
    if node.children:
        payload["children"] = [node_to_payload(child) for child in node.children]
    return payload


def serialize_opt(node: OptNode) -> str:
    """Canonical serialization: formal_content first, children omitted on leaves."""
    return json.dumps(node_to_payload(node), ensure_ascii=False)


def assemble(node: OptNode) -> tuple[str, SpanMap]:
    """Substitute children into slots recursively.

    Returns the linear text and a span map holding every node's interval.
    """
    entries: list[tuple[NodePath, Span] | None] = []
    text = _assemble_walk(node, (), 0, entries)
    return text, SpanMap(tuple(entries))  # type: ignore[arg-type]


def _assemble_walk(
    node: OptNode,
    path: NodePath,
    start: int,
    entries: list,
) -> str:
    segments = node.formal_content.split(SLOT)
    if len(segments) - 1 != len(node.children):
        raise InvalidArity(path)
    slot_index = len(entries)
    entries.append(None)  # reserve pre-order position; filled once length is known
    pos = start
    parts: list[str] = []
    for i, segment in enumerate(segments):
        parts.append(segment)
        pos += len(segment)
        if i < len(node.children):
            child_text = _assemble_walk(node.children[i], path + (i,), pos, entries)
            parts.append(child_text)
            pos += len(child_text)
    entries[slot_index] = (path, Span(start, pos))
    return "".join(parts)


def metrics(node: OptNode) -> TreeMetrics:
    """Depth (root alone = 1), width (max nodes on one level), node count."""
    level = [node]
    depth = 0
    width = 0
    count = 0
    while level:
        depth += 1
        width = max(width, len(level))
        count += len(level)
        level = [child for parent in level for child in parent.children]
    return TreeMetrics(depth=depth, width=width, node_count=count)


def locate(span_map: SpanMap, offset: int) -> NodePath:
    """Path of the deepest node whose span contains the offset."""
    root = span_map.root_span()
    if not (root.start <= offset < root.end):
        raise OffsetOutOfRange(f"offset {offset} outside [{root.start}, {root.end})")
    best: NodePath | None = None
    for path, span in span_map.entries:
        if span.contains(offset) and (best is None or len(path) > len(best)):
            best = path
    if best is None:
        raise OffsetOutOfRange(f"offset {offset} not covered by any span")
    return best


def subtree_at(node: OptNode, path: NodePath) -> OptNode:
    current = node
    for step, index in enumerate(path):
        if not (0 <= index < len(current.children)):
            raise InvalidPath(f"no child {index} at path {list(path[:step])}")
        current = current.children[index]
    return current


def replace_subtree(node: OptNode, path: NodePath, replacement: OptNode | str) -> OptNode:
    """Return a new tree with the subtree at ``path`` swapped out.

    Raw text becomes a leaf node; the original tree is untouched.
    """
    new_node = leaf(replacement) if isinstance(replacement, str) else replacement
    if not path:
        return new_node
    index = path[0]
    if not (0 <= index < len(node.children)):
        raise InvalidPath(f"no child {index} at path []")
    children = list(node.children)
    children[index] = replace_subtree(children[index], path[1:], new_node)
    return OptNode(node.formal_content, tuple(children))


def position_to_offset(text: str, line: int, column: int) -> int:
    """Offset of the character at 1-based ``line`` / 0-based ``column``."""
    lines = text.split("\n")
    if line < 1 or line > len(lines):
        raise PositionOutOfRange(f"line {line} outside 1..{len(lines)}")
    line_text = lines[line - 1]
    last_line = line == len(lines)
    # column == len(line_text) addresses the newline itself on non-final lines
    limit = len(line_text) - 1 if last_line else len(line_text)
    if column < 0 or column > limit:
        raise PositionOutOfRange(f"column {column} outside line {line}")
    return sum(len(lines[i]) + 1 for i in range(line - 1)) + column


def offset_to_position(text: str, offset: int) -> tuple[int, int]:
    """Inverse of :func:`position_to_offset`, for building diagnostics."""
    if offset < 0 or offset >= len(text):
        raise OffsetOutOfRange(f"offset {offset} outside [0, {len(text)})")
    line = text.count("\n", 0, offset) + 1
    line_start = text.rfind("\n", 0, offset) + 1
    return line, offset - line_start
