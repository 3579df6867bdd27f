"""Pydantic request/response models for the HTTP service.

These mirror the core dataclasses at the wire boundary; conversion helpers
keep the core free of pydantic.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..decomposer import LogicalComponent, Role
from ..formalizer import FormalizedComponent
from ..opt_tree import OptNode, node_to_payload


class OptNodeModel(BaseModel):
    formal_content: str
    children: list["OptNodeModel"] = Field(default_factory=list)

    def to_node(self) -> OptNode:
        return OptNode(self.formal_content, tuple(child.to_node() for child in self.children))

    @classmethod
    def from_node(cls, node: OptNode) -> "OptNodeModel":
        return cls.model_validate(node_to_payload(node))


OptNodeModel.model_rebuild()


class ComponentModel(BaseModel):
    text: str
    role: str  # Condition | Conclusion
    index: int = 1
    fl_code: str
    opt: OptNodeModel | None = None
    used_fallback: bool | None = None

    def to_component(self) -> FormalizedComponent:
        opt = self.opt.to_node() if self.opt else None
        return FormalizedComponent(
            nl=LogicalComponent(self.text, Role(self.role), self.index),
            fl_code=self.fl_code,
            opt=opt,
            used_fallback=opt is None,
        )

    @classmethod
    def from_component(cls, component: FormalizedComponent) -> "ComponentModel":
        return cls(
            text=component.nl.text,
            role=component.nl.role.value,
            index=component.nl.index,
            fl_code=component.fl_code,
            opt=OptNodeModel.from_node(component.opt) if component.opt else None,
            used_fallback=component.used_fallback,
        )


class ClientSetup(BaseModel):
    """Config payload plus an optional inline cassette."""

    config: dict = Field(default_factory=dict)
    cassette: list[dict] | None = None


class ParseOptRequest(BaseModel):
    json_text: str


class TreeRequest(BaseModel):
    tree: OptNodeModel


class LocateRequest(BaseModel):
    tree: OptNodeModel
    offset: int


class DecomposeRequest(ClientSetup):
    nl_statement: str


class FormalizeRequest(ClientSetup):
    text: str
    role: str = "Condition"
    index: int = 1


class BuildStatementRequest(BaseModel):
    components: list[ComponentModel]
    name: str = "test"


class RepairRequest(ClientSetup):
    nl_statement: str
    components: list[ComponentModel]
    name: str = "test"


class PipelineRequest(ClientSetup):
    items: list[dict]


class StratifyRequest(BaseModel):
    triples: list[dict]
    cut_percentiles: tuple[float, float] = (0.51, 0.90)
    extreme_fraction: float = 0.01


class MixRequest(BaseModel):
    triples: list[dict]
    phase: int
    total: int
    seed: int = 0
    emit_pairs: bool = True
