"""Comparison context of a node type and path enumeration within it.

The context of a node type is the schema subgraph made of the type
itself, every type reachable through cardinality-1 paths (its
hierarchical environment) and every edge type incident to it.  Candidate
indicator paths are then enumerated inside this subgraph, traversing
edge types in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import UnknownNodeTypeError
from .graph import Cardinality, EdgeType, GraphType


class Direction(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


@dataclass(frozen=True)
class TypeStep:
    """One traversal step: an edge type taken forward or in reverse."""

    edge_type: str
    direction: Direction


@dataclass(frozen=True)
class TypePath:
    """A schema-level path from an origin node type.

    card_one is True iff every step is traversed from a cardinality-1
    side (forward steps need card_src = 1, reverse steps card_tgt = 1),
    which is what licenses the identity operator on reached properties.
    An empty step sequence is the path of the origin itself.
    """

    origin: str
    steps: tuple[TypeStep, ...]
    terminal: str
    card_one: bool

    @property
    def length(self) -> int:
        return len(self.steps)


def _step_target(et: EdgeType, direction: Direction) -> str:
    return et.tgt if direction is Direction.FORWARD else et.src


def _step_source(et: EdgeType, direction: Direction) -> str:
    return et.src if direction is Direction.FORWARD else et.tgt


def _step_is_card_one(et: EdgeType, direction: Direction) -> bool:
    card = et.card_src if direction is Direction.FORWARD else et.card_tgt
    return card is Cardinality.ONE


def _steps_from(s: GraphType, node_type: str):
    """Deterministic iteration over the steps leaving a node type."""
    for name in sorted(s.edge_types):
        et = s.edge_types[name]
        if et.src == node_type:
            yield TypeStep(name, Direction.FORWARD), et
        if et.tgt == node_type:
            yield TypeStep(name, Direction.REVERSE), et


@dataclass(frozen=True)
class ContextGraph:
    """Schema subgraph constituting one node type's comparison context."""

    root: str
    node_types: frozenset[str]
    edge_types: frozenset[str]
    hier_paths: frozenset[TypePath]
    one_hop: frozenset[TypeStep]
    schema: GraphType

    def __post_init__(self) -> None:
        assert self.root in self.node_types
        on_paths = {st.edge_type for p in self.hier_paths for st in p.steps}
        dangling = self.edge_types - on_paths - {st.edge_type for st in self.one_hop}
        assert not dangling, f"context edge types {sorted(dangling)} unreachable"


def compute_context(s: GraphType, node_type: str) -> ContextGraph:
    """Build the comparison context of a node type.

    Hierarchical paths are all cardinality-1 simple paths from the root
    (no repeated node type; every prefix is itself a path).  One-hop
    steps cover all incident edge types, incoming ones traversed in
    reverse.  Cardinalities must have been computed on the schema first.
    """
    if node_type not in s.node_types:
        raise UnknownNodeTypeError(f"unknown node type {node_type!r}")

    hier: list[TypePath] = []

    def extend(steps: tuple[TypeStep, ...], at: str, seen: frozenset[str]) -> None:
        for step, et in _steps_from(s, at):
            if not _step_is_card_one(et, step.direction):
                continue
            nxt = _step_target(et, step.direction)
            if nxt in seen:
                continue
            path = TypePath(node_type, steps + (step,), nxt, card_one=True)
            hier.append(path)
            extend(path.steps, nxt, seen | {nxt})

    extend((), node_type, frozenset({node_type}))

    one_hop = {step for step, _ in _steps_from(s, node_type)}

    node_types = {node_type}
    edge_types: set[str] = set()
    for p in hier:
        at = node_type
        for st in p.steps:
            et = s.edge_types[st.edge_type]
            at = _step_target(et, st.direction)
            node_types.add(at)
            edge_types.add(st.edge_type)
    for st in one_hop:
        et = s.edge_types[st.edge_type]
        node_types.add(_step_target(et, st.direction))
        edge_types.add(st.edge_type)

    return ContextGraph(
        root=node_type,
        node_types=frozenset(node_types),
        edge_types=frozenset(edge_types),
        hier_paths=frozenset(hier),
        one_hop=frozenset(one_hop),
        schema=s,
    )


def enumerate_indicator_paths(ctx: ContextGraph, max_len: int = 3) -> set[TypePath]:
    """All simple paths of length 1..max_len from the context root.

    Simplicity rule: an edge type may occur at most once per direction on
    a path, which bounds the enumeration even on cyclic schemas.  The
    empty path is always included.  Each path carries its cardinality
    flag.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    s = ctx.schema
    root = ctx.root
    paths: set[TypePath] = {TypePath(root, (), root, card_one=True)}

    def walk(steps: tuple[TypeStep, ...], at: str, used: frozenset[TypeStep], card_one: bool) -> None:
        if len(steps) >= max_len:
            return
        for step, et in _steps_from(s, at):
            if step.edge_type not in ctx.edge_types or step in used:
                continue
            flag = card_one and _step_is_card_one(et, step.direction)
            nxt = _step_target(et, step.direction)
            path = TypePath(root, steps + (step,), nxt, card_one=flag)
            paths.add(path)
            walk(path.steps, nxt, used | {step}, flag)

    walk((), root, frozenset(), True)
    return paths
