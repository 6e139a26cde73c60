"""Candidate indicators, their evaluation and the indicator matrix.

An indicator is a quadruplet (path label, property, node/edge, operator)
describing where in a node's context a numeric descriptor is collected
and how multi-valued traversals are aggregated.  Cardinality-1 paths use
the identity operator; star paths aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .context import ContextGraph, Direction, TypePath
from .errors import GraphCompareError, TypeMismatchError
from .graph import GraphType, PropertyGraph, is_number


class Elem(Enum):
    NODE = "node"
    EDGE = "edge"


class Op(Enum):
    ID = "id"
    SUM = "sum"
    AVG = "avg"
    MIN = "min"
    MAX = "max"
    COUNT = "count"


#: canonical operator order used when sorting candidates
_OP_ORDER = {op: i for i, op in enumerate((Op.ID, Op.SUM, Op.AVG, Op.MIN, Op.MAX, Op.COUNT))}

#: aggregations requiring numeric inputs; COUNT accepts any property kind
NUMERIC_AGGS = frozenset({Op.SUM, Op.AVG, Op.MIN, Op.MAX})

#: default operators for star paths when OpDict has no entry for a property
DEFAULT_NUMERIC_OPS = frozenset({Op.SUM, Op.COUNT})
DEFAULT_NON_NUMERIC_OPS = frozenset({Op.COUNT})

OpDict = dict[str, frozenset[Op]]

_REVERSE_MARK = "~"


@dataclass(frozen=True)
class Indicator:
    """Indicator name: traversal path, property, element side and operator."""

    path: tuple[tuple[str, Direction], ...]  # (edge label, direction) per step
    prop: str
    elem: Elem
    op: Op

    @property
    def path_len(self) -> int:
        return len(self.path)

    @property
    def path_label(self) -> str:
        return ".".join(
            lab + (_REVERSE_MARK if d is Direction.REVERSE else "") for lab, d in self.path
        )

    @property
    def label(self) -> str:
        return f"{self.path_label}|{self.prop}|{self.elem.value}|{self.op.value}"

    @classmethod
    def from_label(cls, label: str) -> Indicator:
        try:
            path_label, prop, elem, op = label.rsplit("|", 3)
        except ValueError as exc:
            raise GraphCompareError(f"bad indicator label {label!r}") from exc
        steps = []
        if path_label:
            for part in path_label.split("."):
                if part.endswith(_REVERSE_MARK):
                    steps.append((part[:-1], Direction.REVERSE))
                else:
                    steps.append((part, Direction.FORWARD))
        return cls(tuple(steps), prop, Elem(elem), Op(op))

    def sort_key(self):
        return (self.path_len, self.path_label, self.prop, self.elem.value, _OP_ORDER[self.op])


def canonical_order(indicators) -> list[Indicator]:
    """Shorter path first, then label, property, element and operator."""
    return sorted(indicators, key=Indicator.sort_key)


def _path_as_labels(s: GraphType, path: TypePath) -> tuple[tuple[str, Direction], ...]:
    return tuple((s.edge_types[st.edge_type].base.label, st.direction) for st in path.steps)


def derive_candidate_indicators(
    ctx: ContextGraph,
    paths: set[TypePath],
    op_dict: OpDict | None = None,
) -> set[Indicator]:
    """Candidate indicators for every path of a context.

    For each path the terminal node type contributes node-side candidates
    and the last edge type edge-side ones.  Cardinality-1 and empty paths
    admit only the identity operator (hence only numeric properties);
    star paths aggregate, with COUNT admitted for non-numeric properties
    and the remaining aggregations restricted to numeric ones.
    """
    op_dict = op_dict or {}
    for prop, ops in op_dict.items():
        if Op.ID in ops:
            raise ValueError(f"OpDict entry for {prop!r} names the identity operator")
    s = ctx.schema
    out: set[Indicator] = set()
    for path in paths:
        labels = _path_as_labels(s, path)
        targets: list[tuple[Elem, dict[str, str]]] = [
            (Elem.NODE, s.node_types[path.terminal].prop_kinds)
        ]
        if path.steps:
            last = s.edge_types[path.steps[-1].edge_type]
            targets.append((Elem.EDGE, last.prop_kinds))
        for elem, kinds in targets:
            for prop, kind in kinds.items():
                numeric = kind == "number"
                if path.card_one:
                    if numeric:
                        out.add(Indicator(labels, prop, elem, Op.ID))
                    continue
                ops = op_dict.get(prop)
                if ops is None:
                    ops = DEFAULT_NUMERIC_OPS if numeric else DEFAULT_NON_NUMERIC_OPS
                for op in ops:
                    if op in NUMERIC_AGGS and not numeric:
                        continue
                    out.add(Indicator(labels, prop, elem, op))
    return out


# ---------------------------------------------------------------------------
# evaluation

def _walk(g: PropertyGraph, node: int, path: tuple[tuple[str, Direction], ...]):
    """Frontier-propagation traversal: reached node set and final edge set."""
    frontier = {node}
    last_edges: set[int] = set()
    for label, direction in path:
        nxt: set[int] = set()
        last_edges = set()
        for u in frontier:
            if direction is Direction.FORWARD:
                for e in g.out_edges(u, label):
                    nxt.add(g.edge_tgt[e])
                    last_edges.add(e)
            else:
                for e in g.in_edges(u, label):
                    nxt.add(g.edge_src[e])
                    last_edges.add(e)
        frontier = nxt
        if not frontier:
            return frontier, set()
    return frontier, last_edges


def evaluate_indicator(
    g: PropertyGraph, s: GraphType, node: int, indicator: Indicator
) -> float | None:
    """Value of one indicator on one instance node, or None.

    None is returned when no element is reachable along the path or when
    every reached element lacks the property (absent or explicit null).
    COUNT counts distinct non-null values; the other aggregations demand
    numeric inputs.
    """
    nodes, edges = _walk(g, node, indicator.path)
    if not nodes:
        return None
    if indicator.elem is Elem.NODE:
        raw = [g.node_props[h].get(indicator.prop) for h in nodes]
    else:
        raw = [g.edge_props[h].get(indicator.prop) for h in edges]
    values = [v for v in raw if v is not None]
    if not values:
        return None

    op = indicator.op
    if op is Op.COUNT:
        return float(len(set(values)))
    for v in values:
        if not is_number(v):
            raise TypeMismatchError(
                f"{indicator.label}: non-numeric value {v!r} under numeric operator"
            )
    if op is Op.ID:
        if len(values) > 1:
            raise GraphCompareError(
                f"{indicator.label}: identity operator on a multi-valued traversal"
            )
        return float(values[0])
    if op is Op.SUM:
        return float(sum(values))
    if op is Op.AVG:
        return float(sum(values) / len(values))
    if op is Op.MIN:
        return float(min(values))
    return float(max(values))


@dataclass
class ColumnMeta:
    scaled: bool = False
    attenuated: bool = False


@dataclass
class IndicatorMatrix:
    """Rows = instance nodes of the target type, columns = indicators.

    Cells are float64 with NaN marking null; once a column is scaled its
    non-null cells lie in (0, 1].
    """

    node_ids: list[str]
    indicators: list[Indicator]
    values: np.ndarray
    meta: list[ColumnMeta] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.meta:
            self.meta = [ColumnMeta() for _ in self.indicators]
        if self.values.shape != (len(self.node_ids), len(self.indicators)):
            raise ValueError(
                f"grid shape {self.values.shape} does not match "
                f"{len(self.node_ids)} rows x {len(self.indicators)} columns"
            )

    @property
    def n_rows(self) -> int:
        return len(self.node_ids)

    @property
    def n_cols(self) -> int:
        return len(self.indicators)

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


def build_indicator_matrix(
    g: PropertyGraph,
    s: GraphType,
    node_type: str,
    indicators: list[Indicator],
) -> IndicatorMatrix:
    """Evaluate every indicator on every instance node of the target type."""
    nt = s.node_types[node_type]
    rows = g.nodes_with_label(nt.base.label)
    values = np.full((len(rows), len(indicators)), np.nan)
    for j, ind in enumerate(indicators):
        for r, h in enumerate(rows):
            v = evaluate_indicator(g, s, h, ind)
            if v is not None:
                values[r, j] = v
    return IndicatorMatrix(
        node_ids=[g.node_ids[h] for h in rows],
        indicators=list(indicators),
        values=values,
    )
