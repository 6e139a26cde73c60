"""In-memory property graph, schema inference and relationship cardinalities.

A property graph holds labelled nodes and edges, each carrying a map of
property values (numbers, text, booleans or explicit nulls).  The schema
(graph type) of a graph is inferred by collapsing same-labelled elements
into one type whose property set is the union of the observed property
names.  Relationship cardinalities are computed per edge type by counting
incident instance edges on each endpoint.

Graphs and graph types are immutable after construction and safe for
concurrent reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, BinaryIO, Iterable, Union

from .errors import (
    DanglingEdgeError,
    DuplicateIdError,
    GraphCompareError,
    InvalidInstanceError,
    LabelHeterogeneityError,
    ParseError,
)

# A property value: double-precision number, text, boolean or explicit null.
# Null is distinct from absent (a property may be missing from the map).
Value = Union[float, int, str, bool, None]

#: Observed value kinds per (type, property).  A property is usable for
#: numeric aggregation only if every non-null observed value is a number.
KIND_NUMBER = "number"
KIND_TEXT = "text"
KIND_BOOL = "bool"
KIND_MIXED = "mixed"
KIND_NULL = "null"


def value_kind(v: Value) -> str | None:
    """Classify a single property value; None for explicit nulls."""
    if v is None:
        return None
    if isinstance(v, bool):  # bool before int: bools are not numbers here
        return KIND_BOOL
    if isinstance(v, (int, float)):
        return KIND_NUMBER
    return KIND_TEXT


def is_number(v: Value) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class Cardinality(Enum):
    ONE = "1"
    MANY = "*"


class GraphFileFormat(Enum):
    JSON = "json"
    JSONL = "jsonl"


@dataclass(frozen=True)
class FormalBaseType:
    """A label together with a deduplicated set of property names."""

    label: str
    props: frozenset[str]


@dataclass(frozen=True)
class NodeType:
    name: str
    base: FormalBaseType
    #: per property: observed value kind over all instances
    prop_kinds: dict[str, str] = field(default_factory=dict, compare=True)

    def is_numeric(self, prop: str) -> bool:
        return self.prop_kinds.get(prop) == KIND_NUMBER


@dataclass(frozen=True)
class EdgeType:
    name: str
    base: FormalBaseType
    src: str
    tgt: str
    card_src: Cardinality = Cardinality.ONE
    card_tgt: Cardinality = Cardinality.ONE
    prop_kinds: dict[str, str] = field(default_factory=dict, compare=True)

    def is_numeric(self, prop: str) -> bool:
        return self.prop_kinds.get(prop) == KIND_NUMBER


@dataclass(frozen=True)
class GraphType:
    """Inferred schema: node/edge types with endpoint map and cardinalities.

    Node and edge type name spaces are disjoint, every edge type's
    endpoints name declared node types, and there is at most one type per
    distinct label on each side.
    """

    node_types: dict[str, NodeType]
    edge_types: dict[str, EdgeType]

    def __post_init__(self) -> None:
        overlap = set(self.node_types) & set(self.edge_types)
        if overlap:
            raise GraphCompareError(f"node/edge type name collision: {sorted(overlap)}")
        for et in self.edge_types.values():
            if et.src not in self.node_types or et.tgt not in self.node_types:
                raise GraphCompareError(
                    f"edge type {et.name!r} references undeclared endpoint types"
                )
        for types in (self.node_types, self.edge_types):
            seen: dict[str, str] = {}
            for t in types.values():
                if t.base.label in seen:
                    raise GraphCompareError(
                        f"two types ({seen[t.base.label]!r}, {t.name!r}) share label {t.base.label!r}"
                    )
                seen[t.base.label] = t.name

    def node_type_for_label(self, label: str) -> NodeType | None:
        for nt in self.node_types.values():
            if nt.base.label == label:
                return nt
        return None

    def edge_type_for_label(self, label: str) -> EdgeType | None:
        for et in self.edge_types.values():
            if et.base.label == label:
                return et
        return None


class ValidityKind(Enum):
    NO_NODE_TYPE = "no-node-type"
    NODE_PROPS_NOT_CONTAINED = "node-props-not-contained"
    NO_EDGE_TYPE = "no-edge-type"
    EDGE_PROPS_NOT_CONTAINED = "edge-props-not-contained"
    EDGE_ENDPOINT_MISMATCH = "edge-endpoint-mismatch"


@dataclass(frozen=True)
class Violation:
    kind: ValidityKind
    element_id: str
    detail: str


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class PropertyGraph:
    """Immutable instance-level graph.

    External node/edge ids are arbitrary strings; internally elements are
    addressed by dense integer handles so pairwise loops stay cache
    friendly.  Multiple edges with the same label between the same node
    pair are distinct instances (a multigraph).
    """

    __slots__ = (
        "node_ids", "node_labels", "node_props",
        "edge_ids", "edge_labels", "edge_src", "edge_tgt", "edge_props",
        "_node_index", "_edge_index", "_out_by_label", "_in_by_label",
    )

    def __init__(
        self,
        nodes: Iterable[tuple[str, str, dict[str, Value]]],
        edges: Iterable[tuple[str, str, str, str, dict[str, Value]]],
    ) -> None:
        self.node_ids: list[str] = []
        self.node_labels: list[str] = []
        self.node_props: list[dict[str, Value]] = []
        self._node_index: dict[str, int] = {}
        for nid, label, props in nodes:
            if nid in self._node_index:
                raise DuplicateIdError(f"duplicate node id {nid!r}")
            self._node_index[nid] = len(self.node_ids)
            self.node_ids.append(nid)
            self.node_labels.append(label)
            self.node_props.append(dict(props))

        self.edge_ids: list[str] = []
        self.edge_labels: list[str] = []
        self.edge_src: list[int] = []
        self.edge_tgt: list[int] = []
        self.edge_props: list[dict[str, Value]] = []
        self._edge_index: dict[str, int] = {}
        endpoint_labels: dict[str, tuple[str, str]] = {}
        for eid, label, src, tgt, props in edges:
            if eid in self._edge_index or eid in self._node_index:
                raise DuplicateIdError(f"duplicate id {eid!r}")
            if src not in self._node_index:
                raise DanglingEdgeError(f"edge {eid!r}: unknown source node {src!r}")
            if tgt not in self._node_index:
                raise DanglingEdgeError(f"edge {eid!r}: unknown target node {tgt!r}")
            s, t = self._node_index[src], self._node_index[tgt]
            pair = (self.node_labels[s], self.node_labels[t])
            prev = endpoint_labels.setdefault(label, pair)
            if prev != pair:
                raise LabelHeterogeneityError(
                    f"edges labelled {label!r} connect both {prev} and {pair}"
                )
            self._edge_index[eid] = len(self.edge_ids)
            self.edge_ids.append(eid)
            self.edge_labels.append(label)
            self.edge_src.append(s)
            self.edge_tgt.append(t)
            self.edge_props.append(dict(props))

        self._out_by_label: dict[str, dict[int, list[int]]] | None = None
        self._in_by_label: dict[str, dict[int, list[int]]] | None = None

    # -- basic access ---------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def num_edges(self) -> int:
        return len(self.edge_ids)

    def node_handle(self, node_id: str) -> int:
        return self._node_index[node_id]

    def nodes_with_label(self, label: str) -> list[int]:
        return [h for h, lab in enumerate(self.node_labels) if lab == label]

    def edges_with_label(self, label: str) -> list[int]:
        return [h for h, lab in enumerate(self.edge_labels) if lab == label]

    def _adjacency(self) -> tuple[dict[str, dict[int, list[int]]], dict[str, dict[int, list[int]]]]:
        if self._out_by_label is None:
            out: dict[str, dict[int, list[int]]] = {}
            inc: dict[str, dict[int, list[int]]] = {}
            for e, label in enumerate(self.edge_labels):
                out.setdefault(label, {}).setdefault(self.edge_src[e], []).append(e)
                inc.setdefault(label, {}).setdefault(self.edge_tgt[e], []).append(e)
            self._out_by_label = out
            self._in_by_label = inc
        return self._out_by_label, self._in_by_label  # type: ignore[return-value]

    def out_edges(self, node: int, label: str) -> list[int]:
        """Handles of outgoing edges with the given label."""
        out, _ = self._adjacency()
        return out.get(label, {}).get(node, [])

    def in_edges(self, node: int, label: str) -> list[int]:
        """Handles of incoming edges with the given label."""
        _, inc = self._adjacency()
        return inc.get(label, {}).get(node, [])


# ---------------------------------------------------------------------------
# loading

def _records_from_json(doc: Any) -> tuple[list, list]:
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    version = doc.get("version")
    if version is not None and version != 1:
        from .errors import VersionMismatchError

        raise VersionMismatchError(f"unsupported graph file version {version!r}")
    nodes, edges = [], []
    for rec in doc.get("nodes", []):
        try:
            nodes.append((rec["id"], rec["label"], rec.get("props", {})))
        except (TypeError, KeyError) as exc:
            raise ParseError(f"malformed node record: {rec!r}") from exc
    for rec in doc.get("edges", []):
        try:
            edges.append((rec["id"], rec["label"], rec["src"], rec["tgt"], rec.get("props", {})))
        except (TypeError, KeyError) as exc:
            raise ParseError(f"malformed edge record: {rec!r}") from exc
    return nodes, edges


def _records_from_jsonl(text: str) -> tuple[list, list]:
    nodes, edges = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        kind = rec.get("kind") if isinstance(rec, dict) else None
        if kind == "header":
            version = rec.get("version")
            if version is not None and version != 1:
                from .errors import VersionMismatchError

                raise VersionMismatchError(f"unsupported graph file version {version!r}")
        elif kind == "node":
            try:
                nodes.append((rec["id"], rec["label"], rec.get("props", {})))
            except KeyError as exc:
                raise ParseError(f"line {lineno}: malformed node record") from exc
        elif kind == "edge":
            try:
                edges.append((rec["id"], rec["label"], rec["src"], rec["tgt"], rec.get("props", {})))
            except KeyError as exc:
                raise ParseError(f"line {lineno}: malformed edge record") from exc
        else:
            raise ParseError(f"line {lineno}: missing or unknown 'kind' field")
    return nodes, edges


def load_graph(
    source: Union[str, bytes, BinaryIO],
    fmt: GraphFileFormat = GraphFileFormat.JSON,
) -> PropertyGraph:
    """Parse a graph document (see the file format notes in the README).

    Raises ParseError on malformed input and the relevant
    GraphInvariantError subclass when the parsed records violate a graph
    invariant (dangling edge, duplicate id, heterogeneous edge labels).
    """
    if hasattr(source, "read"):
        data = source.read()  # type: ignore[union-attr]
    else:
        data = source
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8") from exc
    else:
        text = data

    if fmt is GraphFileFormat.JSON:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
        nodes, edges = _records_from_json(doc)
    else:
        nodes, edges = _records_from_jsonl(text)
    return PropertyGraph(nodes, edges)


def load_graph_file(path: str) -> PropertyGraph:
    """Load a graph from disk, picking the format from the extension."""
    fmt = GraphFileFormat.JSONL if str(path).endswith(".jsonl") else GraphFileFormat.JSON
    with open(path, "rb") as fh:
        return load_graph(fh, fmt)


# ---------------------------------------------------------------------------
# schema inference

def _merge_kind(current: str | None, v: Value) -> str | None:
    k = value_kind(v)
    if k is None:
        return current if current is not None else KIND_NULL
    if current is None or current == KIND_NULL:
        return k
    if current == k:
        return current
    return KIND_MIXED


def infer_graph_type(g: PropertyGraph) -> GraphType:
    """One node/edge type per distinct label, props = union over instances.

    Cardinalities are left at the ONE placeholder until
    compute_cardinalities runs.  The input graph is always a valid
    instance of the returned type.
    """
    node_props: dict[str, set[str]] = {}
    node_kinds: dict[str, dict[str, str | None]] = {}
    for h, label in enumerate(g.node_labels):
        props = node_props.setdefault(label, set())
        kinds = node_kinds.setdefault(label, {})
        for p, v in g.node_props[h].items():
            props.add(p)
            kinds[p] = _merge_kind(kinds.get(p), v)

    edge_props: dict[str, set[str]] = {}
    edge_kinds: dict[str, dict[str, str | None]] = {}
    edge_endpoints: dict[str, tuple[str, str]] = {}
    for e, label in enumerate(g.edge_labels):
        props = edge_props.setdefault(label, set())
        kinds = edge_kinds.setdefault(label, {})
        for p, v in g.edge_props[e].items():
            props.add(p)
            kinds[p] = _merge_kind(kinds.get(p), v)
        edge_endpoints[label] = (g.node_labels[g.edge_src[e]], g.node_labels[g.edge_tgt[e]])

    node_types = {
        label: NodeType(
            name=label,
            base=FormalBaseType(label, frozenset(props)),
            prop_kinds={p: k for p, k in node_kinds[label].items() if k is not None},
        )
        for label, props in sorted(node_props.items())
    }
    edge_types = {}
    for label, props in sorted(edge_props.items()):
        # type names share one namespace; suffix on the rare node/edge clash
        name = label if label not in node_types else f"{label}_EDGE"
        src_label, tgt_label = edge_endpoints[label]
        edge_types[name] = EdgeType(
            name=name,
            base=FormalBaseType(label, frozenset(props)),
            src=src_label,
            tgt=tgt_label,
            prop_kinds={p: k for p, k in edge_kinds[label].items() if k is not None},
        )
    return GraphType(node_types=node_types, edge_types=edge_types)


# ---------------------------------------------------------------------------
# instance checking

def check_instance(g: PropertyGraph, s: GraphType) -> ValidityReport:
    """List every violation of g against schema s; empty report iff valid."""
    violations: list[Violation] = []
    node_ok: list[bool] = []
    for h, label in enumerate(g.node_labels):
        nt = s.node_type_for_label(label)
        if nt is None:
            violations.append(Violation(
                ValidityKind.NO_NODE_TYPE, g.node_ids[h],
                f"no node type with label {label!r}"))
            node_ok.append(False)
            continue
        extra = set(g.node_props[h]) - nt.base.props
        if extra:
            violations.append(Violation(
                ValidityKind.NODE_PROPS_NOT_CONTAINED, g.node_ids[h],
                f"properties {sorted(extra)} not in type {nt.name!r}"))
            node_ok.append(False)
        else:
            node_ok.append(True)

    for e, label in enumerate(g.edge_labels):
        et = s.edge_type_for_label(label)
        if et is None:
            violations.append(Violation(
                ValidityKind.NO_EDGE_TYPE, g.edge_ids[e],
                f"no edge type with label {label!r}"))
            continue
        extra = set(g.edge_props[e]) - et.base.props
        if extra:
            violations.append(Violation(
                ValidityKind.EDGE_PROPS_NOT_CONTAINED, g.edge_ids[e],
                f"properties {sorted(extra)} not in type {et.name!r}"))
            continue
        src_t = s.node_types[et.src]
        tgt_t = s.node_types[et.tgt]
        s_h, t_h = g.edge_src[e], g.edge_tgt[e]
        src_valid = node_ok[s_h] and g.node_labels[s_h] == src_t.base.label
        tgt_valid = node_ok[t_h] and g.node_labels[t_h] == tgt_t.base.label
        if not (src_valid and tgt_valid):
            violations.append(Violation(
                ValidityKind.EDGE_ENDPOINT_MISMATCH, g.edge_ids[e],
                f"endpoints of {label!r} do not match ({et.src!r} -> {et.tgt!r})"))
    return ValidityReport(tuple(violations))


# ---------------------------------------------------------------------------
# cardinalities

def compute_cardinalities(g: PropertyGraph, s: GraphType) -> GraphType:
    """Fill per-edge-type endpoint cardinalities from the instance graph.

    An edge type has source cardinality MANY iff some instance node of its
    source type carries more than one outgoing instance edge of that type;
    target cardinality is symmetric over incoming edges.  Everything else
    in the schema is returned unchanged.
    """
    report = check_instance(g, s)
    if not report.ok:
        raise InvalidInstanceError(
            f"graph is not an instance of the schema ({len(report.violations)} violations)"
        )
    new_edge_types = {}
    for name, et in s.edge_types.items():
        out_counts: dict[int, int] = {}
        in_counts: dict[int, int] = {}
        for e in g.edges_with_label(et.base.label):
            out_counts[g.edge_src[e]] = out_counts.get(g.edge_src[e], 0) + 1
            in_counts[g.edge_tgt[e]] = in_counts.get(g.edge_tgt[e], 0) + 1
        card_src = Cardinality.MANY if any(c > 1 for c in out_counts.values()) else Cardinality.ONE
        card_tgt = Cardinality.MANY if any(c > 1 for c in in_counts.values()) else Cardinality.ONE
        new_edge_types[name] = EdgeType(
            name=et.name, base=et.base, src=et.src, tgt=et.tgt,
            card_src=card_src, card_tgt=card_tgt, prop_kinds=dict(et.prop_kinds),
        )
    return GraphType(node_types=dict(s.node_types), edge_types=new_edge_types)
