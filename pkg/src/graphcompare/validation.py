"""Turning candidate indicators into a validated, scaled indicator matrix.

Candidates are filtered in a fixed order (density, non-redundancy against
the already-accepted set, discarded properties, acceptable variance),
then percentile-scaled and attenuated by path length.  The lazy mode
evaluates every candidate column before filtering; the eager mode pushes
the property-level checks (density, discarded properties) down into
candidate collection so rejected candidates are never evaluated.  Both
modes accept the same indicators and produce the same matrix.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .context import Direction, compute_context, enumerate_indicator_paths
from .errors import (
    EmptyCollectionError,
    InsufficientOverlapError,
    NoIndicatorsSurviveError,
)
from .graph import GraphType, PropertyGraph
from .indicators import (
    ColumnMeta,
    Elem,
    Indicator,
    IndicatorMatrix,
    Op,
    OpDict,
    canonical_order,
    derive_candidate_indicators,
    evaluate_indicator,
)


class Mode(Enum):
    LAZY = "lazy"
    EAGER = "eager"


@dataclass(frozen=True)
class ValidationConfig:
    """Thresholds controlling indicator validation.

    alpha_ratio/beta_ratio bound the number of distinct non-null values as
    a fraction of the instance count, gamma_ratio is the minimum non-null
    density of the source property, corr_threshold the absolute Pearson
    cutoff for redundancy.
    """

    alpha_ratio: float = 1e-6
    beta_ratio: float = 1.0
    gamma_ratio: float = 0.8
    corr_threshold: float = 0.98
    discard_props: frozenset[str] = frozenset()
    max_len: int = 3
    op_dict: OpDict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha_ratio <= self.beta_ratio <= 1.0):
            raise ValueError("need 0 <= alpha_ratio <= beta_ratio <= 1")
        if not (0.0 <= self.gamma_ratio <= 1.0):
            raise ValueError("need 0 <= gamma_ratio <= 1")
        if not (0.0 < self.corr_threshold <= 1.0):
            raise ValueError("need 0 < corr_threshold <= 1")
        if self.max_len < 1:
            raise ValueError("need max_len >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> ValidationConfig:
        op_dict: OpDict = {}
        for prop, ops in d.get("op_dict", {}).items():
            op_dict[prop] = frozenset(Op(o) for o in ops)
        return cls(
            alpha_ratio=float(d.get("alpha_ratio", 1e-6)),
            beta_ratio=float(d.get("beta_ratio", 1.0)),
            gamma_ratio=float(d.get("gamma_ratio", 0.8)),
            corr_threshold=float(d.get("corr_threshold", 0.98)),
            discard_props=frozenset(d.get("discard_props", ())),
            max_len=int(d.get("max_len", 3)),
            op_dict=op_dict,
        )


class Reason(Enum):
    VARIANCE = "variance"
    DENSITY = "density"
    REDUNDANT = "redundant"
    DISCARDED_PROP = "discarded-prop"


@dataclass(frozen=True)
class TraceEntry:
    indicator: Indicator
    accepted: bool
    reason: Reason | None = None
    detail: str = ""


@dataclass
class ValidationTrace:
    """One outcome per candidate, plus the column-evaluation counter."""

    entries: list[TraceEntry]
    evaluations: int = 0

    def outcome_for(self, indicator: Indicator) -> TraceEntry:
        return self.outcome_for_label(indicator.label)

    def outcome_for_label(self, label: str) -> TraceEntry:
        for e in self.entries:
            if e.indicator.label == label:
                return e
        raise KeyError(label)


# ---------------------------------------------------------------------------
# primitive operations

def percentile_scale(x: float, values) -> float:
    """Fraction of the collection that is <= x; lands in (0, 1] for x in V."""
    values = list(values)
    if not values:
        raise EmptyCollectionError("cannot rank against an empty collection")
    return sum(1 for v in values if v <= x) / len(values)


def attenuation(path_len: int) -> float:
    """Contextualization coefficient 1/(1+k) for a path of k steps."""
    if path_len < 0:
        raise ValueError("path length must be >= 0")
    return 1.0 / (1.0 + path_len)


def pearson(u, v) -> float:
    """Pearson coefficient over rows where both vectors are non-null.

    Returns 0.0 when either side is constant on the overlap; raises
    InsufficientOverlapError when fewer than two rows overlap.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("vectors must have equal length")
    mask = ~np.isnan(u) & ~np.isnan(v)
    if int(mask.sum()) < 2:
        raise InsufficientOverlapError("fewer than two overlapping non-null rows")
    a = u[mask]
    b = v[mask]
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0.0:
        return 0.0
    return float(np.clip((a * b).sum() / denom, -1.0, 1.0))


def scale_column(col: np.ndarray) -> np.ndarray:
    """Percentile-scale the non-null cells of a column (vectorized)."""
    out = np.full(col.shape, np.nan)
    mask = ~np.isnan(col)
    if not mask.any():
        return out
    vals = np.sort(col[mask])
    out[mask] = np.searchsorted(vals, col[mask], side="right") / float(vals.size)
    return out


# ---------------------------------------------------------------------------
# density bookkeeping

class _DensityStats:
    """Non-null density of a property at its source element type."""

    def __init__(self, g: PropertyGraph, s: GraphType, node_type: str) -> None:
        self._g = g
        self._s = s
        self._origin = node_type
        self._cache: dict[tuple[str, str, str], float] = {}

    def _source_type(self, ind: Indicator) -> tuple[str, str]:
        s = self._s
        cur = self._origin
        last_edge = None
        for label, direction in ind.path:
            et = s.edge_type_for_label(label)
            assert et is not None, label
            last_edge = et
            cur = et.tgt if direction is Direction.FORWARD else et.src
        if ind.elem is Elem.EDGE:
            assert last_edge is not None
            return ("edge", last_edge.name)
        return ("node", cur)

    def ratio(self, ind: Indicator) -> float:
        kind, type_name = self._source_type(ind)
        key = (kind, type_name, ind.prop)
        if key not in self._cache:
            g, s = self._g, self._s
            if kind == "node":
                label = s.node_types[type_name].base.label
                handles = g.nodes_with_label(label)
                present = sum(1 for h in handles if g.node_props[h].get(ind.prop) is not None)
            else:
                label = s.edge_types[type_name].base.label
                handles = g.edges_with_label(label)
                present = sum(1 for h in handles if g.edge_props[h].get(ind.prop) is not None)
            self._cache[key] = present / len(handles) if handles else 0.0
        return self._cache[key]


# ---------------------------------------------------------------------------
# the validation pipeline

def validate_indicators(
    g: PropertyGraph,
    s: GraphType,
    node_type: str,
    cfg: ValidationConfig | None = None,
    mode: Mode = Mode.LAZY,
    timings: dict[str, float] | None = None,
) -> tuple[IndicatorMatrix, ValidationTrace]:
    """Derive, filter, scale and attenuate indicators for a node type.

    Returns the validated matrix (rows with any null in an accepted
    column are dropped) and the per-candidate trace.  Raises
    NoIndicatorsSurviveError when nothing is accepted.
    """
    cfg = cfg or ValidationConfig()
    t0 = time.perf_counter()

    ctx = compute_context(s, node_type)
    paths = enumerate_indicator_paths(ctx, cfg.max_len)
    candidates = canonical_order(derive_candidate_indicators(ctx, paths, cfg.op_dict))

    nt = s.node_types[node_type]
    rows = g.nodes_with_label(nt.base.label)
    node_ids = [g.node_ids[h] for h in rows]
    n = len(rows)

    density = _DensityStats(g, s, node_type)
    entries: dict[Indicator, TraceEntry] = {}
    evaluations = 0

    def evaluate_column(ind: Indicator) -> np.ndarray:
        nonlocal evaluations
        evaluations += 1
        col = np.full(n, np.nan)
        for r, h in enumerate(rows):
            v = evaluate_indicator(g, s, h, ind)
            if v is not None:
                col[r] = v
        return col

    columns: dict[Indicator, np.ndarray] = {}
    pending: list[Indicator] = []
    if mode is Mode.LAZY:
        for ind in candidates:
            columns[ind] = evaluate_column(ind)
        pending = list(candidates)
    else:
        for ind in candidates:
            if density.ratio(ind) < cfg.gamma_ratio:
                entries[ind] = TraceEntry(ind, False, Reason.DENSITY)
            elif ind.prop in cfg.discard_props:
                entries[ind] = TraceEntry(ind, False, Reason.DISCARDED_PROP)
            else:
                columns[ind] = evaluate_column(ind)
                pending.append(ind)
    t1 = time.perf_counter()

    accepted: list[tuple[Indicator, np.ndarray]] = []  # (indicator, scaled column)
    for ind in pending:
        if density.ratio(ind) < cfg.gamma_ratio:
            entries[ind] = TraceEntry(ind, False, Reason.DENSITY)
            continue
        raw = columns[ind]
        scaled = scale_column(raw)
        redundant_vs = None
        for prev, prev_scaled in accepted:
            try:
                r = pearson(scaled, prev_scaled)
            except InsufficientOverlapError:
                continue
            if abs(r) > cfg.corr_threshold:
                redundant_vs = prev
                break
        if redundant_vs is not None:
            entries[ind] = TraceEntry(ind, False, Reason.REDUNDANT, f"vs {redundant_vs.label}")
            continue
        if ind.prop in cfg.discard_props:
            entries[ind] = TraceEntry(ind, False, Reason.DISCARDED_PROP)
            continue
        distinct = np.unique(raw[~np.isnan(raw)]).size
        low = max(1.0, cfg.alpha_ratio * n)
        if not (low <= distinct <= cfg.beta_ratio * n):
            entries[ind] = TraceEntry(
                ind, False, Reason.VARIANCE, f"{distinct} distinct of {n}")
            continue
        entries[ind] = TraceEntry(ind, True)
        accepted.append((ind, scaled))

    trace = ValidationTrace(
        entries=[entries[ind] for ind in candidates], evaluations=evaluations)
    if not accepted:
        raise NoIndicatorsSurviveError(
            f"no candidate indicator survived validation for {node_type!r}")

    final = np.column_stack(
        [scaled * attenuation(ind.path_len) for ind, scaled in accepted])
    keep = ~np.isnan(final).any(axis=1)
    matrix = IndicatorMatrix(
        node_ids=[nid for nid, k in zip(node_ids, keep) if k],
        indicators=[ind for ind, _ in accepted],
        values=final[keep],
        meta=[ColumnMeta(scaled=True, attenuated=True) for _ in accepted],
    )
    if timings is not None:
        timings["candidates"] = t1 - t0
        timings["validation"] = time.perf_counter() - t1
    return matrix, trace
