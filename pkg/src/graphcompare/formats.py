"""Stable on-disk formats and converters.

Every file carries a format name and a version.  JSON documents put them
in top-level keys; CSV files in a leading comment line.  Writers are
deterministic: object keys are sorted and floats use shortest-round-trip
decimals, so reading back a written file reproduces the original values
bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from typing import Any

import numpy as np

from .errors import InconsistentSpecError, ParseError, VersionMismatchError
from .graph import PropertyGraph
from .indicators import ColumnMeta, Indicator, IndicatorMatrix
from .insights import ClusterInsights, Insight, InsightResult
from .objective import Clustering, ThreePartition
from .validation import Reason, TraceEntry, ValidationTrace

FORMAT_VERSION = 1


def fixture_path(name: str):
    """Path of a bundled fixture file (mini_airports.json, iris.csv, ...)."""
    return resources.files("graphcompare") / "fixtures" / name


def _check_version(doc: dict, expected_format: str) -> None:
    version = doc.get("version")
    if version is not None and version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported {expected_format} version {version!r}")
    fmt = doc.get("format")
    if fmt is not None and fmt != expected_format:
        raise VersionMismatchError(f"expected a {expected_format} file, got {fmt!r}")


def _dump_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# property graph

def graph_to_dict(g: PropertyGraph) -> dict:
    return {
        "format": "property-graph",
        "version": FORMAT_VERSION,
        "nodes": [
            {"id": g.node_ids[h], "label": g.node_labels[h], "props": g.node_props[h]}
            for h in range(g.num_nodes)
        ],
        "edges": [
            {
                "id": g.edge_ids[e],
                "label": g.edge_labels[e],
                "src": g.node_ids[g.edge_src[e]],
                "tgt": g.node_ids[g.edge_tgt[e]],
                "props": g.edge_props[e],
            }
            for e in range(g.num_edges)
        ],
    }


def write_graph_json(g: PropertyGraph, path) -> None:
    _dump_json(graph_to_dict(g), path)


def schema_to_dict(s) -> dict:
    return {
        "format": "graph-schema",
        "version": FORMAT_VERSION,
        "node_types": [
            {
                "name": nt.name,
                "label": nt.base.label,
                "props": sorted(nt.base.props),
                "prop_kinds": dict(sorted(nt.prop_kinds.items())),
            }
            for nt in s.node_types.values()
        ],
        "edge_types": [
            {
                "name": et.name,
                "label": et.base.label,
                "src": et.src,
                "tgt": et.tgt,
                "card_src": et.card_src.value,
                "card_tgt": et.card_tgt.value,
                "props": sorted(et.base.props),
                "prop_kinds": dict(sorted(et.prop_kinds.items())),
            }
            for et in s.edge_types.values()
        ],
    }


def write_schema_json(s, path) -> None:
    _dump_json(schema_to_dict(s), path)


# ---------------------------------------------------------------------------
# indicator matrix CSV

_META_CODES = {(False, False): "n", (True, False): "s", (False, True): "a", (True, True): "sa"}
_META_DECODE = {v: k for k, v in _META_CODES.items()}


def _format_cell(x: float) -> str:
    if np.isnan(x):
        return ""
    return repr(float(x))


def write_matrix_csv(matrix: IndicatorMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        meta = ",".join(_META_CODES[(m.scaled, m.attenuated)] for m in matrix.meta)
        fh.write(f"# format=indicator-matrix version={FORMAT_VERSION} meta={meta}\n")
        writer = csv.writer(fh)
        writer.writerow(["node_id"] + [ind.label for ind in matrix.indicators])
        for r, nid in enumerate(matrix.node_ids):
            writer.writerow([nid] + [_format_cell(x) for x in matrix.values[r]])


def read_matrix_csv(path) -> IndicatorMatrix:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.splitlines()
    meta_codes: list[str] | None = None
    if lines and lines[0].startswith("#"):
        header_comment = lines.pop(0)
        fields = dict(
            part.split("=", 1) for part in header_comment.lstrip("# ").split() if "=" in part)
        if fields.get("format") not in (None, "indicator-matrix"):
            raise VersionMismatchError(f"not an indicator-matrix file: {fields.get('format')!r}")
        if fields.get("version") not in (None, str(FORMAT_VERSION)):
            raise VersionMismatchError(f"unsupported matrix version {fields.get('version')!r}")
        if "meta" in fields and fields["meta"]:
            meta_codes = fields["meta"].split(",")
    reader = csv.reader(io.StringIO("\n".join(lines)))
    try:
        header = next(reader)
    except StopIteration as exc:
        raise ParseError("empty matrix file") from exc
    if not header or header[0] != "node_id":
        raise ParseError("matrix header must start with node_id")
    indicators = [Indicator.from_label(lab) for lab in header[1:]]
    node_ids = []
    rows = []
    for rec in reader:
        if not rec:
            continue
        if len(rec) != len(header):
            raise ParseError(f"row for {rec[0]!r} has {len(rec)} fields, want {len(header)}")
        node_ids.append(rec[0])
        rows.append([float(cell) if cell != "" else np.nan for cell in rec[1:]])
    values = np.array(rows, dtype=float).reshape(len(node_ids), len(indicators))
    if meta_codes is None:
        meta = [ColumnMeta() for _ in indicators]
    else:
        if len(meta_codes) != len(indicators):
            raise ParseError("matrix meta does not match the column count")
        meta = [ColumnMeta(*_META_DECODE[c]) for c in meta_codes]
    return IndicatorMatrix(node_ids=node_ids, indicators=indicators, values=values, meta=meta)


# ---------------------------------------------------------------------------
# validation trace CSV

def write_trace_csv(trace: ValidationTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# format=validation-trace version={FORMAT_VERSION} "
            f"evaluations={trace.evaluations}\n")
        writer = csv.writer(fh)
        writer.writerow(["indicator_label", "outcome", "reason", "detail"])
        for e in trace.entries:
            writer.writerow([
                e.indicator.label,
                "accepted" if e.accepted else "rejected",
                e.reason.value if e.reason else "",
                e.detail,
            ])


def read_trace_csv(path) -> ValidationTrace:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.splitlines()
    evaluations = 0
    if lines and lines[0].startswith("#"):
        fields = dict(
            part.split("=", 1) for part in lines.pop(0).lstrip("# ").split() if "=" in part)
        if fields.get("version") not in (None, str(FORMAT_VERSION)):
            raise VersionMismatchError(f"unsupported trace version {fields.get('version')!r}")
        evaluations = int(fields.get("evaluations", 0))
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = next(reader, None)
    if header != ["indicator_label", "outcome", "reason", "detail"]:
        raise ParseError("unexpected validation-trace header")
    entries = []
    for rec in reader:
        if not rec:
            continue
        label, outcome, reason, detail = rec
        entries.append(TraceEntry(
            indicator=Indicator.from_label(label),
            accepted=outcome == "accepted",
            reason=Reason(reason) if reason else None,
            detail=detail,
        ))
    return ValidationTrace(entries=entries, evaluations=evaluations)


# ---------------------------------------------------------------------------
# insight report JSON

def insight_report_to_dict(result: InsightResult, k: int | None = None) -> dict:
    labels = result.indicator_labels
    doc = {
        "format": "insight-report",
        "version": FORMAT_VERSION,
        "indicators": list(labels),
        "partition": {
            "compare": [labels[i] for i in sorted(result.partition.compare)],
            "group": [labels[i] for i in sorted(result.partition.group)],
            "unused": [labels[i] for i in sorted(result.partition.unused)],
        },
        "clusters": [
            {
                "medoid": c.medoid,
                "members": list(c.members),
                "insights": [
                    {
                        "a": i.node_a,
                        "b": i.node_b,
                        "significance": i.significance,
                        "values": {lab: list(pair) for lab, pair in sorted(i.values.items())},
                    }
                    for i in c.insights
                ],
            }
            for c in result.clusters
        ],
        "score": result.score,
        "strategy": result.strategy,
        "seed": result.seed,
        "k": k if k is not None else result.clustering.k,
    }
    if result.restart_scores is not None:
        doc["restart_scores"] = list(result.restart_scores)
    return doc


def insight_result_from_dict(doc: dict) -> InsightResult:
    _check_version(doc, "insight-report")
    labels = list(doc["indicators"])
    index_of = {lab: i for i, lab in enumerate(labels)}
    partition = ThreePartition(
        compare=frozenset(index_of[lab] for lab in doc["partition"]["compare"]),
        group=frozenset(index_of[lab] for lab in doc["partition"]["group"]),
        unused=frozenset(index_of[lab] for lab in doc["partition"]["unused"]),
    )
    member_rows: dict[str, int] = {}
    for c in doc["clusters"]:
        for m in c["members"]:
            member_rows[m] = len(member_rows)
    assignment = np.zeros(len(member_rows), dtype=np.int64)
    medoids = []
    clusters = []
    for ci, c in enumerate(doc["clusters"]):
        for m in c["members"]:
            assignment[member_rows[m]] = ci
        medoids.append(member_rows[c["medoid"]])
        clusters.append(ClusterInsights(
            cluster=ci,
            medoid=c["medoid"],
            members=tuple(c["members"]),
            insights=tuple(
                Insight(
                    node_a=i["a"], node_b=i["b"], significance=i["significance"],
                    values={lab: (pair[0], pair[1]) for lab, pair in i["values"].items()},
                )
                for i in c["insights"]
            ),
        ))
    clustering = Clustering(
        k=len(doc["clusters"]), assignment=assignment, medoids=tuple(medoids))
    restart = doc.get("restart_scores")
    return InsightResult(
        partition=partition,
        clustering=clustering,
        score=doc["score"],
        strategy=doc["strategy"],
        seed=doc["seed"],
        indicator_labels=tuple(labels),
        clusters=tuple(clusters),
        restart_scores=tuple(restart) if restart is not None else None,
    )


def write_insight_report(result: InsightResult, path, k: int | None = None) -> None:
    _dump_json(insight_report_to_dict(result, k=k), path)


def read_insight_report(path) -> InsightResult:
    return insight_result_from_dict(_load_json(path))


# ---------------------------------------------------------------------------
# tabular loader

def load_tabular_as_graph(source, label: str) -> PropertyGraph:
    """One node per CSV row under the given label, columns as properties.

    Numeric cells become numbers, everything else text; empty cells are
    absent.  The resulting graph has no edges, so indicator derivation
    yields exactly the empty-path identity indicators.
    """
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header:
        raise ParseError("tabular input needs a header row")
    nodes = []
    for r, rec in enumerate(reader):
        if not rec:
            continue
        if len(rec) != len(header):
            raise ParseError(f"row {r + 1} has {len(rec)} fields, want {len(header)}")
        props: dict[str, Any] = {}
        for name, cell in zip(header, rec):
            if cell == "":
                continue
            try:
                props[name] = float(cell)
            except ValueError:
                props[name] = cell
        nodes.append((f"{label.lower()}_{r}", label, props))
    return PropertyGraph(nodes, [])


# ---------------------------------------------------------------------------
# synthetic graphs

def _draw(rng: np.random.Generator, dist: Any, index: int):
    if isinstance(dist, (int, float)) and not isinstance(dist, bool):
        return dist
    if not isinstance(dist, dict) or len(dist) != 1:
        raise InconsistentSpecError(f"bad property distribution {dist!r}")
    kind, arg = next(iter(dist.items()))
    if kind == "uniform":
        lo, hi = arg
        return float(rng.uniform(lo, hi))
    if kind == "normal":
        mu, sigma = arg
        return float(rng.normal(mu, sigma))
    if kind == "randint":
        lo, hi = arg
        return int(rng.integers(lo, hi + 1))
    if kind == "choice":
        return arg[int(rng.integers(0, len(arg)))]
    if kind == "seq":
        return f"{arg}{index}"
    raise InconsistentSpecError(f"unknown distribution kind {kind!r}")


def generate_synthetic_graph(spec: dict, seed: int = 0) -> PropertyGraph:
    """Deterministic graph honoring requested counts and cardinality classes.

    The declaration lists node types (label, count, property distributions)
    and edge types (label, endpoints, source/target cardinality class
    "1" or "*", optional count, property distributions).  The MANY class
    is always realized by forcing a repeated endpoint, so the inferred
    schema of the generated graph reproduces the declaration.
    """
    rng = np.random.default_rng(seed)
    node_pools: dict[str, list[str]] = {}
    nodes = []
    for nt in spec.get("node_types", []):
        label = nt["label"]
        count = int(nt["count"])
        if count < 0:
            raise InconsistentSpecError(f"negative count for {label!r}")
        pool = []
        for i in range(count):
            nid = f"{label.lower()}_{i}"
            props = {p: _draw(rng, d, i) for p, d in sorted(nt.get("props", {}).items())}
            nodes.append((nid, label, props))
            pool.append(nid)
        node_pools[label] = pool

    edges = []
    for et in spec.get("edge_types", []):
        label = et["label"]
        src_label, tgt_label = et["src"], et["tgt"]
        if src_label not in node_pools or tgt_label not in node_pools:
            raise InconsistentSpecError(
                f"edge type {label!r} references undeclared node types")
        srcs, tgts = node_pools[src_label], node_pools[tgt_label]
        card_src = et.get("card_src", "*")
        card_tgt = et.get("card_tgt", "*")
        if card_src not in ("1", "*") or card_tgt not in ("1", "*"):
            raise InconsistentSpecError(f"bad cardinality class on {label!r}")
        if not srcs or not tgts:
            if et.get("count", 0):
                raise InconsistentSpecError(f"edge type {label!r} has empty endpoint pools")
            continue

        pairs: list[tuple[str, str]] = []
        if card_src == "1" and card_tgt == "1":
            pairs = list(zip(srcs, tgts))
        elif card_src == "1":
            if len(srcs) < 2:
                raise InconsistentSpecError(
                    f"{label!r}: target cardinality * needs at least two sources")
            pairs = [(s, tgts[int(rng.integers(0, len(tgts)))]) for s in srcs]
            pairs[0] = (srcs[0], tgts[0])
            pairs[1] = (srcs[1], tgts[0])  # force a repeated target
        elif card_tgt == "1":
            if len(tgts) < 2:
                raise InconsistentSpecError(
                    f"{label!r}: source cardinality * needs at least two targets")
            pairs = [(srcs[int(rng.integers(0, len(srcs)))], t) for t in tgts]
            pairs[0] = (srcs[0], tgts[0])
            pairs[1] = (srcs[0], tgts[1])  # force a repeated source
        else:
            count = int(et.get("count", 2 * max(len(srcs), len(tgts))))
            if count < 2:
                raise InconsistentSpecError(
                    f"{label!r}: cardinality */* needs at least two edges")
            for _ in range(count - 2):
                s = srcs[int(rng.integers(0, len(srcs)))]
                t = tgts[int(rng.integers(0, len(tgts)))]
                if s == t and (len(srcs) > 1 or len(tgts) > 1):
                    t = tgts[(tgts.index(t) + 1) % len(tgts)]
                pairs.append((s, t))
            pairs.append((srcs[0], tgts[0]))  # force both MANY sides
            pairs.append((srcs[0], tgts[0]))

        for i, (s, t) in enumerate(pairs):
            props = {p: _draw(rng, d, i) for p, d in sorted(et.get("props", {}).items())}
            edges.append((f"{label.lower()}_{i}", label, s, t, props))
    return PropertyGraph(nodes, edges)
