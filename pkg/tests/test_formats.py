import json

import numpy as np
import pytest

from graphcompare.errors import InconsistentSpecError, ParseError, VersionMismatchError
from graphcompare.formats import (
    generate_synthetic_graph,
    graph_to_dict,
    insight_report_to_dict,
    load_tabular_as_graph,
    read_insight_report,
    read_matrix_csv,
    read_trace_csv,
    write_graph_json,
    write_insight_report,
    write_matrix_csv,
    write_trace_csv,
)
from graphcompare.graph import (
    Cardinality,
    check_instance,
    compute_cardinalities,
    infer_graph_type,
    load_graph_file,
)
from graphcompare.indicators import ColumnMeta, Elem, Indicator, IndicatorMatrix, Op
from graphcompare.insights import extract_insights
from graphcompare.search import solve
from graphcompare.validation import ValidationConfig, validate_indicators

from conftest import airports_synth_spec


class TestGraphRoundTrip:
    def test_mini_airports_roundtrip(self, mini_graph, tmp_path):
        out = tmp_path / "g.json"
        write_graph_json(mini_graph, out)
        again = load_graph_file(str(out))
        assert graph_to_dict(again) == graph_to_dict(mini_graph)

    def test_write_is_deterministic(self, mini_graph, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_graph_json(mini_graph, a)
        write_graph_json(mini_graph, b)
        assert a.read_bytes() == b.read_bytes()

    def test_version_mismatch(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"version": 99, "nodes": [], "edges": []}))
        with pytest.raises(VersionMismatchError):
            load_graph_file(str(bad))


class TestMatrixCsv:
    def test_roundtrip_preserves_nulls(self, tmp_path):
        inds = [Indicator((), "a", Elem.NODE, Op.ID),
                Indicator((), "b", Elem.NODE, Op.ID)]
        values = np.array([[1.0, np.nan], [0.123456789012345678, 2.0]])
        m = IndicatorMatrix(["x", "y"], inds, values,
                            [ColumnMeta(True, True), ColumnMeta()])
        path = tmp_path / "m.csv"
        write_matrix_csv(m, path)
        again = read_matrix_csv(path)
        assert again.node_ids == m.node_ids
        assert again.indicators == m.indicators
        assert np.array_equal(again.values, m.values, equal_nan=True)
        assert [(c.scaled, c.attenuated) for c in again.meta] == \
            [(c.scaled, c.attenuated) for c in m.meta]
        # nulls serialize as empty CSV fields
        assert ",1.0,\n" in path.read_text().replace("\r", "")

    def test_validated_matrix_roundtrip(self, iris_matrix, tmp_path):
        path = tmp_path / "iris_matrix.csv"
        write_matrix_csv(iris_matrix, path)
        again = read_matrix_csv(path)
        assert np.array_equal(again.values, iris_matrix.values)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope,a\n1,2\n")
        with pytest.raises(ParseError):
            read_matrix_csv(path)


class TestTraceCsv:
    def test_roundtrip(self, mini_graph, mini_schema, tmp_path):
        cfg = ValidationConfig(discard_props=frozenset({"identifier"}))
        _, trace = validate_indicators(mini_graph, mini_schema, "AIRPORT", cfg)
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        again = read_trace_csv(path)
        assert again.evaluations == trace.evaluations
        assert len(again.entries) == len(trace.entries)
        for a, b in zip(again.entries, trace.entries):
            assert a.indicator.label == b.indicator.label
            assert a.accepted == b.accepted
            assert a.reason == b.reason


class TestInsightReport:
    def test_roundtrip_score_bit_identical(self, iris_matrix, tmp_path):
        result = solve(iris_matrix, "lp", k=2, seed=5)
        report = extract_insights(iris_matrix, result, top_n=2)
        path = tmp_path / "report.json"
        write_insight_report(report, path, k=2)
        again = read_insight_report(path)
        assert again.score == report.score
        assert insight_report_to_dict(again, k=2) == insight_report_to_dict(report, k=2)

    def test_restart_scores_present_for_ls(self, iris_matrix, tmp_path):
        result = solve(iris_matrix, "ls", k=2, seed=5, restarts=5)
        report = extract_insights(iris_matrix, result, top_n=1)
        path = tmp_path / "ls.json"
        write_insight_report(report, path, k=2)
        doc = json.loads(path.read_text())
        assert len(doc["restart_scores"]) == 5
        assert doc["score"] == max(doc["restart_scores"])


class TestTabular:
    def test_iris_shape(self, iris_graph):
        assert iris_graph.num_nodes == 150
        assert iris_graph.num_edges == 0
        nt = infer_graph_type(iris_graph).node_types["FLOWER"]
        assert len(nt.base.props) == 4
        assert all(nt.is_numeric(p) for p in nt.base.props)

    def test_single_row(self, tmp_path):
        f = tmp_path / "one.csv"
        f.write_text("a,b\n1.5,hello\n")
        g = load_tabular_as_graph(str(f), "ROW")
        assert g.num_nodes == 1
        assert g.node_props[0] == {"a": 1.5, "b": "hello"}

    def test_iris_candidates_are_four_identity_indicators(self, iris_graph):
        from graphcompare.context import compute_context, enumerate_indicator_paths
        from graphcompare.indicators import derive_candidate_indicators
        s = compute_cardinalities(iris_graph, infer_graph_type(iris_graph))
        ctx = compute_context(s, "FLOWER")
        cands = derive_candidate_indicators(ctx, enumerate_indicator_paths(ctx, 3))
        assert len(cands) == 4
        assert all(c.op is Op.ID and not c.path for c in cands)

    def test_missing_header(self, tmp_path):
        f = tmp_path / "empty.csv"
        f.write_text("")
        with pytest.raises(ParseError):
            load_tabular_as_graph(str(f), "ROW")


class TestSyntheticGenerator:
    def test_inferred_schema_matches_declaration(self):
        spec = airports_synth_spec(n_airports=100)
        g = generate_synthetic_graph(spec, seed=5)
        s = compute_cardinalities(g, infer_graph_type(g))
        declared_nodes = {nt["label"]: set(nt["props"]) for nt in spec["node_types"]}
        for label, props in declared_nodes.items():
            assert s.node_types[label].base.props == props
        for et in spec["edge_types"]:
            got = s.edge_types[et["label"]]
            assert (got.src, got.tgt) == (et["src"], et["tgt"])
            assert got.card_src.value == et["card_src"]
            assert got.card_tgt.value == et["card_tgt"]
            assert got.base.props == set(et["props"])

    def test_zero_count_spec_empty_graph(self):
        g = generate_synthetic_graph({"node_types": [], "edge_types": []}, seed=0)
        assert g.num_nodes == 0 and g.num_edges == 0

    def test_same_seed_byte_identical_files(self, tmp_path):
        spec = airports_synth_spec()
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_graph_json(generate_synthetic_graph(spec, seed=9), a)
        write_graph_json(generate_synthetic_graph(spec, seed=9), b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self):
        spec = airports_synth_spec()
        a = generate_synthetic_graph(spec, seed=1)
        b = generate_synthetic_graph(spec, seed=2)
        assert graph_to_dict(a) != graph_to_dict(b)

    def test_undeclared_endpoint_rejected(self):
        spec = {
            "node_types": [{"label": "A", "count": 2, "props": {}}],
            "edge_types": [{"label": "E", "src": "A", "tgt": "MISSING",
                            "card_src": "1", "card_tgt": "1"}],
        }
        with pytest.raises(InconsistentSpecError):
            generate_synthetic_graph(spec, seed=0)

    def test_generated_graph_is_valid_instance(self):
        g = generate_synthetic_graph(airports_synth_spec(), seed=3)
        assert check_instance(g, infer_graph_type(g)).ok

    def test_one_one_cardinality(self):
        spec = {
            "node_types": [
                {"label": "A", "count": 3, "props": {"x": {"uniform": [0, 1]}}},
                {"label": "B", "count": 3, "props": {"y": {"uniform": [0, 1]}}},
            ],
            "edge_types": [{"label": "E", "src": "A", "tgt": "B",
                            "card_src": "1", "card_tgt": "1", "props": {}}],
        }
        g = generate_synthetic_graph(spec, seed=0)
        s = compute_cardinalities(g, infer_graph_type(g))
        et = s.edge_types["E"]
        assert et.card_src is Cardinality.ONE and et.card_tgt is Cardinality.ONE
