from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphcompare.bench import prepare_dataset  # noqa: E402
from graphcompare.formats import fixture_path, load_tabular_as_graph  # noqa: E402
from graphcompare.graph import compute_cardinalities, infer_graph_type, load_graph_file  # noqa: E402
from graphcompare.validation import validate_indicators  # noqa: E402


@pytest.fixture(scope="session")
def mini_graph():
    return load_graph_file(str(fixture_path("mini_airports.json")))


@pytest.fixture(scope="session")
def mini_schema(mini_graph):
    return compute_cardinalities(mini_graph, infer_graph_type(mini_graph))


@pytest.fixture(scope="session")
def iris_graph():
    return load_tabular_as_graph(str(fixture_path("iris.csv")), "FLOWER")


@pytest.fixture(scope="session")
def iris_matrix(iris_graph):
    schema = compute_cardinalities(iris_graph, infer_graph_type(iris_graph))
    matrix, _ = validate_indicators(iris_graph, schema, "FLOWER")
    return matrix


def airports_synth_spec(n_airports=40, n_cities=10, n_countries=3,
                        n_flow=80, n_route=60):
    """Generator spec mirroring the airports-style schema at a small scale."""
    return {
        "node_types": [
            {"label": "COUNTRY", "count": n_countries,
             "props": {"identifier": {"seq": "c"}, "name": {"seq": "Country"},
                       "GPD": {"uniform": [1.0, 4.0]},
                       "birthRate": {"uniform": [5.0, 15.0]},
                       "lifeExp": {"uniform": [70.0, 85.0]}}},
            {"label": "CITY", "count": n_cities,
             "props": {"identifier": {"seq": "ct"}, "name": {"seq": "City"},
                       "population": {"uniform": [0.1, 10.0]},
                       "pollution": {"uniform": [20.0, 80.0]},
                       "rank": {"randint": [1, 10]}}},
            {"label": "AIRPORT", "count": n_airports,
             "props": {"identifier": {"seq": "a"}, "IATA": {"seq": "IATA"},
                       "lat": {"uniform": [-60.0, 70.0]},
                       "long": {"uniform": [-180.0, 180.0]},
                       "distCity": {"uniform": [2.0, 40.0]}}},
        ],
        "edge_types": [
            {"label": "BELONG", "src": "AIRPORT", "tgt": "CITY",
             "card_src": "1", "card_tgt": "*", "props": {"identifier": {"seq": "b"}}},
            {"label": "IS_IN", "src": "CITY", "tgt": "COUNTRY",
             "card_src": "1", "card_tgt": "*", "props": {"identifier": {"seq": "i"}}},
            {"label": "FLOW", "src": "AIRPORT", "tgt": "AIRPORT",
             "card_src": "*", "card_tgt": "*", "count": n_flow,
             "props": {"identifier": {"seq": "f"},
                       "nPAX": {"randint": [10000, 1000000]},
                       "year": {"randint": [2018, 2024]}}},
            {"label": "ROUTE_TO", "src": "AIRPORT", "tgt": "AIRPORT",
             "card_src": "*", "card_tgt": "*", "count": n_route,
             "props": {"identifier": {"seq": "r"},
                       "airline": {"choice": ["AF", "AZ", "TO", "LH", "BA"]},
                       "price": {"uniform": [30.0, 500.0]}}},
            {"label": "TRADE", "src": "COUNTRY", "tgt": "COUNTRY",
             "card_src": "*", "card_tgt": "*", "count": 6,
             "props": {"identifier": {"seq": "t"},
                       "flow": {"choice": ["import", "export"]},
                       "value": {"uniform": [10.0, 200.0]}}},
        ],
    }


#: keeps only the null-free city/country-level indicators of the synth schema
HIER_ONLY_DISCARDS = ["identifier", "name", "IATA", "lat", "long", "distCity",
                      "nPAX", "year", "price", "airline"]


def table_synth_spec(label="SAMPLE", rows=120, cols=8):
    """Edgeless synthetic: rows of independent numeric properties."""
    return {
        "node_types": [{
            "label": label, "count": rows,
            "props": {f"m{j}": {"uniform": [0.0, 1.0]} for j in range(cols)},
        }],
        "edge_types": [],
    }


@pytest.fixture(scope="session")
def small_validated_matrices(mini_graph, mini_schema, iris_matrix):
    """Named validated matrices used by the strategy-level tests."""
    out = {"iris": iris_matrix}
    out["synth_graph"] = prepare_dataset({
        "name": "synth_graph", "kind": "synthetic", "node_type": "AIRPORT",
        "seed": 1, "generator": airports_synth_spec(),
        "config": {"discard_props": HIER_ONLY_DISCARDS, "max_len": 1},
    })
    out["synth_table"] = prepare_dataset({
        "name": "synth_table", "kind": "synthetic", "node_type": "SAMPLE",
        "seed": 2, "generator": table_synth_spec(),
    })
    return out
