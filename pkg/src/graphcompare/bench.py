"""Experimental harness: datasets x strategies x K x repeats.

Each cell runs one strategy on one prepared dataset with a seed derived
from the base seed and the cell index, recording wall and CPU time and
the objective score.  Scores are min-max normalized per dataset across
all runs; failures are recorded as error cells without aborting the
sweep.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import GraphCompareError, InconsistentSpecError
from .formats import (
    FORMAT_VERSION,
    _load_json,
    fixture_path,
    generate_synthetic_graph,
    load_tabular_as_graph,
)
from .graph import compute_cardinalities, infer_graph_type, load_graph_file
from .indicators import IndicatorMatrix
from .search import STRATEGIES, solve
from .validation import ValidationConfig, validate_indicators


@dataclass
class BenchRun:
    dataset: str
    strategy: str
    k: int
    repeat: int
    seed: int
    raw_score: float | None
    norm_score: float | None
    wall_seconds: float
    cpu_seconds: float
    indicator_count: int
    node_count: int
    error: str | None = None


def load_manifest(path) -> list[dict]:
    doc = _load_json(path)
    version = doc.get("version")
    if version is not None and version != FORMAT_VERSION:
        raise GraphCompareError(f"unsupported manifest version {version!r}")
    return list(doc.get("datasets", []))


def default_manifest_path():
    return fixture_path("datasets.json")


def prepare_dataset(entry: dict, base_dir=None) -> IndicatorMatrix:
    """Load or generate a dataset and run indicator validation on it."""
    kind = entry.get("kind")
    if kind == "graph":
        path = Path(base_dir or ".") / entry["path"]
        g = load_graph_file(str(path))
        node_type = entry["node_type"]
    elif kind == "tabular":
        path = Path(base_dir or ".") / entry["path"]
        g = load_tabular_as_graph(str(path), entry["label"])
        node_type = entry["label"]
    elif kind == "synthetic":
        g = generate_synthetic_graph(entry["generator"], seed=int(entry.get("seed", 0)))
        node_type = entry["node_type"]
    else:
        raise InconsistentSpecError(f"unknown dataset kind {kind!r}")
    s = compute_cardinalities(g, infer_graph_type(g))
    cfg = ValidationConfig.from_dict(entry.get("config", {}))
    matrix, _ = validate_indicators(g, s, node_type, cfg)
    return matrix


def _run_cell(matrix: IndicatorMatrix, entry_name: str, strategy: str, k: int,
              repeat: int, seed: int, tau: float, k_nn: int, restarts: int) -> BenchRun:
    wall0 = time.perf_counter()
    cpu0 = time.process_time()
    error = None
    raw = None
    try:
        result = solve(matrix, strategy, k=k, seed=seed, tau=tau, k_nn=k_nn,
                       restarts=restarts)
        raw = result.score
    except GraphCompareError as exc:
        error = f"{type(exc).__name__}: {exc}"
    return BenchRun(
        dataset=entry_name,
        strategy=strategy,
        k=k,
        repeat=repeat,
        seed=seed,
        raw_score=raw,
        norm_score=None,
        wall_seconds=time.perf_counter() - wall0,
        cpu_seconds=time.process_time() - cpu0,
        indicator_count=matrix.n_cols,
        node_count=matrix.n_rows,
        error=error,
    )


_WORKER_MATRICES: dict[str, IndicatorMatrix | GraphCompareError] = {}
_WORKER_ARGS: dict = {}


def _worker_init(entries: list[dict], base_dir) -> None:
    _WORKER_ARGS["entries"] = {e["name"]: e for e in entries}
    _WORKER_ARGS["base_dir"] = base_dir


def _worker_cell(args) -> BenchRun:
    name, strategy, k, repeat, seed, tau, k_nn, restarts = args
    if name not in _WORKER_MATRICES:
        try:
            _WORKER_MATRICES[name] = prepare_dataset(
                _WORKER_ARGS["entries"][name], _WORKER_ARGS["base_dir"])
        except GraphCompareError as exc:
            _WORKER_MATRICES[name] = exc
    prepared = _WORKER_MATRICES[name]
    if isinstance(prepared, GraphCompareError):
        return BenchRun(
            dataset=name, strategy=strategy, k=k, repeat=repeat, seed=seed,
            raw_score=None, norm_score=None, wall_seconds=0.0, cpu_seconds=0.0,
            indicator_count=0, node_count=0,
            error=f"{type(prepared).__name__}: {prepared}")
    return _run_cell(prepared, name, strategy, k, repeat, seed,
                     tau, k_nn, restarts)


def run_bench(
    entries: list[dict],
    base_dir=None,
    strategies=("rd", "lp", "sls", "ls"),
    k_values=(2, 3, 4),
    repeats: int = 10,
    seed: int = 0,
    tau: float = 1e-6,
    k_nn: int = 5,
    restarts: int = 5,
    jobs: int = 1,
) -> dict:
    """Run the full sweep and return the bench report document."""
    for strat in strategies:
        if strat not in STRATEGIES:
            raise ValueError(f"unknown strategy {strat!r}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")

    cells = []
    for entry in entries:
        for strategy in strategies:
            for k in k_values:
                for repeat in range(repeats):
                    cell_index = len(cells)
                    cells.append((entry["name"], strategy, k, repeat,
                                  seed ^ cell_index, tau, k_nn, restarts))

    runs: list[BenchRun]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_worker_init,
            initargs=(entries, base_dir),
        ) as pool:
            runs = list(pool.map(_worker_cell, cells))
    else:
        matrices: dict[str, IndicatorMatrix | GraphCompareError] = {}
        for e in entries:
            try:
                matrices[e["name"]] = prepare_dataset(e, base_dir)
            except GraphCompareError as exc:
                matrices[e["name"]] = exc
        runs = []
        for (name, strategy, k, repeat, cell_seed, t, kn, rs) in cells:
            prepared = matrices[name]
            if isinstance(prepared, GraphCompareError):
                runs.append(BenchRun(
                    dataset=name, strategy=strategy, k=k, repeat=repeat,
                    seed=cell_seed, raw_score=None, norm_score=None,
                    wall_seconds=0.0, cpu_seconds=0.0, indicator_count=0,
                    node_count=0,
                    error=f"{type(prepared).__name__}: {prepared}"))
            else:
                runs.append(_run_cell(
                    prepared, name, strategy, k, repeat, cell_seed, t, kn, rs))

    # min-max normalization per dataset across all successful runs
    for entry in entries:
        scores = [r.raw_score for r in runs
                  if r.dataset == entry["name"] and r.raw_score is not None]
        if not scores:
            continue
        lo, hi = min(scores), max(scores)
        span = hi - lo
        for r in runs:
            if r.dataset == entry["name"] and r.raw_score is not None:
                r.norm_score = (r.raw_score - lo) / span if span > 0 else 0.0

    summary = []
    for entry in entries:
        for strategy in strategies:
            for k in k_values:
                cell_runs = [r for r in runs
                             if r.dataset == entry["name"]
                             and r.strategy == strategy and r.k == k]
                ok = [r for r in cell_runs if r.raw_score is not None]
                row = {
                    "dataset": entry["name"],
                    "strategy": strategy,
                    "k": k,
                    "runs": len(cell_runs),
                    "errors": len(cell_runs) - len(ok),
                }
                if ok:
                    for field_name, values in (
                        ("score", [r.raw_score for r in ok]),
                        ("norm_score", [r.norm_score for r in ok]),
                        ("wall_seconds", [r.wall_seconds for r in ok]),
                        ("cpu_seconds", [r.cpu_seconds for r in ok]),
                    ):
                        row[f"mean_{field_name}"] = statistics.mean(values)
                        row[f"stdev_{field_name}"] = statistics.pstdev(values)
                summary.append(row)

    return {
        "format": "bench-report",
        "version": FORMAT_VERSION,
        "seed": seed,
        "repeats": repeats,
        "strategies": list(strategies),
        "k_values": list(k_values),
        "runs": [asdict(r) for r in runs],
        "summary": summary,
    }
