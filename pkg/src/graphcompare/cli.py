"""Command-line surface: gc schema | indicators | insights | bench.

Exit codes are a stable contract: 0 success, 1 parse failure, 2 graph
validity violation, 3 empty validated indicator set, 4 infeasible run
configuration.  All commands are deterministic given --seed (timing
fields aside).  Set GC_LOG to control the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from .bench import default_manifest_path, load_manifest, run_bench
from .errors import (
    GraphInvariantError,
    InfeasibleKError,
    InvalidInstanceError,
    NoIndicatorsSurviveError,
    ParseError,
    SearchSpaceTooLargeError,
    TooFewIndicatorsError,
    VersionMismatchError,
)
from .formats import (
    read_matrix_csv,
    write_insight_report,
    write_matrix_csv,
    write_schema_json,
    write_trace_csv,
)
from .graph import compute_cardinalities, infer_graph_type, load_graph_file
from .insights import extract_insights
from .search import DEFAULT_TAU, EXP_INDICATOR_LIMIT, STRATEGIES, solve
from .validation import Mode, ValidationConfig, validate_indicators

log = logging.getLogger("graphcompare")

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDITY = 2
EXIT_NO_INDICATORS = 3
EXIT_INFEASIBLE = 4


def _read_config_file(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib  # type: ignore[import-not-found]
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _validation_config(args) -> ValidationConfig:
    """Config file first, CLI flags win."""
    base = _read_config_file(args.config) if getattr(args, "config", None) else {}
    if getattr(args, "alpha", None) is not None:
        base["alpha_ratio"] = args.alpha
    if getattr(args, "beta", None) is not None:
        base["beta_ratio"] = args.beta
    if getattr(args, "gamma", None) is not None:
        base["gamma_ratio"] = args.gamma
    if getattr(args, "corr", None) is not None:
        base["corr_threshold"] = args.corr
    if getattr(args, "discard", None):
        base["discard_props"] = [p for p in args.discard.split(",") if p]
    if getattr(args, "max_len", None) is not None:
        base["max_len"] = args.max_len
    return ValidationConfig.from_dict(base)


def _add_validation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML/JSON validation config file")
    parser.add_argument("--alpha", type=float, help="min distinct-value ratio")
    parser.add_argument("--beta", type=float, help="max distinct-value ratio")
    parser.add_argument("--gamma", type=float, help="min non-null density")
    parser.add_argument("--corr", type=float, help="absolute Pearson cutoff")
    parser.add_argument("--discard", help="comma-separated property names to discard")
    parser.add_argument("--max-len", type=int, help="max indicator path length")


def cmd_schema(args) -> int:
    g = load_graph_file(args.graph)
    schema = compute_cardinalities(g, infer_graph_type(g))
    print(f"{len(schema.node_types)} node types, {len(schema.edge_types)} edge types")
    for nt in schema.node_types.values():
        print(f"  node {nt.name:20s} props={','.join(sorted(nt.base.props))}")
    for et in schema.edge_types.values():
        print(
            f"  edge {et.name:20s} {et.src} -> {et.tgt} "
            f"card src={et.card_src.value} tgt={et.card_tgt.value} "
            f"props={','.join(sorted(et.base.props))}"
        )
    if args.out:
        write_schema_json(schema, args.out)
        log.info("schema written to %s", args.out)
    return EXIT_OK


def cmd_indicators(args) -> int:
    t_start = time.perf_counter()
    g = load_graph_file(args.graph)
    cfg = _validation_config(args)
    t0 = time.perf_counter()
    schema = compute_cardinalities(g, infer_graph_type(g))
    t_card = time.perf_counter() - t0
    timings: dict[str, float] = {}
    matrix, trace = validate_indicators(
        g, schema, args.node_type, cfg, mode=Mode(args.mode), timings=timings)
    if args.out_matrix:
        write_matrix_csv(matrix, args.out_matrix)
    if args.out_trace:
        write_trace_csv(trace, args.out_trace)
    total = time.perf_counter() - t_start
    accepted = sum(1 for e in trace.entries if e.accepted)
    print(f"candidates={len(trace.entries)} accepted={accepted} "
          f"rows={matrix.n_rows} evaluations={trace.evaluations}")
    print(f"timing card={t_card:.3f}s cand={timings['candidates']:.3f}s "
          f"valid={timings['validation']:.3f}s total={total:.3f}s")
    return EXIT_OK


def cmd_insights(args) -> int:
    if args.matrix:
        matrix = read_matrix_csv(args.matrix)
    else:
        if not (args.graph and args.node_type):
            raise SystemExit("need --matrix or both --graph and --node-type")
        g = load_graph_file(args.graph)
        schema = compute_cardinalities(g, infer_graph_type(g))
        cfg = _validation_config(args)
        matrix, _ = validate_indicators(g, schema, args.node_type, cfg)
    result = solve(
        matrix, args.strategy, k=args.k, seed=args.seed, tau=args.tau,
        k_nn=args.knn, restarts=args.restarts, exp_limit=args.exp_limit,
        jobs=args.jobs)
    insights = extract_insights(matrix, result, top_n=args.top_n)
    print(f"strategy={result.strategy} k={args.k} seed={args.seed} "
          f"score={result.score:.6f} clusters={result.clustering.k}")
    if args.out:
        write_insight_report(insights, args.out, k=args.k)
        log.info("insight report written to %s", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    manifest = args.manifest or str(default_manifest_path())
    entries = load_manifest(manifest)
    if args.datasets:
        wanted = set(args.datasets.split(","))
        unknown = wanted - {e["name"] for e in entries}
        if unknown:
            raise SystemExit(f"unknown datasets: {sorted(unknown)}")
        entries = [e for e in entries if e["name"] in wanted]
    report = run_bench(
        entries,
        base_dir=os.path.dirname(os.path.abspath(manifest)),
        strategies=tuple(args.strategies.split(",")),
        k_values=tuple(range(args.k_min, args.k_max + 1)),
        repeats=args.repeats,
        seed=args.seed,
        tau=args.tau,
        k_nn=args.knn,
        restarts=args.restarts,
        jobs=args.jobs,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=1)
            fh.write("\n")
    for row in report["summary"]:
        if "mean_score" in row:
            print(f"{row['dataset']:>20s} {row['strategy']:>4s} k={row['k']} "
                  f"score={row['mean_score']:+.4f}+-{row['stdev_score']:.4f} "
                  f"wall={row['mean_wall_seconds']:.3f}s")
        else:
            print(f"{row['dataset']:>20s} {row['strategy']:>4s} k={row['k']} all runs failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gc", description="Comparison indicators over property graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schema", help="infer schema and cardinalities")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", help="write schema JSON here")
    p.set_defaults(func=cmd_schema)

    p = sub.add_parser("indicators", help="derive and validate indicators")
    p.add_argument("--graph", required=True)
    p.add_argument("--node-type", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="lazy")
    p.add_argument("--out-matrix", help="write the matrix CSV here")
    p.add_argument("--out-trace", help="write the validation trace CSV here")
    _add_validation_flags(p)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("insights", help="solve the comparison/grouping problem")
    p.add_argument("--graph")
    p.add_argument("--node-type")
    p.add_argument("--matrix", help="use a previously exported matrix CSV")
    p.add_argument("--strategy", choices=STRATEGIES, default="ls")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--knn", type=int, default=5)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--top-n", type=int, default=3)
    p.add_argument("--exp-limit", type=int, default=EXP_INDICATOR_LIMIT)
    p.add_argument("--jobs", type=int, default=1,
                   help="thread pool size for the restart search")
    p.add_argument("--out", help="write the insight report JSON here")
    _add_validation_flags(p)
    p.set_defaults(func=cmd_insights)

    p = sub.add_parser("bench", help="run the experimental harness")
    p.add_argument("--manifest", help="dataset manifest JSON (bundled one by default)")
    p.add_argument("--datasets", help="comma-separated subset of manifest datasets")
    p.add_argument("--strategies", default="rd,lp,sls,ls")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--knn", type=int, default=5)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the bench report JSON here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("GC_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, VersionMismatchError) as exc:
        log.error("parse error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GraphInvariantError, InvalidInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except NoIndicatorsSurviveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_INDICATORS
    except (InfeasibleKError, SearchSpaceTooLargeError, TooFewIndicatorsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
