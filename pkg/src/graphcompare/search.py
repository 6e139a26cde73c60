"""Search strategies over indicator 3-partitions.

Five strategies produce a (partition, clustering, score) triple: a
random feasible baseline, the Laplacian heuristic, greedy local search
from the Laplacian start, random restarts + local search, and exhaustive
enumeration.  All are deterministic for a given seed; score ties always
resolve to the lexicographically lowest partition (role codes compared
per indicator index).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clustering import fuzzy_c_medoids
from .errors import SearchSpaceTooLargeError, TooFewIndicatorsError
from .heuristics import laplacian_heuristic
from .indicators import IndicatorMatrix
from .objective import Clustering, ThreePartition, objective_score

#: exhaustive enumeration refuses above this many indicators
EXP_INDICATOR_LIMIT = 12

#: threshold on the objective gain below which local search stops
DEFAULT_TAU = 1e-6

Clusterer = Callable[[IndicatorMatrix, ThreePartition], Clustering]


def make_clusterer(k: int, seed: int, m_factor: float = 2.0,
                   max_iter: int = 100) -> Clusterer:
    """Seeded deterministic clusterer; every call reuses the same seed so
    scores of different partitions are comparable."""

    def clusterer(matrix, partition: ThreePartition) -> Clustering:
        return fuzzy_c_medoids(
            matrix, partition, k, m_factor=m_factor, max_iter=max_iter, seed=seed)

    return clusterer


@dataclass
class SearchResult:
    partition: ThreePartition
    clustering: Clustering
    score: float
    strategy: str
    seed: int
    #: objective after the start and after each accepted local-search move
    iteration_scores: list[float] = field(default_factory=list)
    #: final score of each restart (random + local search only)
    restart_scores: list[float] | None = None


class _Evaluator:
    """Clusters and scores partitions, memoizing by partition codes."""

    def __init__(self, matrix, clusterer: Clusterer, n_indicators: int) -> None:
        self.matrix = matrix
        self.clusterer = clusterer
        self.n = n_indicators
        self.cache: dict[tuple[int, ...], tuple[Clustering, float]] = {}

    def __call__(self, partition: ThreePartition) -> tuple[Clustering, float]:
        key = partition.codes(self.n)
        hit = self.cache.get(key)
        if hit is None:
            clustering = self.clusterer(self.matrix, partition)
            score = objective_score(self.matrix, partition, clustering)
            hit = (clustering, score)
            self.cache[key] = hit
        return hit


def _n_indicators(matrix) -> int:
    if isinstance(matrix, IndicatorMatrix):
        return matrix.n_cols
    return np.asarray(matrix).shape[1]


def neighbor_partitions(partition: ThreePartition, n: int):
    """All feasible partitions reached by relocating exactly one indicator."""
    codes = list(partition.codes(n))
    for i in range(n):
        for target in (0, 1, 2):
            if target == codes[i]:
                continue
            moved = codes.copy()
            moved[i] = target
            if 0 not in moved or 1 not in moved:
                continue  # would empty the comparison or grouping set
            yield ThreePartition.from_codes(moved)


def local_search(
    matrix,
    start: ThreePartition,
    tau: float = DEFAULT_TAU,
    clusterer: Clusterer | None = None,
    seed: int = 0,
    _evaluator: _Evaluator | None = None,
) -> SearchResult:
    """Greedy best-improvement search over single-indicator moves.

    Every sweep clusters and scores all feasible neighbours, adopts the
    best one when it improves the objective, and stops once the gain
    falls below tau.  Accepted-iteration scores are strictly increasing.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    n = _n_indicators(matrix)
    start.validate(n)
    clusterer = clusterer or make_clusterer(k=2, seed=seed)
    evaluate = _evaluator or _Evaluator(matrix, clusterer, n)

    current = start
    clustering, score = evaluate(current)
    iteration_scores = [score]
    while True:
        best = None
        best_score = -np.inf
        for nb in neighbor_partitions(current, n):
            _, nb_score = evaluate(nb)
            if nb_score > best_score or (
                nb_score == best_score
                and best is not None
                and nb.codes(n) < best.codes(n)
            ):
                best, best_score = nb, nb_score
        if best is None:
            break
        gain = best_score - score
        if gain > 0:
            current = best
            clustering, score = evaluate(current)
            iteration_scores.append(score)
        if gain < tau:
            break
    return SearchResult(
        partition=current, clustering=clustering, score=score,
        strategy="sls", seed=seed, iteration_scores=iteration_scores)


def random_feasible_partition(n: int, rng: np.random.Generator) -> ThreePartition:
    """Uniform draw over all feasible 3-partitions (rejection sampling)."""
    if n < 2:
        raise TooFewIndicatorsError("a feasible 3-partition needs >= 2 indicators")
    while True:
        codes = rng.integers(0, 3, size=n)
        if (codes == 0).any() and (codes == 1).any():
            return ThreePartition.from_codes(codes.tolist())


def random_baseline(matrix, clusterer: Clusterer, seed: int = 0) -> SearchResult:
    """One uniform feasible partition, clustered and scored; no search."""
    n = _n_indicators(matrix)
    rng = np.random.default_rng(seed)
    partition = random_feasible_partition(n, rng)
    clustering = clusterer(matrix, partition)
    score = objective_score(matrix, partition, clustering)
    return SearchResult(partition, clustering, score, "rd", seed)


def random_restart_search(
    matrix,
    clusterer: Clusterer,
    tau: float = DEFAULT_TAU,
    restarts: int = 5,
    seed: int = 0,
    jobs: int = 1,
) -> SearchResult:
    """Local search from multiple uniform random starts; best result wins.

    Restarts are independent, so with jobs > 1 they run in a thread pool;
    the outcome is identical to the sequential run (the score cache is a
    pure memo and the reduction order over restarts is fixed).
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    n = _n_indicators(matrix)
    rng = np.random.default_rng(seed)
    evaluator = _Evaluator(matrix, clusterer, n)
    starts = [random_feasible_partition(n, rng) for _ in range(restarts)]

    def run(start: ThreePartition) -> SearchResult:
        return local_search(
            matrix, start, tau=tau, clusterer=clusterer, seed=seed,
            _evaluator=evaluator)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(start) for start in starts]

    best: SearchResult | None = None
    for result in results:
        if (
            best is None
            or result.score > best.score
            or (result.score == best.score
                and result.partition.codes(n) < best.partition.codes(n))
        ):
            best = result
    assert best is not None
    best.strategy = "ls"
    best.restart_scores = [r.score for r in results]
    return best


def exponential_search(
    matrix,
    clusterer: Clusterer,
    limit: int = EXP_INDICATOR_LIMIT,
    seed: int = 0,
) -> SearchResult:
    """Enumerate every feasible assignment of indicators to the three roles.

    Assignments are visited in lexicographic code order, so the first
    maximum encountered is the lexicographically lowest optimum.
    """
    n = _n_indicators(matrix)
    if n > limit:
        raise SearchSpaceTooLargeError(
            f"{n} indicators exceed the enumeration limit of {limit}")
    if n < 2:
        raise TooFewIndicatorsError("a feasible 3-partition needs >= 2 indicators")
    evaluator = _Evaluator(matrix, clusterer, n)
    best = None
    best_score = -np.inf
    for codes in itertools.product((0, 1, 2), repeat=n):
        if 0 not in codes or 1 not in codes:
            continue
        partition = ThreePartition.from_codes(codes)
        clustering, score = evaluator(partition)
        if score > best_score:
            best = (partition, clustering)
            best_score = score
    assert best is not None
    return SearchResult(best[0], best[1], best_score, "exp", seed)


STRATEGIES = ("rd", "lp", "sls", "ls", "exp")


def solve(
    matrix,
    strategy: str,
    k: int,
    seed: int = 0,
    tau: float = DEFAULT_TAU,
    k_nn: int = 5,
    restarts: int = 5,
    m_factor: float = 2.0,
    max_iter: int = 100,
    exp_limit: int = EXP_INDICATOR_LIMIT,
    jobs: int = 1,
) -> SearchResult:
    """Run one strategy end-to-end on a validated matrix.

    The k-NN parameter of the Laplacian start is clamped to the row count
    so small matrices stay solvable.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    clusterer = make_clusterer(k=k, seed=seed, m_factor=m_factor, max_iter=max_iter)
    n_rows = matrix.n_rows if isinstance(matrix, IndicatorMatrix) else np.asarray(matrix).shape[0]
    k_nn = max(1, min(k_nn, n_rows - 1))

    if strategy == "rd":
        return random_baseline(matrix, clusterer, seed=seed)
    if strategy == "lp":
        partition = laplacian_heuristic(matrix, k_nn=k_nn)
        clustering = clusterer(matrix, partition)
        score = objective_score(matrix, partition, clustering)
        return SearchResult(partition, clustering, score, "lp", seed)
    if strategy == "sls":
        start = laplacian_heuristic(matrix, k_nn=k_nn)
        result = local_search(matrix, start, tau=tau, clusterer=clusterer, seed=seed)
        result.strategy = "sls"
        return result
    if strategy == "ls":
        return random_restart_search(
            matrix, clusterer, tau=tau, restarts=restarts, seed=seed, jobs=jobs)
    return exponential_search(matrix, clusterer, limit=exp_limit, seed=seed)
