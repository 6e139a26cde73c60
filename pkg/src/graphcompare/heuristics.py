"""Score-based indicator partitioning: Laplacian score, CV and elbow cuts.

Indicators whose Laplacian score falls at or below the elbow of the
sorted scores preserve row locality and are used for grouping.  Among
the rest, a second elbow over the coefficient of variation separates
diverse indicators (used for comparison) from the remainder (unused).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import squareform, pdist

from .errors import (
    DegenerateGraphError,
    TooFewIndicatorsError,
    TooShortError,
    ZeroMeanError,
)
from .indicators import IndicatorMatrix
from .objective import ThreePartition


def _as_values(matrix) -> np.ndarray:
    if isinstance(matrix, IndicatorMatrix):
        return matrix.values
    return np.asarray(matrix, dtype=float)


def _knn_adjacency(values: np.ndarray, k_nn: int) -> np.ndarray:
    """Symmetric unweighted k-NN adjacency over rows (Euclidean, all columns).

    Two rows are adjacent when either is among the other's k nearest;
    distance ties break toward the lower row index.
    """
    n = values.shape[0]
    if n < k_nn + 1:
        raise ValueError(f"need at least k_nn+1={k_nn + 1} rows, got {n}")
    dist = squareform(pdist(values, metric="euclidean"))
    if n > 1 and dist.max() == 0.0:
        raise DegenerateGraphError("all rows are identical")
    order = np.argsort(dist, axis=1, kind="stable")[:, : k_nn + 1]
    adj = np.zeros((n, n), dtype=float)
    for j in range(n):
        picked = [l for l in order[j] if l != j][:k_nn]
        adj[j, picked] = 1.0
        adj[picked, j] = 1.0
    return adj


def _laplacian_score_on(adj: np.ndarray, degrees: np.ndarray, col: np.ndarray,
                        center: bool) -> float:
    if np.all(col == col[0]):
        return 0.0
    if center:
        col = col - (col @ degrees) / degrees.sum()
        if np.all(col == 0.0):
            return 0.0
    num = col @ (degrees * col) - col @ (adj @ col)  # I^T (D - A) I
    den = col @ (degrees * col)
    return float(num / den)


def laplacian_score(matrix, index: int, k_nn: int = 5, center: bool = False) -> float:
    """Locality preservation of one column over the row k-NN graph.

    Low scores mean the column varies little between neighbouring rows.
    Constant columns score 0.  The optional centering reproduces the
    classical feature-selection variant; the plain ratio is the default.
    """
    values = _as_values(matrix)
    if np.isnan(values).any():
        raise ValueError("laplacian score requires a null-free matrix")
    adj = _knn_adjacency(values, k_nn)
    degrees = adj.sum(axis=1)
    return _laplacian_score_on(adj, degrees, values[:, index].astype(float), center)


def coefficient_of_variation(matrix, index: int) -> float:
    """Population stdev over mean of one column; 0 for constant columns."""
    col = _as_values(matrix)[:, index].astype(float)
    if np.isnan(col).any():
        raise ValueError("coefficient of variation requires a null-free column")
    if np.all(col == col[0]):
        return 0.0
    mean = col.mean()
    if mean == 0.0:
        raise ZeroMeanError("zero-mean column")
    return float(col.std(ddof=0) / mean)


def elbow_cut(sorted_scores) -> float:
    """Score at the point of maximum curvature of an ascending score list.

    The elbow is the index maximizing perpendicular distance to the chord
    joining the first and last points; ties break toward the smaller
    index.  A two-element list yields the midpoint.
    """
    scores = np.asarray(list(sorted_scores), dtype=float)
    n = scores.size
    if n < 2:
        raise TooShortError("elbow detection needs at least two scores")
    if n == 2:
        return float((scores[0] + scores[1]) / 2.0)
    dy = scores[-1] - scores[0]
    dx = float(n - 1)
    idx = np.arange(n)
    # |cross product| of (chord, point - first); the common norm is constant
    cross = np.abs(dy * idx - dx * (scores - scores[0]))
    return float(scores[int(np.argmax(cross))])


def _argmax_cv(matrix, indices) -> int:
    best = None
    best_cv = -np.inf
    for j in sorted(indices):
        cv = coefficient_of_variation(matrix, j)
        if cv > best_cv:
            best, best_cv = j, cv
    return best


def laplacian_heuristic(matrix, k_nn: int = 5) -> ThreePartition:
    """Partition indicators by Laplacian score then coefficient of variation.

    Indicators scoring at or below the Laplacian elbow go to the grouping
    set; among the rest, those at or below the CV elbow are unused and
    the others compared.  When a stage would leave the comparison or
    grouping set empty, the single best-ranked indicator for that role
    is force-assigned.
    """
    values = _as_values(matrix)
    p = values.shape[1]
    if p < 2:
        raise TooFewIndicatorsError("need at least two indicators to partition")
    if np.isnan(values).any():
        raise ValueError("laplacian heuristic requires a null-free matrix")

    adj = _knn_adjacency(values, k_nn)
    degrees = adj.sum(axis=1)
    ls = np.array([
        _laplacian_score_on(adj, degrees, values[:, j].astype(float), False)
        for j in range(p)
    ])
    cut = elbow_cut(np.sort(ls, kind="stable"))
    group = {j for j in range(p) if ls[j] <= cut}
    rest = sorted(set(range(p)) - group)

    if not rest:
        # grouping swallowed everything; surface the most diverse indicator
        best = _argmax_cv(matrix, group)
        group.discard(best)
        compare, unused = {best}, set()
    elif len(rest) < 2:
        compare, unused = set(rest), set()
    else:
        cv = np.array([coefficient_of_variation(matrix, j) for j in rest])
        cut2 = elbow_cut(np.sort(cv, kind="stable"))
        unused = {rest[i] for i in range(len(rest)) if cv[i] <= cut2}
        compare = set(rest) - unused
        if not compare:
            best = _argmax_cv(matrix, unused)
            unused.discard(best)
            compare = {best}

    return ThreePartition(
        compare=frozenset(compare), group=frozenset(group), unused=frozenset(unused))
