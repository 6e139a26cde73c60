"""Ranked node-comparison insights from a solved partition and clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .indicators import IndicatorMatrix
from .objective import Clustering, ThreePartition
from .search import SearchResult


@dataclass(frozen=True)
class Insight:
    """A pair of same-cluster nodes with their comparison-indicator values."""

    node_a: str
    node_b: str
    significance: float
    values: dict[str, tuple[float, float]]


@dataclass(frozen=True)
class ClusterInsights:
    cluster: int
    medoid: str
    members: tuple[str, ...]
    insights: tuple[Insight, ...]


@dataclass(frozen=True)
class InsightResult:
    partition: ThreePartition
    clustering: Clustering
    score: float
    strategy: str
    seed: int
    indicator_labels: tuple[str, ...]
    clusters: tuple[ClusterInsights, ...]
    restart_scores: tuple[float, ...] | None = None


def _condensed_to_pair(m: int, idx: int) -> tuple[int, int]:
    """Invert the condensed pairwise index back to (i, j), i < j."""
    i = int((2 * m - 1 - np.sqrt((2 * m - 1) ** 2 - 8 * idx)) // 2)
    j = idx - (m * i - i * (i + 1) // 2) + i + 1
    return i, int(j)


def extract_insights(
    matrix: IndicatorMatrix, result: SearchResult, top_n: int = 3
) -> InsightResult:
    """Per cluster, the top-n node pairs by significance over the comparison set.

    Significance ties rank by ascending pair indices, so the output is
    deterministic.  Each insight carries the per-indicator value pair for
    every comparison indicator.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    compare_idx = sorted(result.partition.compare)
    compare_labels = [matrix.indicators[j].label for j in compare_idx]
    values = matrix.values
    clusters = []
    for c in range(result.clustering.k):
        rows = result.clustering.members(c)
        member_ids = tuple(matrix.node_ids[r] for r in rows)
        insights: list[Insight] = []
        if rows.size >= 2:
            sig = pdist(values[np.ix_(rows, compare_idx)], metric="cityblock")
            order = np.argsort(-sig, kind="stable")[:top_n]
            for idx in order:
                i, j = _condensed_to_pair(rows.size, int(idx))
                ra, rb = int(rows[i]), int(rows[j])
                pair_values = {
                    lab: (float(values[ra, col]), float(values[rb, col]))
                    for lab, col in zip(compare_labels, compare_idx)
                }
                insights.append(Insight(
                    node_a=matrix.node_ids[ra],
                    node_b=matrix.node_ids[rb],
                    significance=float(sig[idx]),
                    values=pair_values,
                ))
        clusters.append(ClusterInsights(
            cluster=c,
            medoid=matrix.node_ids[result.clustering.medoids[c]],
            members=member_ids,
            insights=tuple(insights),
        ))
    return InsightResult(
        partition=result.partition,
        clustering=result.clustering,
        score=result.score,
        strategy=result.strategy,
        seed=result.seed,
        indicator_labels=tuple(ind.label for ind in matrix.indicators),
        clusters=tuple(clusters),
        restart_scores=tuple(result.restart_scores) if result.restart_scores else None,
    )
