"""Joint indicator-partition / node-clustering objective.

Indicators are split into a comparison set, a grouping set and an unused
set; nodes are clustered.  The score rewards intra-cluster significance
(sum of absolute differences over comparison indicators) and penalizes
intra-cluster squared distance over grouping indicators, each weighted
by the share of indicators assigned to that role.  Pair sums run over
unordered distinct pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ConstraintViolationError
from .indicators import IndicatorMatrix

#: above this many rows the pair sums go through the fused kernel
_DENSE_ROW_LIMIT = 2048


@dataclass(frozen=True)
class ThreePartition:
    """Assignment of indicator indices to {compare, group, unused}.

    compare and group must both be non-empty; the three sets are disjoint
    and cover all indicator indices.
    """

    compare: frozenset[int]
    group: frozenset[int]
    unused: frozenset[int] = frozenset()

    def validate(self, n_indicators: int) -> None:
        sets = (self.compare, self.group, self.unused)
        total = sum(len(s) for s in sets)
        union = self.compare | self.group | self.unused
        if total != len(union) or union != set(range(n_indicators)):
            raise ConstraintViolationError(
                "compare/group/unused must partition the indicator indices")
        if not self.compare:
            raise ConstraintViolationError("comparison set must not be empty")
        if not self.group:
            raise ConstraintViolationError("grouping set must not be empty")

    def codes(self, n_indicators: int) -> tuple[int, ...]:
        """Per-indicator role codes (0 compare, 1 group, 2 unused).

        Tuples compare lexicographically, which is the tie-break order
        used by all searches.
        """
        out = [2] * n_indicators
        for i in self.compare:
            out[i] = 0
        for i in self.group:
            out[i] = 1
        return tuple(out)

    @classmethod
    def from_codes(cls, codes: Sequence[int]) -> ThreePartition:
        return cls(
            compare=frozenset(i for i, c in enumerate(codes) if c == 0),
            group=frozenset(i for i, c in enumerate(codes) if c == 1),
            unused=frozenset(i for i, c in enumerate(codes) if c == 2),
        )


@dataclass
class Clustering:
    """Crisp node clusters with medoids and optional fuzzy memberships."""

    k: int
    assignment: np.ndarray
    medoids: tuple[int, ...]
    memberships: np.ndarray | None = None

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def validate(self) -> None:
        if self.k < 1:
            raise ConstraintViolationError("need at least one cluster")
        sizes = self.sizes()
        if sizes.size != self.k or (sizes < 2).any():
            raise ConstraintViolationError(
                f"every cluster needs more than one member, got sizes {sizes.tolist()}")


def significance(row_a, row_b, compare: Iterable[int]) -> float:
    """Sum of absolute per-indicator differences over the comparison set."""
    a = np.asarray(row_a, dtype=float)
    b = np.asarray(row_b, dtype=float)
    idx = list(compare)
    return float(np.abs(a[idx] - b[idx]).sum())


def sq_distance(row_a, row_b, group: Iterable[int]) -> float:
    """Sum of squared per-indicator differences over the grouping set."""
    a = np.asarray(row_a, dtype=float)
    b = np.asarray(row_b, dtype=float)
    idx = list(group)
    d = a[idx] - b[idx]
    return float((d * d).sum())


def _pair_sums_small(values: np.ndarray, assignment: np.ndarray, k: int,
                     compare_idx: np.ndarray, group_idx: np.ndarray):
    sig = np.zeros(k)
    sqd = np.zeros(k)
    for c in range(k):
        rows = np.flatnonzero(assignment == c)
        if rows.size < 2:
            continue
        sub = values[rows]
        if compare_idx.size:
            sig[c] = pdist(sub[:, compare_idx], metric="cityblock").sum()
        if group_idx.size:
            sqd[c] = pdist(sub[:, group_idx], metric="sqeuclidean").sum()
    return sig, sqd


def intra_cluster_pair_sums(values: np.ndarray, assignment: np.ndarray, k: int,
                            compare_idx, group_idx):
    """Per-cluster significance and squared-distance sums over unordered pairs."""
    compare_idx = np.asarray(sorted(compare_idx), dtype=np.int64)
    group_idx = np.asarray(sorted(group_idx), dtype=np.int64)
    if values.shape[0] > _DENSE_ROW_LIMIT:
        from ._kernels import pair_sums_by_cluster

        return pair_sums_by_cluster(
            np.ascontiguousarray(values), assignment.astype(np.int64), k,
            compare_idx, group_idx)
    return _pair_sums_small(values, assignment, k, compare_idx, group_idx)


def objective_score(matrix: IndicatorMatrix | np.ndarray,
                    partition: ThreePartition,
                    clustering: Clustering) -> float:
    """Score of a (partition, clustering) pair on a null-free matrix."""
    values = matrix.values if isinstance(matrix, IndicatorMatrix) else np.asarray(matrix, float)
    n_rows, n_cols = values.shape
    partition.validate(n_cols)
    clustering.validate()
    if clustering.assignment.shape[0] != n_rows:
        raise ValueError("clustering does not cover the matrix rows")
    if np.isnan(values).any():
        raise ValueError("objective requires a null-free matrix")

    w_sig = len(partition.compare) / n_cols
    w_dist = 1.0 - len(partition.group) / n_cols
    sig, sqd = intra_cluster_pair_sums(
        values, clustering.assignment, clustering.k,
        partition.compare, partition.group)
    sizes = clustering.sizes().astype(float)
    return float((w_sig * sig / sizes).sum() - (w_dist * sqd / sizes).sum())
