"""Modified fuzzy c-medoids node partitioning.

The pair cost between a row and a medoid blends both terms of the
optimization objective: weighted squared distance over the grouping
indicators minus weighted significance over the comparison indicators.
Costs are shifted by the global minimum over all (row, medoid) pairs
plus a small epsilon so memberships stay well defined, which preserves
the cost ordering per medoid.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InfeasibleKError
from .indicators import IndicatorMatrix
from .objective import Clustering, ThreePartition

#: epsilon added after the global-minimum shift
COST_EPS = 1e-9

#: above this many rows the full pair-cost matrix is never materialized
_DENSE_ROW_LIMIT = 2048


def _as_values(matrix) -> np.ndarray:
    if isinstance(matrix, IndicatorMatrix):
        return matrix.values
    return np.asarray(matrix, dtype=float)


class _CostModel:
    """Blended pair cost, dense for small n, decomposed beyond that."""

    def __init__(self, values: np.ndarray, partition: ThreePartition) -> None:
        self.values = values
        n, p = values.shape
        self.n = n
        self.cmp_idx = np.asarray(sorted(partition.compare), dtype=np.int64)
        self.grp_idx = np.asarray(sorted(partition.group), dtype=np.int64)
        self.w_sig = len(partition.compare) / p
        self.w_dist = 1.0 - len(partition.group) / p
        self.dense = n <= _DENSE_ROW_LIMIT
        if self.dense:
            cost = np.zeros((n, n))
            if self.grp_idx.size:
                cost += self.w_dist * squareform(pdist(values[:, self.grp_idx], "sqeuclidean"))
            if self.cmp_idx.size:
                cost -= self.w_sig * squareform(pdist(values[:, self.cmp_idx], "cityblock"))
            self._cost = cost
            cmin = float(cost.min())
        else:
            from ._kernels import min_pair_cost

            self._cost = None
            cmin = min_pair_cost(
                np.ascontiguousarray(values), self.grp_idx, self.cmp_idx,
                self.w_dist, self.w_sig)
            # sorted views reused by the decomposed medoid update
            self._cmp_orders = [
                np.argsort(values[:, i], kind="stable") for i in self.cmp_idx]
        self.shift = COST_EPS - cmin

    def shifted_to(self, medoids: np.ndarray) -> np.ndarray:
        """Shifted costs from every row to each medoid, all positive."""
        if self.dense:
            return self._cost[:, medoids] + self.shift
        v = self.values
        out = np.empty((self.n, medoids.size))
        for t, l in enumerate(medoids):
            col = np.zeros(self.n)
            if self.grp_idx.size:
                d = v[:, self.grp_idx] - v[l, self.grp_idx]
                col += self.w_dist * (d * d).sum(axis=1)
            if self.cmp_idx.size:
                col -= self.w_sig * np.abs(v[:, self.cmp_idx] - v[l, self.cmp_idx]).sum(axis=1)
            out[:, t] = col + self.shift
        return out

    def weighted_cost_to_candidates(self, w: np.ndarray) -> np.ndarray:
        """sum_j w_j * cost(j, c) for every candidate row c (unshifted).

        The shift contributes the same constant to every candidate, so
        argmin over this quantity equals argmin over shifted costs.
        """
        if self.dense:
            return w @ self._cost
        v = self.values
        out = np.zeros(self.n)
        w_tot = w.sum()
        if self.grp_idx.size:
            cols = v[:, self.grp_idx]
            a = (w[:, None] * cols * cols).sum(axis=0)
            b = (w[:, None] * cols).sum(axis=0)
            out += self.w_dist * (a.sum() - 2.0 * (cols * b).sum(axis=1)
                                  + (cols * cols).sum(axis=1) * w_tot)
        if self.cmp_idx.size:
            acc = np.zeros(self.n)
            for i, order in zip(self.cmp_idx, self._cmp_orders):
                xs = v[order, i]
                ws = w[order]
                p = np.cumsum(ws)
                q = np.cumsum(ws * xs)
                # weighted sum of |xs - v| for candidate value v at each sorted slot
                vals = xs * p - q + (q[-1] - q) - xs * (p[-1] - p)
                acc[order] += vals
            out -= self.w_sig * acc
        return out


def _memberships(dist: np.ndarray, m_factor: float) -> np.ndarray:
    u = (1.0 / dist) ** (1.0 / (m_factor - 1.0))
    return u / u.sum(axis=1, keepdims=True)


def _repair_min_sizes(u: np.ndarray, assignment: np.ndarray, k: int):
    """Grow clusters below two members by pulling their best second choices.

    Donor rows must leave a cluster that keeps at least two members.
    Returns (assignment, ok); ok False means the deficiency cannot be
    repaired at this k.
    """
    assignment = assignment.copy()
    while True:
        sizes = np.bincount(assignment, minlength=k)
        deficient = np.flatnonzero(sizes < 2)
        if deficient.size == 0:
            return assignment, True
        c = int(deficient[0])
        donors = np.flatnonzero((sizes[assignment] >= 3) & (assignment != c))
        if donors.size == 0:
            return assignment, False
        best = int(donors[np.argmax(u[donors, c])])
        assignment[best] = c


def fuzzy_c_medoids(
    matrix,
    partition: ThreePartition,
    k: int,
    m_factor: float = 2.0,
    max_iter: int = 100,
    tol: float = 0.0,
    seed: int = 0,
) -> Clustering:
    """Cluster matrix rows into k groups around medoid rows.

    Deterministic for a given seed.  Iterates membership/medoid updates
    until the medoid set reaches a fixpoint (tol is reserved) or max_iter
    passes.  After the crisp assignment a repair pass enforces the
    minimum cluster size of two, decrementing k and rerunning when that
    is impossible.
    """
    values = _as_values(matrix)
    n, p = values.shape
    partition.validate(p)
    if k < 1:
        raise ValueError("k must be >= 1")
    if m_factor <= 1.0:
        raise ValueError("fuzzifier must be > 1")
    if n < 2 * k:
        raise InfeasibleKError(f"{n} rows cannot form {k} clusters of >= 2 members")
    if np.isnan(values).any():
        raise ValueError("clustering requires a null-free matrix")

    model = _CostModel(values, partition)
    rng = np.random.default_rng(seed)
    medoids = np.sort(rng.choice(n, size=k, replace=False))

    for _ in range(max_iter):
        u = _memberships(model.shifted_to(medoids), m_factor)
        w = u ** m_factor
        new_medoids = np.empty(k, dtype=np.int64)
        taken = np.zeros(n, dtype=bool)
        for c in range(k):
            scores = model.weighted_cost_to_candidates(w[:, c])
            scores[taken] = np.inf
            new_medoids[c] = int(np.argmin(scores))
            taken[new_medoids[c]] = True
        stable = set(new_medoids.tolist()) == set(medoids.tolist())
        medoids = new_medoids
        if stable:
            break

    u = _memberships(model.shifted_to(medoids), m_factor)
    assignment = u.argmax(axis=1)
    assignment, ok = _repair_min_sizes(u, assignment, k)
    if not ok:
        return fuzzy_c_medoids(
            matrix, partition, k - 1,
            m_factor=m_factor, max_iter=max_iter, tol=tol, seed=seed)
    return Clustering(
        k=k,
        assignment=assignment,
        medoids=tuple(int(m) for m in medoids),
        memberships=u,
    )
