"""Fused pairwise kernels for large matrices.

Both kernels avoid materializing the full n x n pair-cost matrix.  With
numba they run as parallel fused loops; without it they fall back to
chunked scipy passes computing the same quantities.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

_CHUNK = 512


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _pair_sums_nb(values, assignment, k, cmp_idx, grp_idx):
        n = values.shape[0]
        sig_part = np.zeros((n, k))
        sqd_part = np.zeros((n, k))
        for j in prange(n):
            cj = assignment[j]
            for l in range(j + 1, n):
                if assignment[l] == cj:
                    s = 0.0
                    for t in range(cmp_idx.size):
                        s += abs(values[j, cmp_idx[t]] - values[l, cmp_idx[t]])
                    q = 0.0
                    for t in range(grp_idx.size):
                        d = values[j, grp_idx[t]] - values[l, grp_idx[t]]
                        q += d * d
                    sig_part[j, cj] += s
                    sqd_part[j, cj] += q
        sig = np.zeros(k)
        sqd = np.zeros(k)
        for j in range(n):
            for c in range(k):
                sig[c] += sig_part[j, c]
                sqd[c] += sqd_part[j, c]
        return sig, sqd

    @njit(cache=True, parallel=True)
    def _min_pair_cost_nb(values, grp_idx, cmp_idx, w_dist, w_sig):
        # the cost is symmetric, so scanning l >= j covers every pair
        n = values.shape[0]
        mins = np.full(n, np.inf)
        for j in prange(n):
            best = np.inf
            for l in range(j, n):
                q = 0.0
                for t in range(grp_idx.size):
                    d = values[j, grp_idx[t]] - values[l, grp_idx[t]]
                    q += d * d
                s = 0.0
                for t in range(cmp_idx.size):
                    s += abs(values[j, cmp_idx[t]] - values[l, cmp_idx[t]])
                c = w_dist * q - w_sig * s
                if c < best:
                    best = c
            mins[j] = best
        return mins.min()


def pair_sums_by_cluster(values, assignment, k, cmp_idx, grp_idx):
    """Per-cluster unordered-pair sums of |delta| (compare) and delta^2 (group)."""
    if _HAVE_NUMBA:
        return _pair_sums_nb(values, assignment, k, cmp_idx, grp_idx)
    from scipy.spatial.distance import pdist

    sig = np.zeros(k)
    sqd = np.zeros(k)
    for c in range(k):
        rows = np.flatnonzero(assignment == c)
        if rows.size < 2:
            continue
        sub = values[rows]
        if cmp_idx.size:
            sig[c] = pdist(sub[:, cmp_idx], metric="cityblock").sum()
        if grp_idx.size:
            sqd[c] = pdist(sub[:, grp_idx], metric="sqeuclidean").sum()
    return sig, sqd


def min_pair_cost(values, grp_idx, cmp_idx, w_dist, w_sig):
    """Global minimum of the blended pair cost over all (row, row) pairs."""
    if _HAVE_NUMBA:
        return float(_min_pair_cost_nb(values, grp_idx, cmp_idx, w_dist, w_sig))
    from scipy.spatial.distance import cdist

    n = values.shape[0]
    best = np.inf
    xg = values[:, grp_idx] if grp_idx.size else None
    xs = values[:, cmp_idx] if cmp_idx.size else None
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        block = np.zeros((stop - start, n))
        if xg is not None:
            block += w_dist * cdist(xg[start:stop], xg, metric="sqeuclidean")
        if xs is not None:
            block -= w_sig * cdist(xs[start:stop], xs, metric="cityblock")
        best = min(best, float(block.min()))
    return best
