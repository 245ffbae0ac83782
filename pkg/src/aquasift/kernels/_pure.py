"""Pure numpy implementations of the hot kernels.

Same signatures as the compiled twin in ``_native.pyx``; the package picks
one at import time (see ``aquasift.kernels``).  Everything here is
vectorized, so the fallback is usable for real corpora, just slower than
the compiled core on large inputs.
"""

import numpy as np

BACKEND = "pure"


def pairwise_distances(x):
    """Dense m x m Euclidean distance matrix for an (m, d) float array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)

def core_distances(dist, min_samples):
    """Per-point distance to the min_samples-th nearest neighbor.

    The point itself counts as its own first neighbor (distance 0), so
    ``min_samples=1`` gives all zeros.  ``min_samples`` is clamped to the
    number of points.
    """
    m = dist.shape[0]
    k = min(int(min_samples), m)
    if k <= 1:
        return np.zeros(m, dtype=np.float64)
    return np.partition(dist, k - 1, axis=1)[:, k - 1]


def mutual_reachability(dist, core):
    """max(core[i], core[j], dist[i, j]) for every pair, diagonal zeroed."""
    mr = np.maximum(dist, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mr, 0.0)
    return mr


def prim_mst(weights):
    """Minimum spanning tree of a dense symmetric weight matrix via Prim.

    Returns an (m-1, 3) float64 array of (u, v, weight) rows in the order
    edges were added, starting from vertex 0.
    """
    m = weights.shape[0]
    if m < 2:
        raise ValueError("prim_mst needs at least 2 points")
    in_tree = np.zeros(m, dtype=bool)
    best_dist = np.full(m, np.inf)
    best_from = np.zeros(m, dtype=np.int64)
    edges = np.empty((m - 1, 3), dtype=np.float64)

    current = 0
    in_tree[0] = True
    for step in range(m - 1):
        row = weights[current]
        closer = ~in_tree & (row < best_dist)
        best_dist[closer] = row[closer]
        best_from[closer] = current
        masked = np.where(in_tree, np.inf, best_dist)
        nxt = int(np.argmin(masked))
        edges[step, 0] = best_from[nxt]
        edges[step, 1] = nxt
        edges[step, 2] = best_dist[nxt]
        in_tree[nxt] = True
        current = nxt
    return edges


def fused_error_count(scores, weights, truth, threshold):
    """Number of misclassified samples after weighted score fusion.

    ``scores`` is (n_models, m) with entries in [0, 1], ``weights`` is a
    simplex-normalized (n_models,) vector, ``truth`` is (m,) uint8 with 1
    for the positive class.  Predicts positive when the fused score is
    >= threshold.
    """
    fused = weights @ scores
    preds = fused >= threshold
    return int(np.count_nonzero(preds != truth.astype(bool)))
