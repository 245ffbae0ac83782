"""Embedding intake, dimensionality reduction, and density clustering.

The clustering stage is hierarchical density-based: mutual-reachability
distances smooth local density, a minimum spanning tree plus single
linkage give the full merge hierarchy, the hierarchy is condensed with a
minimum cluster size, and flat clusters are extracted by excess-of-mass
stability.  Points in no selected cluster are noise (label -1).
"""

import csv
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import AquasiftError
from . import kernels
from .corpus import Corpus, preprocess_tokens


@dataclass(frozen=True)
class EmbeddingMatrix:
    sample_ids: tuple
    vectors: np.ndarray  # (m, d) float64

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        if vectors.ndim != 2:
            raise AquasiftError("embedding vectors must form a 2-D matrix")
        if vectors.shape[0] != len(self.sample_ids):
            raise AquasiftError(
                f"{len(self.sample_ids)} ids for {vectors.shape[0]} embedding rows"
            )
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise AquasiftError("embedding sample ids must be unique")
        if not np.all(np.isfinite(vectors)):
            raise AquasiftError("embeddings must be finite")

    @property
    def n_samples(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def subset(self, ids: Sequence[str]) -> "EmbeddingMatrix":
        index = {sid: i for i, sid in enumerate(self.sample_ids)}
        missing = [sid for sid in ids if sid not in index]
        if missing:
            raise AquasiftError(
                f"embeddings missing for {len(missing)} ids (first: {missing[0]!r})"
            )
        rows = [index[sid] for sid in ids]
        return EmbeddingMatrix(tuple(ids), self.vectors[rows])


def load_embeddings(path, expected_ids: Optional[Sequence[str]] = None) -> EmbeddingMatrix:
    """Read an embedding file (csv ``sample_id,v0,...`` or jsonl
    ``{"id": ..., "vector": [...]}``).

    Rows must share one dimension and contain only finite numbers.  When
    ``expected_ids`` is given, the file must cover exactly those ids and the
    result is reordered to match; offenders are listed in the error.
    """
    path = str(path)
    ids, rows = [], []
    if path.endswith(".jsonl"):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as e:
                    raise AquasiftError(f"line {lineno}: invalid json ({e.msg})") from None
                if "id" not in rec or "vector" not in rec:
                    raise AquasiftError(f"line {lineno}: need 'id' and 'vector' fields")
                ids.append(str(rec["id"]))
                rows.append([float(v) for v in rec["vector"]])
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "sample_id":
                raise AquasiftError("embedding csv needs a 'sample_id,v0,...' header")
            width = len(header) - 1
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != width + 1:
                    raise AquasiftError(f"line {lineno}: ragged row ({len(row) - 1} values, expected {width})")
                ids.append(row[0])
                try:
                    rows.append([float(v) for v in row[1:]])
                except ValueError:
                    raise AquasiftError(f"line {lineno}: non-numeric value") from None
    if not rows:
        raise AquasiftError("embedding file has no rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise AquasiftError(f"inconsistent embedding dimensions: {sorted(widths)}")
    vectors = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(vectors)):
        bad = ids[int(np.argwhere(~np.isfinite(vectors))[0][0])]
        raise AquasiftError(f"non-finite embedding value for id {bad!r}")
    matrix = EmbeddingMatrix(tuple(ids), vectors)
    if expected_ids is not None:
        expected = set(expected_ids)
        unknown = [sid for sid in ids if sid not in expected]
        if unknown:
            raise AquasiftError(
                f"embedding file has {len(unknown)} unknown ids: {unknown[:5]}"
            )
        matrix = matrix.subset(list(expected_ids))
    return matrix


def write_embeddings_csv(matrix: EmbeddingMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id"] + [f"v{i}" for i in range(matrix.dim)])
        for sid, row in zip(matrix.sample_ids, matrix.vectors):
            writer.writerow([sid] + [repr(float(v)) for v in row])


def _svd_flip(u: np.ndarray, vt: np.ndarray):
    """Deterministic singular-vector signs: the largest-|.| entry of each
    right singular vector is made positive."""
    signs = np.sign(vt[np.arange(vt.shape[0]), np.argmax(np.abs(vt), axis=1)])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def embed_fallback(corpus: Corpus, dim: int = 64, seed: int = 0) -> EmbeddingMatrix:
    """Self-contained document embeddings when no external file is supplied:
    TF-IDF vectors reduced to ``dim`` components by randomized truncated SVD
    (power iteration).  Deterministic for a fixed seed."""
    if dim < 2:
        raise AquasiftError("embedding dim must be >= 2")
    docs = [preprocess_tokens(t.text) for t in corpus]
    if not docs:
        raise AquasiftError("corpus is empty")
    if all(len(d) == 0 for d in docs):
        raise AquasiftError("every document is empty after preprocessing")

    vocab = sorted({tok for doc in docs for tok in doc})
    index = {tok: j for j, tok in enumerate(vocab)}
    m, v = len(docs), len(vocab)
    counts = np.zeros((m, v), dtype=np.float64)
    for i, doc in enumerate(docs):
        for tok in doc:
            counts[i, index[tok]] += 1.0
    df = np.count_nonzero(counts, axis=0)
    idf = np.log((1.0 + m) / (1.0 + df)) + 1.0
    x = counts * idf
    norms = np.linalg.norm(x, axis=1)
    nonzero = norms > 0
    x[nonzero] /= norms[nonzero, None]

    k = min(dim, m, v)
    rng = np.random.default_rng(seed)
    oversample = min(8, max(0, min(m, v) - k))
    probe = rng.normal(size=(v, k + oversample))
    y = x @ probe
    for _ in range(7):
        y, _ = np.linalg.qr(x @ (x.T @ y))
    q, _ = np.linalg.qr(y)
    b = q.T @ x
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    ub, vt = _svd_flip(ub, vt)
    u = q @ ub
    embedded = u[:, :k] * s[:k]
    if dim > k:
        embedded = np.hstack([embedded, np.zeros((m, dim - k))])
    # blocked LAPACK kernels are not row-order invariant at the last ulp;
    # force documents with identical token sequences to share a row exactly
    first_row = {}
    for i, doc in enumerate(docs):
        key = tuple(doc)
        if key in first_row:
            embedded[i] = embedded[first_row[key]]
        else:
            first_row[key] = i
    return EmbeddingMatrix(tuple(t.id for t in corpus), embedded)


def pca_reduce(matrix: EmbeddingMatrix, target_dim: int) -> EmbeddingMatrix:
    """Mean-centered projection onto the top principal components, ordered
    by explained variance descending, with deterministic component signs."""
    if target_dim <= 0:
        raise AquasiftError("target_dim must be positive")
    if target_dim > matrix.dim:
        raise AquasiftError(f"target_dim {target_dim} exceeds embedding dim {matrix.dim}")
    centered = matrix.vectors - matrix.vectors.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    u, vt = _svd_flip(u, vt)
    reduced = u[:, :target_dim] * s[:target_dim]
    return EmbeddingMatrix(matrix.sample_ids, reduced)


def explained_variances(matrix: EmbeddingMatrix) -> np.ndarray:
    """Variances along the principal components of the (centered) data."""
    centered = matrix.vectors - matrix.vectors.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    denom = max(matrix.n_samples - 1, 1)
    return (s * s) / denom


@dataclass(frozen=True)
class ClusterAssignment:
    sample_ids: tuple
    labels: np.ndarray  # int64; -1 is noise
    probabilities: np.ndarray  # float64 in [0, 1]

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size and self.labels.max() >= 0 else 0

    def members(self, cluster: int) -> list:
        return [sid for sid, lab in zip(self.sample_ids, self.labels) if lab == cluster]

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_id", "cluster", "probability"])
            for sid, lab, prob in zip(self.sample_ids, self.labels, self.probabilities):
                writer.writerow([sid, int(lab), repr(float(prob))])


@dataclass(frozen=True)
class CondensedTree:
    """Condensed cluster hierarchy: one row per child falling out of (or
    splitting off) its parent cluster at density level lambda = 1/distance."""

    parent: np.ndarray
    child: np.ndarray
    lambda_val: np.ndarray
    child_size: np.ndarray
    stability: dict
    selected: tuple


def mutual_reachability_matrix(vectors: np.ndarray, min_samples: int) -> np.ndarray:
    """Pairwise mutual reachability: max of the two core distances and the
    raw Euclidean distance.  The core distance of a point is the distance
    to its min_samples-th nearest neighbor, counting the point itself."""
    if min_samples < 1:
        raise AquasiftError("min_samples must be >= 1")
    dist = kernels.pairwise_distances(np.asarray(vectors, dtype=np.float64))
    core = kernels.core_distances(dist, min_samples)
    return kernels.mutual_reachability(dist, core)


def mst_edges(weights: np.ndarray) -> np.ndarray:
    """Minimum spanning tree edges (u, v, weight) of a dense symmetric
    weight matrix; exposed so the MST step can be verified on its own."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise AquasiftError("weight matrix must be square")
    if weights.shape[0] < 2:
        raise AquasiftError("need at least 2 points for a spanning tree")
    return kernels.prim_mst(weights)


def _single_linkage(edges: np.ndarray, m: int) -> np.ndarray:
    """Merge sorted MST edges into a dendrogram.

    Row i merges two current components into node ``m + i``; columns are
    (left node, right node, distance, merged size).

    Ties in edge weight are common under mutual reachability (a point's
    core distance often dominates several pairs); numpy's default argsort
    decides their order, which fixes the tree shape deterministically."""
    order = np.argsort(edges[:, 2])
    parent = np.full(2 * m - 1, -1, dtype=np.int64)
    size = np.ones(2 * m - 1, dtype=np.int64)
    merges = np.empty((m - 1, 4), dtype=np.float64)

    def find(x: int) -> int:
        root = x
        while parent[root] != -1:
            root = parent[root]
        while parent[x] != -1:
            parent[x], x = root, parent[x]
        return root

    nxt = m
    for row, idx in enumerate(order):
        u, v, w = int(edges[idx, 0]), int(edges[idx, 1]), edges[idx, 2]
        ru, rv = find(u), find(v)
        merges[row] = (ru, rv, w, size[ru] + size[rv])
        parent[ru] = parent[rv] = nxt
        size[nxt] = size[ru] + size[rv]
        nxt += 1
    return merges


def _leaves_under(node: int, merges: np.ndarray, m: int) -> list:
    out, stack = [], [node]
    while stack:
        cur = stack.pop()
        if cur < m:
            out.append(cur)
        else:
            row = merges[cur - m]
            stack.extend((int(row[0]), int(row[1])))
    return out


def _condense(merges: np.ndarray, m: int, min_cluster_size: int):
    """Prune the dendrogram: only splits where both sides have at least
    min_cluster_size points create new clusters; smaller sides fall out of
    the parent as individual points.  Cluster ids start at m (the root)."""
    root = 2 * m - 2
    relabel = {root: m}
    next_label = m + 1
    rows_parent, rows_child, rows_lambda, rows_size = [], [], [], []
    queue = [root]
    while queue:
        node = queue.pop(0)
        if node < m:
            continue
        left, right, dist = int(merges[node - m][0]), int(merges[node - m][1]), merges[node - m][2]
        lam = 1.0 / dist if dist > 0.0 else np.inf
        left_count = int(merges[left - m][3]) if left >= m else 1
        right_count = int(merges[right - m][3]) if right >= m else 1
        label = relabel[node]
        both_big = left_count >= min_cluster_size and right_count >= min_cluster_size

        for side, count in ((left, left_count), (right, right_count)):
            if both_big:
                # a true split: each side becomes a new cluster
                relabel[side] = next_label
                rows_parent.append(label)
                rows_child.append(next_label)
                rows_lambda.append(lam)
                rows_size.append(count)
                next_label += 1
                queue.append(side)
            elif count >= min_cluster_size:
                # the big side carries the parent cluster onward
                relabel[side] = label
                queue.append(side)
            else:
                # too small to be a cluster: its points fall out one by one
                for point in _leaves_under(side, merges, m):
                    rows_parent.append(label)
                    rows_child.append(point)
                    rows_lambda.append(lam)
                    rows_size.append(1)

    return (
        np.asarray(rows_parent, dtype=np.int64),
        np.asarray(rows_child, dtype=np.int64),
        np.asarray(rows_lambda, dtype=np.float64),
        np.asarray(rows_size, dtype=np.int64),
    )


def _compute_stability(parent, child, lam, size, m: int) -> dict:
    """Excess-of-mass stability per cluster: sum over children of
    (lambda_child - lambda_birth(cluster)) * child_size."""
    births = {}
    for c, value in zip(child, lam):
        if c >= m:
            births[int(c)] = float(value)
    clusters = sorted(set(int(p) for p in parent))
    if clusters:
        births.setdefault(clusters[0], 0.0)
    stability = {c: 0.0 for c in clusters}
    for p, value, sz in zip(parent, lam, size):
        stability[int(p)] += (float(value) - births[int(p)]) * int(sz)
    return stability


def _select_eom(parent, child, size, stability: dict, m: int) -> set:
    """Excess-of-mass flat-cluster selection, root excluded.

    Bottom-up: a cluster whose stability is at least the summed stability
    of its child clusters is selected and its descendants deselected;
    otherwise its stability is replaced by that sum."""
    if not stability:
        return set()
    root = min(stability)
    children_of = {}
    for p, c, sz in zip(parent, child, size):
        if int(c) >= m:
            children_of.setdefault(int(p), []).append(int(c))

    scores = dict(stability)
    is_selected = {c: True for c in stability if c != root}
    for node in sorted(is_selected, reverse=True):
        subtree = sum(scores[c] for c in children_of.get(node, []))
        if subtree > scores[node]:
            is_selected[node] = False
            scores[node] = subtree
        else:
            stack = list(children_of.get(node, []))
            while stack:
                sub = stack.pop()
                is_selected[sub] = False
                stack.extend(children_of.get(sub, []))
    return {c for c, flag in is_selected.items() if flag}


def _assign(parent, child, lam, m: int, selected: set, sample_count: int):
    """Point labels and membership strengths from the condensed tree and the
    selected cluster set.  Selected clusters are renumbered 0..K-1 in
    condensed-id order; unclaimed points are noise."""
    cluster_ids = sorted(selected)
    id_map = {c: i for i, c in enumerate(cluster_ids)}
    parent_of = {}
    for p, c in zip(parent, child):
        if int(c) >= m:
            parent_of[int(c)] = int(p)

    # 'death' of a cluster: the largest lambda among its direct children
    deaths = {}
    for p, value in zip(parent, lam):
        p = int(p)
        if value > deaths.get(p, 0.0):
            deaths[p] = float(value)

    labels = np.full(sample_count, -1, dtype=np.int64)
    lambdas = np.zeros(sample_count, dtype=np.float64)
    for p, c, value in zip(parent, child, lam):
        c = int(c)
        if c >= m:
            continue
        node = int(p)
        while node is not None and node not in selected:
            node = parent_of.get(node)
        if node is not None:
            labels[c] = id_map[node]
            lambdas[c] = float(value)

    probabilities = np.zeros(sample_count, dtype=np.float64)
    for k, cluster in enumerate(cluster_ids):
        members = labels == k
        if not members.any():
            continue
        max_lambda = deaths.get(cluster, 0.0)
        if not np.isfinite(max_lambda) or max_lambda <= 0.0:
            probabilities[members] = 1.0
        else:
            probabilities[members] = np.minimum(lambdas[members], max_lambda) / max_lambda
    return labels, probabilities


def hdbscan(
    matrix: EmbeddingMatrix,
    min_cluster_size: int = 10,
    min_samples: int = 5,
    metric: str = "euclidean",
):
    """Density clustering of an embedding matrix.

    Returns (assignment, condensed tree).  Fewer points than
    ``min_cluster_size`` is not an error: everything is labeled noise, so
    batch runs over small groups never abort.  ``metric="cosine"``
    L2-normalizes rows first and proceeds with Euclidean geometry.
    """
    if min_cluster_size < 2:
        raise AquasiftError("min_cluster_size must be >= 2")
    if min_samples < 1:
        raise AquasiftError("min_samples must be >= 1")
    if metric not in ("euclidean", "cosine"):
        raise AquasiftError(f"unknown metric {metric!r}")

    m = matrix.n_samples
    if m == 0:
        raise AquasiftError("cannot cluster an empty matrix")
    vectors = matrix.vectors
    if metric == "cosine":
        norms = np.linalg.norm(vectors, axis=1)
        vectors = vectors.copy()
        nonzero = norms > 0
        vectors[nonzero] /= norms[nonzero, None]

    empty_tree = CondensedTree(
        parent=np.empty(0, dtype=np.int64),
        child=np.empty(0, dtype=np.int64),
        lambda_val=np.empty(0, dtype=np.float64),
        child_size=np.empty(0, dtype=np.int64),
        stability={},
        selected=(),
    )
    if m < min_cluster_size:
        assignment = ClusterAssignment(
            matrix.sample_ids,
            np.full(m, -1, dtype=np.int64),
            np.zeros(m, dtype=np.float64),
        )
        return assignment, empty_tree

    mreach = mutual_reachability_matrix(vectors, min_samples)
    edges = kernels.prim_mst(mreach)
    merges = _single_linkage(edges, m)
    parent, child, lam, size = _condense(merges, m, min_cluster_size)
    stability = _compute_stability(parent, child, lam, size, m)
    selected = _select_eom(parent, child, size, stability, m)
    labels, probabilities = _assign(parent, child, lam, m, selected, m)

    tree = CondensedTree(
        parent=parent,
        child=child,
        lambda_val=lam,
        child_size=size,
        stability=stability,
        selected=tuple(sorted(selected)),
    )
    return ClusterAssignment(matrix.sample_ids, labels, probabilities), tree
