"""Class-based TF-IDF topic extraction from clustered documents.

Each non-noise cluster is treated as one pseudo-document; a term's weight
in a cluster is its within-cluster frequency discounted by its frequency
across all clusters:

    weight(term, cluster) = tf[term, cluster] * ln(1 + A / f[term])

where f[term] is the term's total count over all non-noise clusters and A
is the average token count per cluster.  Noise documents (cluster -1) are
excluded throughout.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

from . import AquasiftError


@dataclass(frozen=True)
class ClassTermStats:
    """Per-(term, cluster) counts, per-term totals, and the average token
    count per cluster."""

    tf: dict  # cluster -> Counter(term -> count)
    f: Counter  # term -> total count across clusters
    average_tokens: float
    cluster_sizes: dict  # cluster -> number of member documents


@dataclass(frozen=True)
class Topic:
    cluster_id: int
    size: int
    terms: tuple  # ((term, weight), ...) weight descending


def class_term_stats(token_docs: Sequence[Sequence[str]], labels: Sequence[int]) -> ClassTermStats:
    """Aggregate token counts per cluster, skipping noise (-1)."""
    if len(token_docs) != len(labels):
        raise AquasiftError(
            f"{len(token_docs)} documents vs {len(labels)} cluster labels"
        )
    tf = defaultdict(Counter)
    sizes = defaultdict(int)
    for doc, label in zip(token_docs, labels):
        label = int(label)
        if label < 0:
            continue
        tf[label].update(doc)
        sizes[label] += 1
    if not tf:
        raise AquasiftError("no documents in non-noise clusters")
    f = Counter()
    total_tokens = 0
    for counter in tf.values():
        f.update(counter)
        total_tokens += sum(counter.values())
    average = total_tokens / len(tf)
    return ClassTermStats(tf=dict(tf), f=f, average_tokens=average, cluster_sizes=dict(sizes))


def ctfidf(token_docs: Sequence[Sequence[str]], labels: Sequence[int]) -> dict:
    """Per-cluster term weights: tf * ln(1 + A / f), natural log.

    Returns {cluster_id: {term: weight}}.  Terms absent from a cluster get
    no entry (their weight is zero by definition).
    """
    stats = class_term_stats(token_docs, labels)
    weights = {}
    for cluster, counter in stats.tf.items():
        weights[cluster] = {
            term: count * math.log(1.0 + stats.average_tokens / stats.f[term])
            for term, count in counter.items()
        }
    return weights


def top_topics(
    weights: dict,
    cluster_sizes: dict,
    n_topics: int = 10,
    n_terms: int = 10,
) -> list:
    """Rank clusters by member count (ties by cluster id) and terms within
    each cluster by weight (ties lexicographic).  Fewer clusters than
    ``n_topics`` just returns them all."""
    if n_topics < 1 or n_terms < 1:
        raise AquasiftError("n_topics and n_terms must be >= 1")
    ranked_clusters = sorted(weights, key=lambda c: (-cluster_sizes.get(c, 0), c))
    topics = []
    for cluster in ranked_clusters[:n_topics]:
        ranked_terms = sorted(weights[cluster].items(), key=lambda kv: (-kv[1], kv[0]))
        topics.append(
            Topic(
                cluster_id=int(cluster),
                size=int(cluster_sizes.get(cluster, 0)),
                terms=tuple((t, float(w)) for t, w in ranked_terms[:n_terms]),
            )
        )
    return topics


def extract_topics(
    token_docs: Sequence[Sequence[str]],
    labels: Sequence[int],
    n_topics: int = 10,
    n_terms: int = 10,
) -> list:
    """One-shot: statistics, weights, ranking."""
    stats = class_term_stats(token_docs, labels)
    weights = ctfidf(token_docs, labels)
    return top_topics(weights, stats.cluster_sizes, n_topics=n_topics, n_terms=n_terms)


def topics_to_dict(topics: Sequence[Topic]) -> list:
    """JSON-ready structure: cluster id, size, ranked (term, weight) pairs."""
    return [
        {
            "cluster_id": t.cluster_id,
            "size": t.size,
            "terms": [{"term": term, "weight": weight} for term, weight in t.terms],
        }
        for t in topics
    ]


def topics_to_csv_rows(topics: Sequence[Topic]) -> list:
    """Plot-ready rows (term, weight, topic) for bar-chart rendering."""
    rows = []
    for rank, t in enumerate(topics):
        for term, weight in t.terms:
            rows.append((term, weight, rank))
    return rows
