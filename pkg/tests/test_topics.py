import math

import numpy as np
import pytest

from aquasift import AquasiftError
from aquasift.topics import (
    class_term_stats,
    ctfidf,
    extract_topics,
    top_topics,
    topics_to_csv_rows,
    topics_to_dict,
)


class TestCtfidf:
    def test_worked_example_two_clusters(self):
        # cluster 0: "pipe" x4 plus 6 other tokens; cluster 1: 6 tokens, no "pipe"
        docs = [["pipe"] * 4 + [f"a{i}" for i in range(6)], [f"b{i}" for i in range(6)]]
        weights = ctfidf(docs, [0, 1])
        assert weights[0]["pipe"] == pytest.approx(4 * math.log(3.0), abs=1e-9)

    def test_worked_example_single_cluster(self):
        weights = ctfidf([["drought"]], [0])
        assert weights[0]["drought"] == pytest.approx(math.log(2.0), abs=1e-9)

    def test_absent_term_has_no_weight(self):
        weights = ctfidf([["alpha"], ["beta"]], [0, 1])
        assert "beta" not in weights[0]
        assert "alpha" not in weights[1]

    def test_noise_documents_excluded(self):
        docs = [["clean"], ["noisewords", "everywhere"]]
        stats = class_term_stats(docs, [0, -1])
        assert "noisewords" not in stats.f
        assert stats.cluster_sizes == {0: 1}

    def test_all_noise_rejected(self):
        with pytest.raises(AquasiftError):
            ctfidf([["a"], ["b"]], [-1, -1])

    def test_length_mismatch(self):
        with pytest.raises(AquasiftError):
            ctfidf([["a"]], [0, 1])

    def test_term_totals_consistent(self):
        rng = np.random.default_rng(0)
        vocab = [f"w{i}" for i in range(12)]
        docs = [list(rng.choice(vocab, size=rng.integers(1, 15))) for _ in range(30)]
        labels = rng.integers(-1, 3, size=30)
        if not (labels >= 0).any():
            labels[0] = 0
        stats = class_term_stats(docs, labels)
        for term, total in stats.f.items():
            assert total == sum(c.get(term, 0) for c in stats.tf.values())

    def test_weight_increases_with_tf(self):
        docs = [["pipe"] * 2 + ["filler"] * 4, ["pipe"] * 5 + ["filler"] * 1]
        w = ctfidf(docs, [0, 1])
        # f and A are shared between the clusters; only tf differs
        assert w[1]["pipe"] > w[0]["pipe"]

    def test_duplication_preserves_rankings(self):
        rng = np.random.default_rng(42)
        for trial in range(20):
            vocab = [f"w{i}" for i in range(rng.integers(5, 20))]
            n_docs = int(rng.integers(4, 25))
            docs = [list(rng.choice(vocab, size=rng.integers(1, 12))) for _ in range(n_docs)]
            labels = [int(x) for x in rng.integers(0, 3, size=n_docs)]
            single = ctfidf(docs, labels)
            doubled = ctfidf(docs + docs, labels + labels)
            for cluster, weights in single.items():
                order = sorted(weights, key=lambda t: (-weights[t], t))
                order2 = sorted(doubled[cluster], key=lambda t: (-doubled[cluster][t], t))
                assert order == order2
                for term in weights:
                    assert doubled[cluster][term] == pytest.approx(2 * weights[term], rel=1e-12)


class TestTopTopics:
    def test_fewer_clusters_than_requested(self):
        docs = [["a"], ["b"], ["c"]]
        topics = extract_topics(docs, [0, 1, 2], n_topics=10)
        assert len(topics) == 3

    def test_single_term_topic(self):
        topics = extract_topics([["drought"]], [0])
        assert topics[0].terms == ((u"drought", pytest.approx(math.log(2.0))),)

    def test_cluster_ranking_by_size(self):
        docs = [["a"], ["b"], ["b2"], ["c"], ["c2"], ["c3"]]
        labels = [0, 1, 1, 2, 2, 2]
        topics = extract_topics(docs, labels)
        assert [t.cluster_id for t in topics] == [2, 1, 0]

    def test_size_tie_breaks_on_cluster_id(self):
        docs = [["a"], ["b"]]
        topics = extract_topics(docs, [1, 0])
        assert [t.cluster_id for t in topics] == [0, 1]

    def test_term_tie_breaks_lexicographic(self):
        docs = [["zed", "apple"]]
        topics = extract_topics(docs, [0])
        assert [term for term, _ in topics[0].terms] == ["apple", "zed"]

    def test_n_terms_cap(self):
        docs = [[f"t{i}" for i in range(30)]]
        topics = extract_topics(docs, [0], n_terms=5)
        assert len(topics[0].terms) == 5

    def test_validation(self):
        with pytest.raises(AquasiftError):
            top_topics({0: {"a": 1.0}}, {0: 1}, n_topics=0)

    def test_seeded_theme_recovery(self):
        docs = (
            [["drought", "farm", "dry"]] * 6
            + [["plastic", "bottle", "ocean"]] * 5
            + [["chlorine", "tap", "smell"]] * 4
        )
        labels = [0] * 6 + [1] * 5 + [2] * 4
        topics = extract_topics(docs, labels, n_topics=3, n_terms=1)
        top_terms = {t.cluster_id: t.terms[0][0] for t in topics}
        assert top_terms[0] in ("drought", "dry", "farm")
        assert top_terms[1] in ("plastic", "bottle", "ocean")
        assert top_terms[2] in ("chlorine", "tap", "smell")


class TestExports:
    def test_dict_shape(self):
        topics = extract_topics([["water", "pipe"]], [0])
        payload = topics_to_dict(topics)
        assert payload[0]["cluster_id"] == 0
        assert payload[0]["size"] == 1
        assert {"term", "weight"} == set(payload[0]["terms"][0])

    def test_csv_rows(self):
        topics = extract_topics([["water"], ["pipe"], ["pipe2"]], [0, 1, 1])
        rows = topics_to_csv_rows(topics)
        assert all(len(r) == 3 for r in rows)
        assert {r[2] for r in rows} == {0, 1}
