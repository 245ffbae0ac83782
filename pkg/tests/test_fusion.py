import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from aquasift import AquasiftError
from aquasift.fusion import (
    ScoreMatrix,
    decide,
    fuse,
    labels_for,
    normalize_weights,
    read_labels_csv,
    read_scores_csv,
    select_top_k,
    simple_average,
    write_scores_csv,
)
from aquasift.metrics import EvalReport


def matrix_of(values):
    values = np.asarray(values, dtype=np.float64)
    return ScoreMatrix(
        tuple(f"m{i}" for i in range(values.shape[0])),
        tuple(f"s{j}" for j in range(values.shape[1])),
        values,
    )


score_matrices = hnp.arrays(
    np.float64,
    st.tuples(st.integers(1, 5), st.integers(1, 30)),
    elements=st.floats(0, 1, allow_nan=False),
)


class TestScoreMatrix:
    def test_out_of_range_rejected(self):
        with pytest.raises(AquasiftError):
            matrix_of([[1.2]])

    def test_nan_rejected(self):
        with pytest.raises(AquasiftError):
            matrix_of([[np.nan]])

    def test_duplicate_model_names(self):
        with pytest.raises(AquasiftError):
            ScoreMatrix(("a", "a"), ("s0",), np.array([[0.1], [0.2]]))

    def test_shape_checked(self):
        with pytest.raises(AquasiftError):
            ScoreMatrix(("a",), ("s0", "s1"), np.array([[0.1]]))

    def test_column_and_select(self):
        m = matrix_of([[0.1, 0.2], [0.3, 0.4]])
        assert np.array_equal(m.column("m1"), [0.3, 0.4])
        sub = m.select_models(["m1"])
        assert sub.model_names == ("m1",)
        with pytest.raises(AquasiftError):
            m.column("nope")


class TestFuse:
    def test_identity_weight(self):
        m = matrix_of([[0.2, 0.9], [0.5, 0.5]])
        assert np.array_equal(fuse(m, [1, 0]), m.values[0])

    def test_arithmetic(self):
        m = matrix_of([[0.8], [0.4]])
        assert fuse(m, [0.5, 0.5])[0] == pytest.approx(0.6)

    def test_scale_invariance_exact(self):
        m = matrix_of([[0.8, 0.3], [0.4, 0.9]])
        assert np.array_equal(fuse(m, [2, 2]), fuse(m, [0.5, 0.5]))

    def test_all_zero_weights(self):
        m = matrix_of([[0.5]])
        with pytest.raises(AquasiftError):
            fuse(m, [0.0])

    def test_negative_weights(self):
        m = matrix_of([[0.5], [0.5]])
        with pytest.raises(AquasiftError):
            fuse(m, [0.7, -0.1])

    @given(score_matrices)
    @settings(max_examples=60, deadline=None)
    def test_convex_combination_bounds(self, values):
        m = matrix_of(values)
        rng = np.random.default_rng(0)
        w = rng.random(m.n_models) + 1e-9
        fused = fuse(m, w)
        assert np.all(fused <= values.max(axis=0) + 1e-12)
        assert np.all(fused >= values.min(axis=0) - 1e-12)

    @given(score_matrices)
    @settings(max_examples=40, deadline=None)
    def test_identical_columns_fixed_point(self, values):
        column = values[0]
        stacked = matrix_of(np.tile(column, (3, 1)))
        fused = fuse(stacked, [0.2, 0.3, 0.5])
        assert np.allclose(fused, column, atol=1e-12)


class TestDecide:
    def test_threshold_inclusive(self):
        assert decide(np.array([0.5]), 0.5) == ["relevant"]

    def test_below(self):
        assert decide(np.array([0.49]), 0.5) == ["irrelevant"]

    def test_all_ones(self):
        assert decide(np.ones(4)) == ["relevant"] * 4

    def test_threshold_range(self):
        with pytest.raises(AquasiftError):
            decide(np.array([0.5]), 1.0)


class TestSimpleAverage:
    def test_single_model_unchanged(self):
        m = matrix_of([[0.3, 0.7]])
        assert np.array_equal(simple_average(m), m.values[0])

    def test_arithmetic(self):
        m = matrix_of([[0.2], [0.4], [0.6]])
        assert simple_average(m)[0] == pytest.approx(0.4)

    def test_equals_uniform_fuse_bitwise(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = matrix_of(rng.random((int(rng.integers(1, 6)), int(rng.integers(1, 40)))))
            assert np.array_equal(simple_average(m), fuse(m, np.ones(m.n_models)))


class TestSelectTopK:
    # validation F1 values of the five fine-tuned models, used as ranking input
    REPORTS = {
        "BERT": 0.7686,
        "ALBERT": 0.7636,
        "DistilBERT": 0.7491,
        "RoBERTa": 0.7541,
        "XLNET": 0.76,
    }

    def _reports(self, f1s):
        return {
            name: EvalReport(accuracy=0, error=1, precision=0, recall=0, f1=f1)
            for name, f1 in f1s.items()
        }

    def test_top_two(self):
        assert select_top_k(self._reports(self.REPORTS), 2) == ["BERT", "ALBERT"]

    def test_top_five(self):
        top = select_top_k(self._reports(self.REPORTS), 5)
        assert top[0] == "BERT"
        assert sorted(top) == sorted(self.REPORTS)

    def test_tie_breaks_alphabetically(self):
        top = select_top_k(self._reports({"zeta": 0.5, "alpha": 0.5}), 2)
        assert top == ["alpha", "zeta"]

    def test_k_zero(self):
        with pytest.raises(AquasiftError):
            select_top_k(self._reports(self.REPORTS), 0)

    def test_k_too_large(self):
        with pytest.raises(AquasiftError):
            select_top_k(self._reports(self.REPORTS), 6)


class TestIO:
    def test_scores_roundtrip(self, tmp_path):
        m = matrix_of(np.random.default_rng(0).random((3, 7)))
        path = tmp_path / "scores.csv"
        write_scores_csv(m, path)
        back = read_scores_csv(path)
        assert back.model_names == m.model_names
        assert back.sample_ids == m.sample_ids
        assert np.array_equal(back.values, m.values)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("id,m1\nx,0.5\n")
        with pytest.raises(AquasiftError):
            read_scores_csv(path)

    def test_labels_alignment_errors(self, tmp_path):
        m = matrix_of([[0.5, 0.5]])
        with pytest.raises(AquasiftError, match="missing"):
            labels_for(m, {"s0": "relevant"})
        with pytest.raises(AquasiftError, match="absent"):
            labels_for(m, {"s0": "relevant", "s1": "relevant", "ghost": "relevant"})

    def test_labels_csv(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("sample_id,label\ns0,relevant\ns1,irrelevant\n")
        assert read_labels_csv(path) == {"s0": "relevant", "s1": "irrelevant"}


class TestNormalize:
    def test_sum_one(self):
        w = normalize_weights([3.0, 1.0])
        assert w.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(w >= 0) and np.all(w <= 1)
