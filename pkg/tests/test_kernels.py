import os
import subprocess
import sys

import numpy as np
import pytest

from aquasift import kernels
from aquasift.kernels import _pure

try:
    from aquasift.kernels import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None, reason="compiled extension not built")


def problem(m=60, d=5, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(m, d))


class TestPureBackend:
    def test_pairwise_zero_diagonal_symmetric(self):
        d = _pure.pairwise_distances(problem())
        assert np.all(np.diag(d) == 0.0)
        assert np.array_equal(d, d.T)
        assert np.all(d >= 0.0)

    def test_core_distances_include_self(self):
        x = np.array([[0.0], [1.0], [3.0], [10.0]])
        d = _pure.pairwise_distances(x)
        assert np.array_equal(_pure.core_distances(d, 1), np.zeros(4))
        assert np.array_equal(_pure.core_distances(d, 2), [1.0, 1.0, 2.0, 7.0])

    def test_core_clamped_to_sample_count(self):
        x = np.array([[0.0], [2.0]])
        d = _pure.pairwise_distances(x)
        assert np.array_equal(_pure.core_distances(d, 99), [2.0, 2.0])

    def test_prim_requires_two_points(self):
        with pytest.raises(ValueError):
            _pure.prim_mst(np.zeros((1, 1)))

    def test_fused_error_counts(self):
        scores = np.array([[0.9, 0.1, 0.6], [0.8, 0.2, 0.4]])
        truth = np.array([1, 0, 0], dtype=np.uint8)
        assert _pure.fused_error_count(scores, np.array([0.5, 0.5]), truth, 0.5) == 1


@needs_native
class TestBackendParity:
    def test_pairwise_allclose(self):
        x = problem()
        assert np.allclose(_pure.pairwise_distances(x), _native.pairwise_distances(x), atol=1e-12)

    def test_core_distances_match(self):
        x = problem()
        d_p = _pure.pairwise_distances(x)
        d_n = _native.pairwise_distances(x)
        for k in (1, 3, 7):
            assert np.allclose(_pure.core_distances(d_p, k), _native.core_distances(d_n, k), atol=1e-12)

    def test_mutual_reachability_match(self):
        x = problem()
        d = _pure.pairwise_distances(x)
        core = _pure.core_distances(d, 4)
        assert np.allclose(
            _pure.mutual_reachability(d, core), _native.mutual_reachability(d, core), atol=0
        )

    def test_mst_totals_match(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.normal(size=(int(rng.integers(4, 50)), 3))
            d = _pure.pairwise_distances(x)
            t_pure = _pure.prim_mst(d)[:, 2].sum()
            t_native = _native.prim_mst(d)[:, 2].sum()
            assert t_pure == pytest.approx(t_native, abs=1e-9)

    def test_identical_input_identical_mst_edges(self):
        x = problem(40, 4, seed=9)
        d = _pure.pairwise_distances(x)
        assert np.array_equal(_pure.prim_mst(d), _native.prim_mst(d))

    def test_fused_error_equal(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n, m = int(rng.integers(1, 6)), int(rng.integers(1, 200))
            scores = rng.random((n, m))
            w = rng.random(n)
            w = w / w.sum()
            truth = (rng.random(m) > 0.5).astype(np.uint8)
            thr = float(rng.uniform(0.2, 0.8))
            assert _pure.fused_error_count(scores, w, truth, thr) == _native.fused_error_count(
                scores, w, truth, thr
            )


class TestBackendSelection:
    def test_backend_reported(self):
        assert kernels.BACKEND in ("pure", "native")

    def test_env_forces_pure(self):
        code = "from aquasift import kernels; print(kernels.BACKEND)"
        env = dict(os.environ, AQUASIFT_PURE_KERNELS="1")
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
        )
        assert out.stdout.strip() == "pure"
