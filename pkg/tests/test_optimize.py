from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from aquasift import AquasiftError
from aquasift.fusion import ScoreMatrix
from aquasift.metrics import fitness_error
from aquasift.optimize import (
    OptimizerConfig,
    grid_search_oracle,
    lbfgs,
    nelder_mead,
    particle_swarm,
    powell,
    run_method,
)

sphere = lambda x: float(np.sum(np.asarray(x) ** 2))
rosenbrock = lambda x: float(100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2)
shifted = lambda x: float((x[0] - 0.25) ** 2 + (x[1] - 0.75) ** 2)


def random_fusion_problem(rng, n_models, n_samples):
    values = rng.random((n_models, n_samples))
    labels = ["relevant" if v else "irrelevant" for v in rng.random(n_samples) > 0.5]
    matrix = ScoreMatrix(
        tuple(f"m{i}" for i in range(n_models)),
        tuple(f"s{j}" for j in range(n_samples)),
        values,
    )

    def objective(w):
        w = np.clip(np.asarray(w, dtype=np.float64), 0.0, 1.0)
        if w.sum() <= 0:
            return 1.0
        return fitness_error(w, matrix, labels)

    return objective


class TestParticleSwarm:
    def test_sphere(self):
        r = particle_swarm(sphere, 3, OptimizerConfig(bounds=(-5.0, 5.0)))
        assert r.best_error < 1e-3

    def test_deterministic(self):
        cfg = lambda: OptimizerConfig(bounds=(-5.0, 5.0), seed=42)
        a = particle_swarm(sphere, 2, cfg())
        b = particle_swarm(sphere, 2, cfg())
        assert np.array_equal(a.best_weights, b.best_weights)
        assert a.best_error == b.best_error and a.trace == b.trace

    def test_fusion_against_grid_oracle(self):
        rng = np.random.default_rng(0)
        objective = random_fusion_problem(rng, 2, 40)
        swarm = particle_swarm(objective, 2, OptimizerConfig(seed=1))
        oracle = grid_search_oracle(objective, 2, 0.01)
        assert swarm.best_error <= oracle.best_error + 0.01

    def test_parallel_map_equals_serial(self):
        cfg = OptimizerConfig(bounds=(-5.0, 5.0), seed=3, max_iterations=30)
        serial = particle_swarm(sphere, 2, cfg)
        with ThreadPoolExecutor(max_workers=4) as pool:
            threaded = particle_swarm(
                sphere, 2, OptimizerConfig(bounds=(-5.0, 5.0), seed=3, max_iterations=30),
                parallel_map=pool.map,
            )
        assert np.array_equal(serial.best_weights, threaded.best_weights)
        assert serial.evaluations == threaded.evaluations


class TestNelderMead:
    def test_rosenbrock(self):
        r = nelder_mead(rosenbrock, np.array([-1.2, 1.0]), OptimizerConfig())
        assert np.linalg.norm(r.best_weights - 1.0) < 1e-4

    def test_scalar_quadratic(self):
        r = nelder_mead(lambda x: float((x[0] - 3.0) ** 2), np.array([0.0]), OptimizerConfig())
        assert abs(r.best_weights[0] - 3.0) < 1e-6

    def test_fusion_beats_uniform_start(self):
        rng = np.random.default_rng(1)
        objective = random_fusion_problem(rng, 3, 60)
        x0 = np.full(3, 1 / 3)
        r = nelder_mead(objective, x0, OptimizerConfig())
        assert r.best_error <= objective(x0)


class TestLbfgs:
    def test_shifted_quadratic(self):
        r = lbfgs(lambda x: float((x[0] - 0.3) ** 2 + (x[1] - 0.7) ** 2),
                  np.array([0.0, 0.0]), OptimizerConfig())
        assert np.linalg.norm(r.best_weights - [0.3, 0.7]) < 1e-6

    def test_rosenbrock_within_budget(self):
        r = lbfgs(rosenbrock, np.array([-1.2, 1.0]),
                  OptimizerConfig(max_iterations=200, fd_step=1e-5))
        assert np.linalg.norm(r.best_weights - 1.0) < 1e-4
        assert len(r.trace) <= 200

    def test_never_worse_than_start_on_flat_objective(self):
        rng = np.random.default_rng(2)
        objective = random_fusion_problem(rng, 2, 50)
        x0 = np.array([0.5, 0.5])
        r = lbfgs(objective, x0, OptimizerConfig())
        assert r.best_error <= objective(x0)
        assert objective(r.best_weights) == r.best_error

    def test_nan_objective_raises(self):
        def bad(x):
            return float("nan") if np.linalg.norm(x) > 0.5 else float(np.sum(x**2) - 1.0)

        with pytest.raises(AquasiftError):
            lbfgs(bad, np.array([2.0, 2.0]), OptimizerConfig())


class TestPowell:
    def test_coupled_quadratic(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        r = powell(lambda x: float(x @ a @ x), np.array([1.0, 1.0]), OptimizerConfig())
        assert np.linalg.norm(r.best_weights) < 1e-6

    def test_shifted_quadratic(self):
        r = powell(shifted, np.array([0.0, 0.0]), OptimizerConfig())
        assert np.linalg.norm(r.best_weights - [0.25, 0.75]) < 1e-6

    def test_fusion_against_grid_oracle(self):
        rng = np.random.default_rng(3)
        objective = random_fusion_problem(rng, 3, 50)
        r = powell(objective, np.full(3, 1 / 3), OptimizerConfig())
        oracle = grid_search_oracle(objective, 3, 0.02)
        assert r.best_error <= oracle.best_error + 0.01


class TestGridOracle:
    def test_single_dimension(self):
        r = grid_search_oracle(sphere, 1, 0.25)
        assert r.evaluations == 1
        assert np.array_equal(r.best_weights, [1.0])

    def test_two_dims_half_step(self):
        seen = []
        def probe(w):
            seen.append(tuple(np.round(w, 6)))
            return shifted(w)
        r = grid_search_oracle(probe, 2, 0.5)
        assert seen == [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        assert r.best_error == min(shifted(np.array(p)) for p in seen)

    def test_validation(self):
        with pytest.raises(AquasiftError):
            grid_search_oracle(sphere, 5, 0.1)
        with pytest.raises(AquasiftError):
            grid_search_oracle(sphere, 2, 0.6)


class TestSharedInvariants:
    METHODS = ("pso", "nelder-mead", "lbfgs", "powell")

    def _run(self, method, objective, n, **cfg_kwargs):
        cfg = OptimizerConfig(seed=7, **cfg_kwargs)
        return run_method(method, objective, n, cfg)

    @pytest.mark.parametrize("method", METHODS)
    def test_trace_non_increasing(self, method):
        rng = np.random.default_rng(11)
        objective = random_fusion_problem(rng, 2, 45)
        r = self._run(method, objective, 2)
        assert all(a >= b for a, b in zip(r.trace, r.trace[1:]))

    @pytest.mark.parametrize("method", METHODS)
    def test_best_reevaluates_exactly(self, method):
        rng = np.random.default_rng(12)
        objective = random_fusion_problem(rng, 3, 45)
        r = self._run(method, objective, 3)
        assert objective(r.best_weights) == r.best_error

    @pytest.mark.parametrize("method", METHODS)
    def test_bit_reproducible(self, method):
        rng = np.random.default_rng(13)
        objective = random_fusion_problem(rng, 2, 45)
        a = self._run(method, objective, 2)
        b = self._run(method, objective, 2)
        assert np.array_equal(a.best_weights, b.best_weights)
        assert a.best_error == b.best_error
        assert a.evaluations == b.evaluations

    @pytest.mark.parametrize("method", METHODS)
    def test_convex_quadratic_agreement(self, method):
        target = np.array([0.25, 0.75])
        objective = lambda x: float(np.sum((np.asarray(x) - target) ** 2))
        kwargs = {"fd_step": 1e-5} if method == "lbfgs" else {}
        r = self._run(method, objective, 2, **kwargs)
        assert np.linalg.norm(r.best_weights - target) < 1e-4

    @pytest.mark.parametrize("method", ("nelder-mead", "lbfgs", "powell"))
    def test_never_worse_than_initial_point(self, method):
        rng = np.random.default_rng(14)
        objective = random_fusion_problem(rng, 2, 40)
        x0 = np.array([0.5, 0.5])
        cfg = OptimizerConfig(seed=1)
        r = run_method(method, objective, 2, cfg, x0=x0)
        assert r.best_error <= objective(x0)

    def test_pso_never_worse_than_initial_swarm(self):
        rng = np.random.default_rng(15)
        objective = random_fusion_problem(rng, 2, 40)
        cfg = OptimizerConfig(seed=4)
        r = particle_swarm(objective, 2, cfg)
        init_rng = np.random.default_rng(4)
        init = init_rng.uniform(0.0, 1.0, size=(cfg.swarm_size, 2))
        assert r.best_error <= min(objective(p) for p in init)

    def test_unknown_method(self):
        with pytest.raises(AquasiftError):
            run_method("simulated-annealing", sphere, 2)
