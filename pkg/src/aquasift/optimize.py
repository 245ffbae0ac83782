"""Derivative-free and quasi-Newton weight selection over the fusion simplex.

Four methods minimize the same scalar objective (validation error of the
fused classifier, or any test function): global-best particle swarm,
Nelder-Mead simplex, limited-memory BFGS with finite-difference gradients,
and Powell's conjugate-direction method with Brent line minimization.
A brute-force lattice oracle is included for verification.

Conventions shared by every method:

* the reported ``best_error`` is the objective value actually observed at
  ``best_weights`` (the objective is assumed pure, so re-evaluation gives
  the identical float);
* ``trace`` holds the best value seen up to and including each iteration,
  so it is non-increasing by construction;
* results are bit-reproducible for a fixed seed and config.

Bounds are enforced by clamping in PSO only; the deterministic methods
search unconstrained (the fusion objective normalizes weights internally,
so the box is a convenience, not a constraint).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import AquasiftError

METHODS = ("pso", "nelder-mead", "lbfgs", "powell")


@dataclass
class OptimizerConfig:
    max_iterations: Optional[int] = None  # None = per-method default
    seed: int = 0
    bounds: Optional[Sequence] = None  # per-dimension (lo, hi); default (0, 1)
    tolerance: float = 1e-6
    # Thresholded-error objectives are piecewise constant, and a single local
    # descent can stall on a plateau far from the best basin.  run_method()
    # therefore restarts the deterministic methods from seeded points inside
    # the bounds and keeps the best run; 1 disables restarts.  Each extra
    # restart first probes `restart_samples` random points and descends from
    # the best one, which is what makes plateau landscapes tractable.
    restarts: int = 12
    restart_samples: int = 64
    # PSO
    swarm_size: int = 30
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    # L-BFGS
    fd_step: float = 1e-3
    memory: int = 10
    armijo_c: float = 1e-4

    def resolved_bounds(self, n: int) -> np.ndarray:
        if self.bounds is None:
            b = np.tile([0.0, 1.0], (n, 1))
        else:
            b = np.asarray(self.bounds, dtype=np.float64)
            if b.shape == (2,):
                b = np.tile(b, (n, 1))
            if b.shape != (n, 2):
                raise AquasiftError(f"bounds must be {n} (lo, hi) pairs")
        if np.any(b[:, 0] >= b[:, 1]):
            raise AquasiftError("each bound must satisfy lo < hi")
        return b

    def iterations(self, default: int) -> int:
        if self.max_iterations is None:
            return default
        if self.max_iterations < 1:
            raise AquasiftError("max_iterations must be >= 1")
        return self.max_iterations


@dataclass
class OptimizationResult:
    best_weights: np.ndarray
    best_error: float
    trace: List[float] = field(default_factory=list)
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "best_weights": [float(w) for w in self.best_weights],
            "best_error": float(self.best_error),
            "trace": [float(v) for v in self.trace],
            "evaluations": int(self.evaluations),
        }


class TrackedObjective:
    """Optimize a surrogate while remembering the best point under the true
    objective.

    The optimizer sees ``surrogate(w)``; every visited point is also scored
    with ``true_objective`` and the argmin kept.  Used when minimizing the
    smoothed fitness: the returned weights and error are then the best
    observed under the raw thresholded error, never the surrogate value.
    """

    def __init__(self, surrogate: Callable, true_objective: Callable):
        self.surrogate = surrogate
        self.true_objective = true_objective
        self.best_true = math.inf
        self.best_weights = None

    def __call__(self, w) -> float:
        w = np.asarray(w, dtype=np.float64)
        true_value = float(self.true_objective(w))
        if true_value < self.best_true:
            self.best_true = true_value
            self.best_weights = w.copy()
        return float(self.surrogate(w))


class _Counted:
    """Wraps the objective to count evaluations and track the running best."""

    def __init__(self, fn: Callable):
        self.fn = fn
        self.count = 0
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        value = float(self.fn(x))
        self._record(x, value)
        return value

    def _record(self, x: np.ndarray, value: float) -> None:
        self.count += 1
        if value < self.best_f:
            self.best_f = value
            self.best_x = x.copy()

    def batch(self, points, parallel_map: Callable) -> np.ndarray:
        """Evaluate several points, possibly concurrently.  Only the raw
        objective runs under ``parallel_map``; bookkeeping stays serial so a
        thread-pool map cannot race the best-so-far tracking."""
        points = [np.asarray(p, dtype=np.float64) for p in points]
        values = [float(v) for v in parallel_map(self.fn, points)]
        for p, v in zip(points, values):
            self._record(p, v)
        return np.asarray(values, dtype=np.float64)


def _result(counted: _Counted, trace: List[float]) -> OptimizationResult:
    return OptimizationResult(
        best_weights=counted.best_x.copy(),
        best_error=counted.best_f,
        trace=trace,
        evaluations=counted.count,
    )


def particle_swarm(
    objective: Callable,
    n_dims: int,
    config: OptimizerConfig = None,
    parallel_map: Callable = map,
) -> OptimizationResult:
    """Canonical global-best PSO with constriction-style coefficients.

    Positions start uniform-random inside the bounds, velocities at zero.
    Each step: v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), x <- x + v,
    with positions clamped to the bounds.  ``parallel_map`` may be a
    thread-pool ``map``; the objective must be pure.
    """
    if n_dims < 1:
        raise AquasiftError("n_dims must be >= 1")
    cfg = config or OptimizerConfig()
    bounds = cfg.resolved_bounds(n_dims)
    lo, hi = bounds[:, 0], bounds[:, 1]
    iters = cfg.iterations(100)
    rng = np.random.default_rng(cfg.seed)
    counted = _Counted(objective)

    pos = rng.uniform(lo, hi, size=(cfg.swarm_size, n_dims))
    vel = np.zeros_like(pos)
    fitness = counted.batch(list(pos), parallel_map)
    pbest = pos.copy()
    pbest_f = fitness.copy()
    g = int(np.argmin(pbest_f))
    gbest = pbest[g].copy()
    gbest_f = float(pbest_f[g])

    trace = []
    for _ in range(iters):
        r1 = rng.random((cfg.swarm_size, n_dims))
        r2 = rng.random((cfg.swarm_size, n_dims))
        vel = (
            cfg.inertia * vel
            + cfg.cognitive * r1 * (pbest - pos)
            + cfg.social * r2 * (gbest - pos)
        )
        pos = np.clip(pos + vel, lo, hi)
        fitness = counted.batch(list(pos), parallel_map)
        improved = fitness < pbest_f
        pbest[improved] = pos[improved]
        pbest_f[improved] = fitness[improved]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest_f = float(pbest_f[g])
            gbest = pbest[g].copy()
        trace.append(gbest_f)
    return _result(counted, trace)


def nelder_mead(
    objective: Callable,
    x0,
    config: OptimizerConfig = None,
) -> OptimizationResult:
    """Downhill simplex with the standard 1 / 2 / 0.5 / 0.5 coefficients.

    The initial simplex perturbs each axis of x0 by 5% (0.00025 where the
    coordinate is zero).  Stops when the simplex coordinate spread falls
    below the tolerance or the iteration budget runs out.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    n = x0.size
    if n < 1:
        raise AquasiftError("x0 must be non-empty")
    cfg = config or OptimizerConfig()
    iters = cfg.iterations(200 * n)
    counted = _Counted(objective)

    rho, chi, psi, sigma = 1.0, 2.0, 0.5, 0.5
    sim = [x0.copy()]
    for k in range(n):
        vertex = x0.copy()
        vertex[k] = vertex[k] * 1.05 if vertex[k] != 0.0 else 0.00025
        sim.append(vertex)
    sim = np.asarray(sim)
    fsim = np.asarray([counted(v) for v in sim])

    trace = []
    for _ in range(iters):
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        spread = np.max(np.abs(sim[1:] - sim[0]))
        if spread < cfg.tolerance:
            break

        centroid = np.mean(sim[:-1], axis=0)
        xr = centroid + rho * (centroid - sim[-1])
        fr = counted(xr)
        if fr < fsim[0]:
            xe = centroid + chi * (xr - centroid)
            fe = counted(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        else:
            if fr < fsim[-1]:  # outside contraction
                xc = centroid + psi * (xr - centroid)
                fc = counted(xc)
                accept = fc <= fr
            else:  # inside contraction
                xc = centroid - psi * (centroid - sim[-1])
                fc = counted(xc)
                accept = fc < fsim[-1]
            if accept:
                sim[-1], fsim[-1] = xc, fc
            else:  # shrink toward the best vertex
                for k in range(1, n + 1):
                    sim[k] = sim[0] + sigma * (sim[k] - sim[0])
                    fsim[k] = counted(sim[k])
        trace.append(counted.best_f)
    return _result(counted, trace)


def _fd_gradient(counted: _Counted, x: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        grad[k] = (counted(x + e) - counted(x - e)) / (2.0 * step)
    return grad


def lbfgs(
    objective: Callable,
    x0,
    config: OptimizerConfig = None,
) -> OptimizationResult:
    """L-BFGS with two-loop recursion and Armijo backtracking.

    Gradients come from central finite differences (``fd_step``), which is
    what makes the method usable on objectives without analytic gradients.
    Stops on gradient norm below tolerance, a failed line search, or the
    iteration budget.  A NaN objective value during the line search is an
    error; +inf just rejects the step.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    n = x.size
    if n < 1:
        raise AquasiftError("x0 must be non-empty")
    cfg = config or OptimizerConfig()
    iters = cfg.iterations(200)
    counted = _Counted(objective)

    fx = counted(x)
    if math.isnan(fx):
        raise AquasiftError("objective returned NaN at the initial point")
    grad = _fd_gradient(counted, x, cfg.fd_step)
    s_hist: List[np.ndarray] = []
    y_hist: List[np.ndarray] = []
    rho_hist: List[float] = []

    trace = []
    for iteration in range(iters):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < cfg.tolerance:
            break

        # two-loop recursion for the search direction
        q = grad.copy()
        alpha = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = rho * float(s @ q)
            alpha.append(a)
            q -= a * y
        if y_hist:
            gamma = float(s_hist[-1] @ y_hist[-1]) / float(y_hist[-1] @ y_hist[-1])
            q *= gamma
        for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alpha)):
            b = rho * float(y @ q)
            q += (a - b) * s
        direction = -q
        slope = float(grad @ direction)
        if slope >= 0.0:  # not a descent direction; fall back to steepest descent
            direction = -grad
            slope = -gnorm * gnorm
        if iteration == 0:
            # Without history the first direction is raw steepest descent; a
            # huge initial gradient would force a tiny backtracked step whose
            # curvature pair then poisons the Hessian scaling for many
            # iterations.  The usual fix: cap the first step to unit l1 size.
            scale = min(1.0, 1.0 / float(np.sum(np.abs(grad))))
            direction = direction * scale
            slope = slope * scale

        # Armijo backtracking with halving
        t = 1.0
        accepted = False
        for _halving in range(40):
            trial = x + t * direction
            f_trial = counted(trial)
            if math.isnan(f_trial):
                raise AquasiftError("non-finite objective value during line search")
            if f_trial <= fx + cfg.armijo_c * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break

        grad_new = _fd_gradient(counted, trial, cfg.fd_step)
        s = trial - x
        y = grad_new - grad
        sy = float(s @ y)
        if sy > 1e-12:
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > cfg.memory:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        x, fx, grad = trial, f_trial, grad_new
        trace.append(counted.best_f)
    return _result(counted, trace)


def _bracket(fline: Callable, xa: float = 0.0, xb: float = 1.0, max_steps: int = 60):
    """Bracket a minimum of a 1-D function (downhill golden-ratio march).

    Capped at ``max_steps`` expansions so perfectly flat objectives (the
    thresholded fitness is piecewise constant) cannot march forever; the
    last triple is returned even if it never turned uphill.
    """
    gold, glimit, tiny = 1.618034, 110.0, 1e-21
    fa, fb = fline(xa), fline(xb)
    if fb > fa:
        xa, xb = xb, xa
        fa, fb = fb, fa
    xc = xb + gold * (xb - xa)
    fc = fline(xc)
    steps = 0
    while fb >= fc:
        steps += 1
        if steps > max_steps:
            break
        r = (xb - xa) * (fb - fc)
        q = (xb - xc) * (fb - fa)
        denom = 2.0 * math.copysign(max(abs(q - r), tiny), q - r)
        u = xb - ((xb - xc) * q - (xb - xa) * r) / denom
        ulim = xb + glimit * (xc - xb)
        if (xb - u) * (u - xc) > 0.0:
            fu = fline(u)
            if fu < fc:
                return (xb, u, xc), (fb, fu, fc)
            if fu > fb:
                return (xa, xb, u), (fa, fb, fu)
            u = xc + gold * (xc - xb)
            fu = fline(u)
        elif (xc - u) * (u - ulim) > 0.0:
            fu = fline(u)
            if fu < fc:
                xb, xc, u = xc, u, u + gold * (u - xc)
                fb, fc, fu = fc, fu, fline(u)
        elif (u - ulim) * (ulim - xc) >= 0.0:
            u = ulim
            fu = fline(u)
        else:
            u = xc + gold * (xc - xb)
            fu = fline(u)
        xa, xb, xc = xb, xc, u
        fa, fb, fc = fb, fc, fu
    return (xa, xb, xc), (fa, fb, fc)


def _brent_line(fline: Callable, tol: float = 1e-6, max_iter: int = 100):
    """Brent's 1-D minimization (golden section + parabolic interpolation)
    after bracketing.  Returns (t_min, f_min)."""
    (xa, xb, xc), (_, fb, _) = _bracket(fline)
    a, b = (xa, xc) if xa < xc else (xc, xa)
    x = w = v = xb
    fx = fw = fv = fb
    d = e = 0.0
    cgold, zeps = 0.381966, 1e-11
    for _ in range(max_iter):
        xm = 0.5 * (a + b)
        tol1 = tol * abs(x) + zeps
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, xm - x)
                use_golden = False
        if use_golden:
            e = (a if x >= xm else b) - x
            d = cgold * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = fline(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def powell(
    objective: Callable,
    x0,
    config: OptimizerConfig = None,
) -> OptimizationResult:
    """Powell's conjugate-direction method.

    Cycles through the direction set minimizing along each via Brent; after
    a sweep, the direction of largest decrease may be replaced by the net
    sweep displacement (with the usual quadratic-extrapolation safeguard).
    Converges when a full sweep no longer improves beyond the tolerance.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    n = x.size
    if n < 1:
        raise AquasiftError("x0 must be non-empty")
    cfg = config or OptimizerConfig()
    iters = cfg.iterations(100)
    counted = _Counted(objective)
    line_tol = 1e-6

    directions = [np.eye(n)[k].copy() for k in range(n)]
    fx = counted(x)
    trace = []
    for _ in range(iters):
        x_start, f_start = x.copy(), fx
        largest_drop, drop_index = 0.0, 0
        for k, d in enumerate(directions):
            f_before = fx
            t, ft = _brent_line(lambda t: counted(x + t * d), tol=line_tol)
            if ft < fx:
                x = x + t * d
                fx = ft
            if f_before - fx > largest_drop:
                largest_drop, drop_index = f_before - fx, k
        trace.append(counted.best_f)
        if 2.0 * (f_start - fx) <= cfg.tolerance * (abs(f_start) + abs(fx)) + 1e-25:
            break

        extrapolated = 2.0 * x - x_start
        f_ext = counted(extrapolated)
        if f_ext < f_start:
            t_test = (
                2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - largest_drop) ** 2
                - largest_drop * (f_start - f_ext) ** 2
            )
            if t_test < 0.0:
                new_dir = x - x_start
                t, ft = _brent_line(lambda t: counted(x + t * new_dir), tol=line_tol)
                if ft < fx:
                    x = x + t * new_dir
                    fx = ft
                directions[drop_index] = directions[-1]
                directions[-1] = new_dir
    return _result(counted, trace)


def _compositions(total: int, parts: int):
    """Non-negative integer compositions in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def grid_search_oracle(objective: Callable, n_dims: int, step: float) -> OptimizationResult:
    """Exhaustive evaluation of every simplex lattice weight vector with the
    given spacing; returns the exact lattice minimum.

    Limited to 4 dimensions to keep the lattice size sane; intended as a
    verification oracle for the iterative optimizers, not for production.
    """
    if not 1 <= n_dims <= 4:
        raise AquasiftError("the grid oracle supports 1 to 4 dimensions")
    if not 0.0 < step <= 0.5:
        raise AquasiftError("step must lie in (0, 0.5]")
    k = round(1.0 / step)
    counted = _Counted(objective)
    trace = []
    for comp in _compositions(k, n_dims):
        counted(np.asarray(comp, dtype=np.float64) / k)
        trace.append(counted.best_f)
    return _result(counted, trace)


def _merge_runs(runs: List[OptimizationResult], extra_evaluations: int = 0) -> OptimizationResult:
    """Best-of-restarts result: the winning weights, summed evaluations, and
    the concatenated traces re-clamped to best-so-far (so the non-increasing
    trace contract survives the restart boundaries)."""
    best = min(runs, key=lambda r: r.best_error)
    trace = []
    running = math.inf
    for run in runs:
        for value in run.trace:
            running = min(running, value)
            trace.append(running)
    return OptimizationResult(
        best_weights=best.best_weights,
        best_error=best.best_error,
        trace=trace,
        evaluations=sum(r.evaluations for r in runs) + extra_evaluations,
    )


def run_method(
    method: str,
    objective: Callable,
    n_dims: int,
    config: OptimizerConfig = None,
    x0=None,
    parallel_map: Callable = map,
) -> OptimizationResult:
    """Dispatch by method name.

    The first deterministic start is the uniform-weight point (or ``x0``);
    any further restarts draw starting points uniformly inside the bounds
    from the config seed.  PSO restarts rerun the swarm with shifted seeds.
    """
    cfg = config or OptimizerConfig()
    restarts = max(1, int(cfg.restarts))
    if method == "pso":
        runs = []
        for i in range(restarts):
            run_cfg = replace(cfg, seed=cfg.seed + i)
            runs.append(particle_swarm(objective, n_dims, run_cfg, parallel_map=parallel_map))
        return _merge_runs(runs)
    if method not in ("nelder-mead", "lbfgs", "powell"):
        raise AquasiftError(f"unknown optimizer {method!r} (choose from {', '.join(METHODS)})")

    bounds = cfg.resolved_bounds(n_dims)
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(n_dims, 1.0 / n_dims) if x0 is None else np.asarray(x0, dtype=np.float64)]
    probes = 0
    for _ in range(restarts - 1):
        candidates = rng.uniform(bounds[:, 0], bounds[:, 1], size=(max(1, cfg.restart_samples), n_dims))
        values = [float(objective(c)) for c in candidates]
        probes += len(values)
        starts.append(candidates[int(np.argmin(values))])

    optimizer = {"nelder-mead": nelder_mead, "lbfgs": lbfgs, "powell": powell}[method]
    runs = [optimizer(objective, start, cfg) for start in starts]
    return _merge_runs(runs, extra_evaluations=probes)
