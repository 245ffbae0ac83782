#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the clustering pipeline kernels (pairwise distances, mutual
reachability, Prim MST) across problem sizes, and the fused-error
evaluation at optimizer-like call volumes.  Run after building the
extension:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py [--sizes 200,500,1000]
"""

import argparse
import time

import numpy as np

from aquasift.kernels import _pure

try:
    from aquasift.kernels import _native
except ImportError:
    _native = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_clustering(sizes, dim=8):
    rng = np.random.default_rng(0)
    print(f"\nclustering kernels (d={dim}), best of 3, seconds")
    print(f"{'m':>6s}  {'kernel':<20s} {'pure':>10s} {'native':>10s} {'speedup':>8s}")
    for m in sizes:
        x = rng.normal(size=(m, dim))
        dist = _pure.pairwise_distances(x)
        core = _pure.core_distances(dist, 5)
        mreach = _pure.mutual_reachability(dist, core)
        for name, args in (
            ("pairwise_distances", (x,)),
            ("mutual_reachability", (dist, core)),
            ("prim_mst", (mreach,)),
        ):
            t_pure = timeit(getattr(_pure, name), *args)
            if _native is None:
                print(f"{m:>6d}  {name:<20s} {t_pure:>10.4f} {'n/a':>10s}")
            else:
                t_nat = timeit(getattr(_native, name), *args)
                ratio = t_pure / t_nat if t_nat > 0 else float("inf")
                print(f"{m:>6d}  {name:<20s} {t_pure:>10.4f} {t_nat:>10.4f} {ratio:>7.1f}x")


def bench_fused_error(n_models=5, m_samples=1000, calls=3000):
    rng = np.random.default_rng(1)
    scores = rng.random((n_models, m_samples))
    truth = (rng.random(m_samples) > 0.5).astype(np.uint8)
    weights = np.full(n_models, 1.0 / n_models)

    def loop(impl):
        for _ in range(calls):
            impl.fused_error_count(scores, weights, truth, 0.5)

    print(f"\nfused_error_count: {calls} calls on {n_models} x {m_samples} scores")
    t_pure = timeit(loop, _pure, repeat=2)
    if _native is None:
        print(f"  pure {t_pure:.4f}s, native unavailable")
        return
    t_nat = timeit(loop, _native, repeat=2)
    print(f"  pure {t_pure:.4f}s   native {t_nat:.4f}s   speedup {t_pure / t_nat:.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    if _native is None:
        print("native extension not built; showing pure timings only")
    bench_clustering(sizes)
    bench_fused_error()


if __name__ == "__main__":
    main()
