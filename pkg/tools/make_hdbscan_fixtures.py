#!/usr/bin/env python3
"""Regenerate the density-clustering reference fixtures.

Runs scikit-learn's HDBSCAN (brute algorithm) offline on five canonical
point sets and freezes points + expected labels into
tests/fixtures/hdbscan/.  scikit-learn is a tool-time dependency only; the
test suite just reads the CSVs and compares partitions.

Usage: python tools/make_hdbscan_fixtures.py
"""

import csv
from pathlib import Path

import numpy as np
from sklearn.cluster import HDBSCAN

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "hdbscan"


def fixtures():
    rng = np.random.default_rng(42)
    a = rng.normal((0, 0), 0.1, (12, 2))
    b = rng.normal((5, 5), 0.1, (12, 2))
    fx = {}
    fx["two_blobs"] = (np.vstack([a, b]), 3, 2)
    fx["two_blobs_outlier"] = (np.vstack([a, b, [[100.0, 100.0]]]), 3, 2)
    c = rng.normal((0, 6), 0.15, (10, 2))
    fx["three_blobs"] = (np.vstack([a, b, c]), 4, 3)
    fx["uniform_noise"] = (rng.uniform(0, 10, (40, 2)), 5, 5)
    d = np.vstack([a[:6], a[:6], b[:6], b[:6]])
    fx["duplicates"] = (d, 4, 3)
    return fx


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = []
    for name, (points, mcs, ms) in fixtures().items():
        ref = HDBSCAN(min_cluster_size=mcs, min_samples=ms, algorithm="brute").fit(points)
        with open(OUT / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_id", "v0", "v1", "expected_cluster"])
            for i, (row, label) in enumerate(zip(points, ref.labels_)):
                writer.writerow([f"p{i:03d}", repr(float(row[0])), repr(float(row[1])), int(label)])
        manifest.append((name, mcs, ms))
        print(f"{name}: {len(points)} points, clusters={ref.labels_.max() + 1}, "
              f"noise={int((ref.labels_ == -1).sum())}")
    with open(OUT / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "min_cluster_size", "min_samples"])
        writer.writerows(manifest)


if __name__ == "__main__":
    main()
