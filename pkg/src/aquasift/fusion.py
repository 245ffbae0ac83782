"""Weighted late fusion of per-model posterior scores.

The fused score of a sample is the simplex-weighted sum of the individual
model posteriors; weights are normalized to sum to 1 so fused values stay
interpretable as probabilities and the 0.5 decision threshold is
meaningful.
"""

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import AquasiftError

POSITIVE = "relevant"
NEGATIVE = "irrelevant"


@dataclass(frozen=True)
class ScoreMatrix:
    """Posterior scores of n models over m samples: values[i, j] is model
    i's probability that sample j is positive."""

    model_names: tuple
    sample_ids: tuple
    values: np.ndarray  # (n_models, n_samples) float64 in [0, 1]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "model_names", tuple(self.model_names))
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        if values.ndim != 2:
            raise AquasiftError("score values must be a 2-D array")
        n, m = values.shape
        if n != len(self.model_names):
            raise AquasiftError(f"{len(self.model_names)} model names for {n} score rows")
        if m != len(self.sample_ids):
            raise AquasiftError(f"{len(self.sample_ids)} sample ids for {m} score columns")
        if len(set(self.model_names)) != n:
            raise AquasiftError("model names must be unique")
        if len(set(self.sample_ids)) != m:
            raise AquasiftError("sample ids must be unique")
        if not np.all(np.isfinite(values)):
            raise AquasiftError("scores must be finite")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise AquasiftError("scores must lie in [0, 1]")

    @property
    def n_models(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    def column(self, model: str) -> np.ndarray:
        """One model's score row (named 'column' after the score-file layout)."""
        try:
            i = self.model_names.index(model)
        except ValueError:
            raise AquasiftError(f"unknown model {model!r}") from None
        return self.values[i].copy()

    def select_models(self, names: Sequence[str]) -> "ScoreMatrix":
        idx = []
        for name in names:
            if name not in self.model_names:
                raise AquasiftError(f"unknown model {name!r}")
            idx.append(self.model_names.index(name))
        return ScoreMatrix(tuple(names), self.sample_ids, self.values[idx])


def read_scores_csv(path) -> ScoreMatrix:
    """Score file: header ``sample_id,<model1>,...,<modeln>``, one decimal
    value in [0, 1] per model per row."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "sample_id" or len(header) < 2:
            raise AquasiftError("score csv needs a 'sample_id,<model>,...' header")
        models = header[1:]
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise AquasiftError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise AquasiftError(f"line {lineno}: non-numeric score") from None
    if not ids:
        raise AquasiftError("score csv has no rows")
    return ScoreMatrix(tuple(models), tuple(ids), np.asarray(rows, dtype=np.float64).T)


def write_scores_csv(matrix: ScoreMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id"] + list(matrix.model_names))
        for j, sid in enumerate(matrix.sample_ids):
            writer.writerow([sid] + [repr(float(v)) for v in matrix.values[:, j]])


def read_labels_csv(path) -> dict:
    """Label file: ``sample_id,label`` rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sample_id", "label"]:
            raise AquasiftError("label csv needs a 'sample_id,label' header")
        out = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise AquasiftError(f"line {lineno}: expected 2 fields")
            if row[0] in out:
                raise AquasiftError(f"line {lineno}: duplicate sample id {row[0]!r}")
            out[row[0]] = row[1]
    return out


def write_labels_csv(pairs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "label"])
        for sid, label in pairs:
            writer.writerow([sid, label])


def labels_for(matrix: ScoreMatrix, labels_by_id: Mapping[str, str]) -> list:
    """Labels aligned to the matrix sample order.  Any id mismatch in either
    direction is a hard error; nothing is silently dropped or reordered."""
    missing = [sid for sid in matrix.sample_ids if sid not in labels_by_id]
    if missing:
        raise AquasiftError(f"labels missing for {len(missing)} samples (first: {missing[0]!r})")
    extra = set(labels_by_id) - set(matrix.sample_ids)
    if extra:
        raise AquasiftError(
            f"label file has {len(extra)} samples absent from the scores (first: {sorted(extra)[0]!r})"
        )
    return [labels_by_id[sid] for sid in matrix.sample_ids]


def normalize_weights(weights, n_expected: int = None) -> np.ndarray:
    """Project raw non-negative weights onto the simplex by dividing by
    their sum.  All-zero or negative weights are rejected."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise AquasiftError("weights must be a 1-D vector")
    if n_expected is not None and w.shape[0] != n_expected:
        raise AquasiftError(f"expected {n_expected} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)):
        raise AquasiftError("weights must be finite")
    if np.any(w < 0):
        raise AquasiftError("weights must be non-negative")
    total = w.sum()
    if total <= 0:
        raise AquasiftError("weights must have at least one positive entry")
    return w / total


def fuse(scores: ScoreMatrix, weights) -> np.ndarray:
    """Fused per-sample scores: the weight-normalized sum of model scores."""
    w = normalize_weights(weights, n_expected=scores.n_models)
    return w @ scores.values


def decide(fused: np.ndarray, threshold: float = 0.5) -> list:
    """Threshold fused scores into labels; >= threshold means positive."""
    if not 0.0 < threshold < 1.0:
        raise AquasiftError("threshold must lie strictly between 0 and 1")
    fused = np.asarray(fused, dtype=np.float64)
    return [POSITIVE if s >= threshold else NEGATIVE for s in fused]


def simple_average(scores: ScoreMatrix) -> np.ndarray:
    """Equal-weight fusion; identical to fuse() with a uniform weight vector."""
    if scores.n_models < 1:
        raise AquasiftError("need at least one model")
    return fuse(scores, np.ones(scores.n_models))


def select_top_k(reports: Mapping[str, "EvalReport"], k: int) -> list:
    """The k best models by validation F1, descending; ties break on the
    model name ascending."""
    if k < 1:
        raise AquasiftError("k must be >= 1")
    if k > len(reports):
        raise AquasiftError(f"k={k} exceeds the {len(reports)} available models")
    ranked = sorted(reports.items(), key=lambda item: (-item[1].f1, item[0]))
    return [name for name, _ in ranked[:k]]
