"""Classification evaluation and the fitness function for weight selection.

The fitness is the validation error e = 1 - accuracy of thresholded fused
scores; it is what all the weight optimizers minimize.  All functions here
are pure and safe to call concurrently over shared score data.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import AquasiftError
from . import kernels
from .fusion import POSITIVE, ScoreMatrix, normalize_weights


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class EvalReport:
    """Standard binary metrics; ``error`` is exactly 1 - accuracy.

    ``macro_f1`` (mean of the per-class F1 scores) is only filled in when
    requested via ``evaluate(..., macro=True)``.
    """

    accuracy: float
    error: float
    precision: float
    recall: float
    f1: float
    macro_f1: Optional[float] = None

    def to_dict(self) -> dict:
        d = {
            "accuracy": self.accuracy,
            "error": self.error,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }
        if self.macro_f1 is not None:
            d["macro_f1"] = self.macro_f1
        return d


def confusion(preds: Sequence, labels: Sequence, positive=POSITIVE) -> ConfusionCounts:
    """Confusion counts of predictions against reference labels."""
    if len(preds) != len(labels):
        raise AquasiftError(f"length mismatch: {len(preds)} predictions vs {len(labels)} labels")
    if len(preds) == 0:
        raise AquasiftError("cannot evaluate empty inputs")
    tp = fp = fn = tn = 0
    for p, y in zip(preds, labels):
        if p == positive:
            if y == positive:
                tp += 1
            else:
                fp += 1
        else:
            if y == positive:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def _f1(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def evaluate(counts: ConfusionCounts, macro: bool = False) -> EvalReport:
    """EvalReport from confusion counts.  Zero-denominator precision, recall
    and F1 follow the convention of being 0."""
    total = counts.total
    if total == 0:
        raise AquasiftError("cannot evaluate zero samples")
    accuracy = (counts.tp + counts.tn) / total
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp > 0 else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn > 0 else 0.0
    macro_f1 = None
    if macro:
        neg_precision = counts.tn / (counts.tn + counts.fn) if counts.tn + counts.fn > 0 else 0.0
        neg_recall = counts.tn / (counts.tn + counts.fp) if counts.tn + counts.fp > 0 else 0.0
        macro_f1 = (_f1(precision, recall) + _f1(neg_precision, neg_recall)) / 2
    return EvalReport(
        accuracy=accuracy,
        error=1.0 - accuracy,
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        macro_f1=macro_f1,
    )


def report_for(preds: Sequence, labels: Sequence, positive=POSITIVE, macro: bool = False) -> EvalReport:
    """confusion + evaluate in one call."""
    return evaluate(confusion(preds, labels, positive), macro=macro)


def _truth_array(labels: Sequence, positive) -> np.ndarray:
    return np.fromiter((1 if y == positive else 0 for y in labels), dtype=np.uint8, count=len(labels))


def fitness_error(weights, scores: ScoreMatrix, labels: Sequence, threshold: float = 0.5) -> float:
    """Classification error of thresholded fused scores: 1 - accuracy.

    This is the objective every weight optimizer minimizes.  Weights are
    simplex-normalized first, so the value is invariant under positive
    rescaling of the weight vector.
    """
    w = normalize_weights(weights, n_expected=scores.n_models)
    labels = list(labels)
    if len(labels) != scores.n_samples:
        raise AquasiftError(
            f"labels ({len(labels)}) do not match score matrix samples ({scores.n_samples})"
        )
    truth = _truth_array(labels, POSITIVE)
    wrong = kernels.fused_error_count(scores.values, w, truth, threshold)
    # same float operation order as evaluate(): error = 1 - accuracy exactly
    return 1.0 - (scores.n_samples - wrong) / scores.n_samples


def smoothed_fitness(
    weights,
    scores: ScoreMatrix,
    labels: Sequence,
    threshold: float = 0.5,
    temperature: float = 20.0,
) -> float:
    """Differentiable surrogate for :func:`fitness_error`.

    Mean sigmoid of the signed margin between the fused score and the
    threshold: near 0 when every sample is confidently on the correct side,
    near 1 when all are wrong.  Useful for gradient-based optimizers on the
    otherwise piecewise-constant 0/1 loss; report raw ``fitness_error`` at
    the returned weights, never this value.
    """
    w = normalize_weights(weights, n_expected=scores.n_models)
    labels = list(labels)
    if len(labels) != scores.n_samples:
        raise AquasiftError(
            f"labels ({len(labels)}) do not match score matrix samples ({scores.n_samples})"
        )
    truth = _truth_array(labels, POSITIVE).astype(np.float64)
    fused = w @ scores.values
    margin = temperature * (fused - threshold)
    sign = 2.0 * truth - 1.0
    losses = 1.0 / (1.0 + np.exp(sign * margin))
    return float(np.mean(losses))
