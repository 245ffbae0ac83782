"""Self-contained probabilistic text classifier used as a stand-in scorer.

Hashed TF-IDF features (fixed dimension, collisions accepted) feed a
logistic regression trained by full-batch gradient descent, which keeps
training deterministic.  The trained model scores any corpus with
posterior probabilities of the positive class, which is exactly what the
fusion pipeline consumes.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import AquasiftError
from .corpus import Corpus, preprocess_tokens
from .fusion import POSITIVE

DEFAULT_DIM = 2**18


def hash_token(token: str, dim: int) -> int:
    """Stable token index: blake2b digest modulo the feature dimension.
    (Python's builtin hash is salted per process, so it cannot be used.)"""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % dim


def _count_tokens(texts: Sequence[str], dim: int):
    """Hashed token counts per document as a CSR-style triple."""
    indptr = [0]
    indices = []
    values = []
    for text in texts:
        counts = {}
        for tok in preprocess_tokens(text):
            idx = hash_token(tok, dim)
            counts[idx] = counts.get(idx, 0) + 1
        for idx in sorted(counts):
            indices.append(idx)
            values.append(float(counts[idx]))
        indptr.append(len(indices))
    return (
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(values, dtype=np.float64),
    )


@dataclass
class HashingTfidf:
    """Feature hashing TF-IDF: fit() learns per-index document frequencies,
    transform() emits L2-normalized sparse vectors."""

    dim: int = DEFAULT_DIM
    idf: dict = field(default_factory=dict)  # hashed index -> idf weight
    n_docs: int = 0

    def fit(self, texts: Sequence[str]) -> "HashingTfidf":
        indptr, indices, _ = _count_tokens(texts, self.dim)
        df = {}
        for i in range(len(indptr) - 1):
            for idx in indices[indptr[i] : indptr[i + 1]]:
                df[int(idx)] = df.get(int(idx), 0) + 1
        self.n_docs = len(texts)
        self.idf = {
            idx: float(np.log((1.0 + self.n_docs) / (1.0 + count)) + 1.0)
            for idx, count in df.items()
        }
        return self

    def transform(self, texts: Sequence[str]):
        """CSR triple of TF-IDF rows; empty documents stay all-zero."""
        if not self.idf and self.n_docs == 0:
            raise AquasiftError("vectorizer must be fitted before transform")
        indptr, indices, values = _count_tokens(texts, self.dim)
        weights = values.copy()
        for k, idx in enumerate(indices):
            weights[k] *= self.idf.get(int(idx), 1.0)
        for i in range(len(indptr) - 1):
            lo, hi = indptr[i], indptr[i + 1]
            norm = np.linalg.norm(weights[lo:hi])
            if norm > 0:
                weights[lo:hi] /= norm
        return indptr, indices, weights


def _row_dots(indptr, indices, values, dense: np.ndarray) -> np.ndarray:
    """Per-row dot products of CSR rows against a dense vector."""
    products = values * dense[indices]
    sums = np.zeros(len(indptr) - 1, dtype=np.float64)
    nonempty = indptr[:-1] < indptr[1:]
    if products.size:
        segment_sums = np.add.reduceat(products, indptr[:-1][nonempty])
        sums[nonempty] = segment_sums
    return sums


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    seed: int
    dim: int
    vectorizer: HashingTfidf
    name: str = "baseline"
    epochs: int = 0
    learning_rate: float = 0.0


def cross_entropy(indptr, indices, values, y, weights, bias) -> float:
    """Mean binary cross-entropy of the logistic model on CSR rows."""
    z = _row_dots(indptr, indices, values, weights) + bias
    # numerically stable: log(1 + exp(-|z|)) + max(z, 0) - z*y
    loss = np.logaddexp(0.0, -np.abs(z)) + np.maximum(z, 0.0) - z * y
    return float(np.mean(loss))


def ce_gradient(indptr, indices, values, y, weights, bias):
    """Analytic cross-entropy gradient (dense weight gradient, bias term)."""
    z = _row_dots(indptr, indices, values, weights) + bias
    err = _sigmoid(z) - y
    n = len(y)
    row_lengths = np.diff(indptr)
    err_expanded = np.repeat(err, row_lengths)
    grad_w = np.bincount(indices, weights=values * err_expanded, minlength=weights.size)
    return grad_w / n, float(np.mean(err))


def train(
    corpus: Corpus,
    epochs: int = 200,
    learning_rate: float = 0.1,
    seed: int = 0,
    dim: int = DEFAULT_DIM,
    name: str = "baseline",
) -> LogisticModel:
    """Full-batch gradient descent on binary cross-entropy.

    Weights start from a small seeded normal init, so different seeds give
    genuinely different stand-in models while the same seed reproduces the
    model bit for bit.  Requires at least one sample of each label.
    """
    labeled = [(t.text, t.label) for t in corpus if t.label is not None]
    if not labeled:
        raise AquasiftError("training corpus has no labeled tweets")
    y = np.asarray([1.0 if lab == POSITIVE else 0.0 for _, lab in labeled])
    if y.min() == y.max():
        raise AquasiftError("training corpus must contain both labels")
    texts = [text for text, _ in labeled]

    vectorizer = HashingTfidf(dim=dim).fit(texts)
    indptr, indices, values = vectorizer.transform(texts)

    rng = np.random.default_rng(seed)
    weights = rng.normal(0.0, 0.01, size=dim)
    bias = 0.0
    for _ in range(epochs):
        grad_w, grad_b = ce_gradient(indptr, indices, values, y, weights, bias)
        weights -= learning_rate * grad_w
        bias -= learning_rate * grad_b
    return LogisticModel(
        weights=weights,
        bias=float(bias),
        seed=seed,
        dim=dim,
        vectorizer=vectorizer,
        name=name,
        epochs=epochs,
        learning_rate=learning_rate,
    )


def score(model: LogisticModel, corpus: Corpus) -> np.ndarray:
    """Posterior probability of the positive class per tweet, in corpus
    order.  Empty documents score sigmoid(bias)."""
    indptr, indices, values = model.vectorizer.transform([t.text for t in corpus])
    z = _row_dots(indptr, indices, values, model.weights) + model.bias
    return _sigmoid(z)


def save_model(model: LogisticModel, path) -> None:
    """jsonl model format, line 1 metadata, then one (index, weight[, idf])
    record per nonzero entry.

    Metadata: {"format": "aquasift-logistic", "version": 1, "dim": ...,
    "bias": ..., "seed": ..., "name": ..., "epochs": ..., "learning_rate":
    ..., "n_docs": ...}.  Weight lines: {"i": index, "w": weight} with an
    optional "idf" field when the index carries a document frequency.
    """
    nonzero = np.nonzero(model.weights)[0]
    with open(path, "w", encoding="utf-8") as fh:
        meta = {
            "format": "aquasift-logistic",
            "version": 1,
            "dim": model.dim,
            "bias": model.bias,
            "seed": model.seed,
            "name": model.name,
            "epochs": model.epochs,
            "learning_rate": model.learning_rate,
            "n_docs": model.vectorizer.n_docs,
        }
        fh.write(json.dumps(meta, sort_keys=True) + "\n")
        idf = model.vectorizer.idf
        written = set()
        for idx in nonzero:
            rec = {"i": int(idx), "w": float(model.weights[idx])}
            if int(idx) in idf:
                rec["idf"] = idf[int(idx)]
            written.add(int(idx))
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
        for idx, value in sorted(idf.items()):
            if idx not in written:
                fh.write(json.dumps({"i": idx, "w": 0.0, "idf": value}, sort_keys=True) + "\n")


def load_model(path) -> LogisticModel:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            meta = json.loads(first)
        except json.JSONDecodeError:
            raise AquasiftError("model file does not start with a metadata line") from None
        if meta.get("format") != "aquasift-logistic":
            raise AquasiftError("not an aquasift logistic model file")
        dim = int(meta["dim"])
        weights = np.zeros(dim)
        idf = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            rec = json.loads(line)
            idx = int(rec["i"])
            if not 0 <= idx < dim:
                raise AquasiftError(f"line {lineno}: index {idx} out of range")
            weights[idx] = float(rec["w"])
            if "idf" in rec:
                idf[idx] = float(rec["idf"])
    vectorizer = HashingTfidf(dim=dim, idf=idf, n_docs=int(meta.get("n_docs", 0)))
    return LogisticModel(
        weights=weights,
        bias=float(meta["bias"]),
        seed=int(meta["seed"]),
        dim=dim,
        vectorizer=vectorizer,
        name=str(meta.get("name", "baseline")),
        epochs=int(meta.get("epochs", 0)),
        learning_rate=float(meta.get("learning_rate", 0.0)),
    )
