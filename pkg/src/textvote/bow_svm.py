"""Bag-of-words features and a one-vs-rest linear SVM trained with Pegasos."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import DataFormatError, Headline, Vocabulary
from .textio import LineReader, atomic_write, write_tensor, write_vocab


@dataclass(frozen=True, eq=False)
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d and equally long")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.dim):
            raise ValueError("indices must be strictly increasing and inside [0, dim)")
        if np.any(val == 0):
            raise ValueError("stored values must be non-zero")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def __eq__(self, other):
        return (
            isinstance(other, SparseVector)
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __len__(self):
        return self.indices.size

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def featurize(tokens: Sequence[str], vocab: Vocabulary, binary: bool = True) -> SparseVector:
    """1.0 for every distinct in-vocabulary token (or its count when ``binary`` is off)."""
    counts = Counter(vocab.stoi[t] for t in tokens if t in vocab.stoi)
    idx = np.array(sorted(counts), dtype=np.int64)
    if binary:
        val = np.ones(idx.size)
    else:
        val = np.array([counts[i] for i in idx], dtype=np.float64)
    return SparseVector(idx, val, vocab.n_tokens)


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    epochs: int = 20
    seed: int = 1
    binary: bool = True

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")


class SvmModel:
    def __init__(self, weights: np.ndarray, bias: np.ndarray, config: SvmConfig, vocab: Vocabulary, class_names=None):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        K, V = self.weights.shape
        if self.bias.shape != (K,) or V != vocab.n_tokens:
            raise ValueError("weight/bias shapes do not match")
        self.config = config
        self.vocab = vocab
        self.class_names = tuple(class_names) if class_names is not None else tuple(str(k) for k in range(K))

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]


# ---------------------------------------------------------------- objective


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float) -> float:
    """``0.5 |w|^2 + C * sum max(0, 1 - y (Xw + b))`` for a dense design matrix."""
    margins = y * (X @ w + b)
    return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - margins).sum())


def hinge_subgradient(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float):
    """Subgradient ``(d_w, d_b)`` of :func:`hinge_objective`; margin exactly 1 counts as inactive."""
    active = y * (X @ w + b) < 1.0
    return w - C * (y[active] @ X[active]), -C * float(y[active].sum())


# ---------------------------------------------------------------- solver


class _Stacked:
    """All rows of a sparse design matrix in three flat arrays, for fast scoring."""

    def __init__(self, X: Sequence[SparseVector]):
        self.n = len(X)
        self.rows = np.repeat(np.arange(self.n), [len(x) for x in X])
        self.idx = np.concatenate([x.indices for x in X]) if X else np.zeros(0, dtype=np.int64)
        self.val = np.concatenate([x.values for x in X]) if X else np.zeros(0)

    def objective(self, w, b, y, C) -> float:
        scores = np.bincount(self.rows, weights=w[self.idx] * self.val, minlength=self.n) + b
        return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - y * scores).sum())


def train_binary(X: Sequence[SparseVector], y: np.ndarray, dim: int, config: SvmConfig):
    """Pegasos on one class-vs-rest problem; returns ``(w, b)``.

    ``lambda = 1 / (C n)`` and the step at update ``t`` is ``1 / (lambda t)``.
    The bias is handled as the weight of a constant feature, so it shrinks
    with ``w``. ``w`` is stored as ``scale * v`` to keep the shrink O(1).
    At each epoch end the current iterate and the running mean of epoch-end
    iterates are scored on :func:`hinge_objective`; the best solution seen so
    far is returned, so more epochs never give a worse objective.
    """
    n = len(X)
    y = np.asarray(y, dtype=np.float64)
    lam = 1.0 / (config.C * n)
    rng = np.random.default_rng(config.seed)
    stacked = _Stacked(X)
    v = np.zeros(dim + 1)
    avg = np.zeros(dim + 1)
    best = np.zeros(dim + 1)
    best_obj = stacked.objective(best[:dim], 0.0, y, config.C)
    scale = 1.0
    t = 0
    for epoch in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            x = X[i]
            margin = y[i] * scale * (v[x.indices] @ x.values + v[dim])
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                v[:] = 0.0
                scale = 1.0
            else:
                scale *= shrink
            if margin < 1.0:
                step = eta * y[i] / scale
                v[x.indices] += step * x.values
                v[dim] += step
            if scale < 1e-9:
                v *= scale
                scale = 1.0
        current = scale * v
        avg += (current - avg) / (epoch + 1)
        for cand in (current, avg):
            obj = stacked.objective(cand[:dim], cand[dim], y, config.C)
            if obj < best_obj:
                best, best_obj = cand.copy(), obj
    return best[:dim].copy(), float(best[dim])


def train_svm(
    train_set: Sequence[Headline],
    vocab: Vocabulary,
    config: SvmConfig = SvmConfig(),
    num_classes: int | None = None,
    class_names=None,
) -> SvmModel:
    if not train_set:
        raise ValueError("empty training set")
    labels = np.array([h.label for h in train_set])
    K = num_classes if num_classes is not None else (len(class_names) if class_names else int(labels.max()) + 1)
    present = np.bincount(labels, minlength=K)
    if labels.max() >= K:
        raise ValueError(f"label {labels.max()} out of range for {K} classes")
    missing = np.flatnonzero(present == 0)
    if missing.size:
        raise ValueError(f"class {int(missing[0])} has no training examples")
    X = [featurize(h.tokens, vocab, config.binary) for h in train_set]
    W = np.zeros((K, vocab.n_tokens))
    b = np.zeros(K)
    for k in range(K):
        W[k], b[k] = train_binary(X, np.where(labels == k, 1.0, -1.0), vocab.n_tokens, config)
    return SvmModel(W, b, config, vocab, class_names)


def decision_scores(model: SvmModel, features: SparseVector) -> np.ndarray:
    if features.dim != model.weights.shape[1]:
        raise ValueError(f"feature dim {features.dim} != model dim {model.weights.shape[1]}")
    return model.weights[:, features.indices] @ features.values + model.bias


def predict_svm(model: SvmModel, features: SparseVector):
    """``(label, confidences)`` where confidences are ``sigmoid(score)`` per class.

    The squash only puts SVM scores on the same [0, 1] scale the ensemble
    uses for tie-breaking; they are not calibrated probabilities.
    """
    scores = decision_scores(model, features)
    return int(np.argmax(scores)), 0.5 * (1.0 + np.tanh(0.5 * scores))


def predict_tokens(model: SvmModel, tokens: Sequence[str]):
    return predict_svm(model, featurize(tokens, model.vocab, model.config.binary))


# ---------------------------------------------------------------- files

SVM_MAGIC = "textvote-model svm"


def save_svm(model: SvmModel, path) -> None:
    cfg = model.config
    with atomic_write(path) as f:
        f.write(SVM_MAGIC + "\n")
        f.write(f"K {model.num_classes}\nV {model.vocab.n_tokens}\n")
        f.write(f"C {cfg.C!r}\nepochs {cfg.epochs}\nseed {cfg.seed}\nbinary {str(cfg.binary).lower()}\n")
        f.write(f"classes {' '.join(model.class_names)}\n")
        write_vocab(f, model.vocab)
        write_tensor(f, "weights", model.weights)
        write_tensor(f, "bias", model.bias)


def load_svm(path) -> SvmModel:
    with open(path, encoding="utf-8") as f:
        r = LineReader(f, path)
    magic = r.next("header")
    if magic != SVM_MAGIC:
        raise DataFormatError(f"field 'magic': not an SVM model file ({magic[:40]!r})", path, 1)
    K = r.field("K", int)
    V = r.field("V", int)
    C = r.field("C", float)
    epochs = r.field("epochs", int)
    seed = r.field("seed", int)
    binary = r.field("binary", {"true": True, "false": False}.__getitem__)
    try:
        config = SvmConfig(C, epochs, seed, binary)
    except ValueError as e:
        raise r.error(f"invalid configuration: {e}") from None
    classes = tuple(r.field("classes").split(" "))
    if len(classes) != K:
        raise r.error("field 'classes' disagrees with K")
    vocab = r.vocab()
    if vocab.n_tokens != V:
        raise r.error("field 'V' disagrees with the vocabulary")
    W = r.tensor("weights", (K, V))
    b = r.tensor("bias", (K,))
    if r.pos != len(r.lines):
        raise DataFormatError("trailing content", path, r.pos + 1)
    return SvmModel(W, b, config, vocab, classes)
