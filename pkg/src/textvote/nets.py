"""NBoW, one-layer CNN and LSTM headline classifiers in plain numpy.

All three share the same pipeline: token ids -> embedding rows -> encoder
-> linear layer -> softmax. Gradients are written out by hand; the test
suite checks every tensor against central finite differences.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import DataFormatError, Headline, Vocabulary, build_vocab
from .embeddings import EmbeddingSet
from .textio import LineReader, atomic_write, write_vocab, write_tensor

INIT_SCALE = 0.05


class Arch(str, Enum):
    NBOW = "nbow"
    CNN = "cnn"
    LSTM = "lstm"


class Init(str, Enum):
    PRETRAINED = "pretrained"
    RANDOM_WORD = "random-word"
    RANDOM_CHAR = "random-char"


@dataclass(frozen=True)
class NetConfig:
    arch: Arch = Arch.NBOW
    dim: int = 300
    num_classes: int = 18
    filter_width: int = 3
    num_filters: int = 128
    hidden: int = 128
    max_len: int = 30
    lr: float = 1e-3
    epochs: int = 10
    batch_size: int = 64
    seed: int = 1
    fine_tune_embeddings: bool = True
    init: Init = Init.RANDOM_WORD
    # "word" or "char"; random-char forces "char"
    granularity: str = "word"

    def __post_init__(self):
        object.__setattr__(self, "arch", Arch(self.arch))
        object.__setattr__(self, "init", Init(self.init))
        if self.init is Init.RANDOM_CHAR:
            object.__setattr__(self, "granularity", "char")
        if self.granularity not in ("word", "char"):
            raise ValueError(f"granularity must be 'word' or 'char', not {self.granularity!r}")
        if self.num_classes < 2:
            raise ValueError("need at least two classes")
        if self.filter_width < 1:
            raise ValueError("filter_width must be >= 1")
        if self.arch is Arch.CNN and self.max_len < self.filter_width:
            raise ValueError("max_len must be >= filter_width for the CNN")
        if min(self.dim, self.num_filters, self.hidden, self.max_len, self.batch_size) < 1:
            raise ValueError("sizes must be positive")
        if self.epochs < 0 or self.lr < 0:
            raise ValueError("epochs and lr must be non-negative")

    @property
    def encoder_width(self) -> int:
        return {Arch.NBOW: self.dim, Arch.CNN: self.num_filters, Arch.LSTM: self.hidden}[self.arch]


def split_units(tokens: Sequence[str], granularity: str) -> list[str]:
    if granularity == "char":
        return [c for t in tokens for c in t]
    return list(tokens)


def build_unit_vocab(headlines: Sequence[Headline], config: NetConfig) -> Vocabulary:
    return build_vocab((split_units(h.tokens, config.granularity) for h in headlines), 1)


class ClassifierModel:
    """Parameters plus everything needed to turn tokens into logits.

    The embedding matrix has ``len(vocab) + 1`` rows: the real tokens, the
    UNK row, and a final all-zero padding row that is never updated.
    """

    def __init__(self, config: NetConfig, vocab: Vocabulary, params: dict, class_names=None):
        self.config = config
        self.vocab = vocab
        self.params = params
        if class_names is None:
            class_names = tuple(str(k) for k in range(config.num_classes))
        self.class_names = tuple(class_names)
        if len(self.class_names) != config.num_classes:
            raise ValueError("class_names length differs from num_classes")

    @property
    def pad_index(self) -> int:
        return len(self.vocab)

    def copy(self) -> "ClassifierModel":
        return ClassifierModel(self.config, self.vocab, {k: v.copy() for k, v in self.params.items()}, self.class_names)

    def encode(self, tokens: Sequence[str]) -> list[int]:
        units = split_units(tokens, self.config.granularity)
        return [self.vocab.index(u) for u in units[: self.config.max_len]]


def param_shapes(config: NetConfig, n_rows: int) -> dict:
    d, K = config.dim, config.num_classes
    shapes = {"embedding": (n_rows, d)}
    if config.arch is Arch.CNN:
        shapes["conv_W"] = (config.num_filters, config.filter_width, d)
        shapes["conv_b"] = (config.num_filters,)
    elif config.arch is Arch.LSTM:
        H = config.hidden
        shapes["lstm_Wx"] = (d, 4 * H)
        shapes["lstm_Wh"] = (H, 4 * H)
        shapes["lstm_b"] = (4 * H,)
    shapes["out_W"] = (K, config.encoder_width)
    shapes["out_b"] = (K,)
    return shapes


def init_model(
    config: NetConfig,
    vocab: Vocabulary,
    pretrained: EmbeddingSet | None = None,
    class_names=None,
) -> ClassifierModel:
    """Fresh parameters, uniform in [-0.05, 0.05] except the LSTM forget bias (1.0).

    With a pretrained set, every vocabulary token the set can compose gets
    its composed vector as embedding row; the rest keep their random row.
    """
    if (pretrained is not None) != (config.init is Init.PRETRAINED):
        raise ValueError("pass an embedding set exactly when init is 'pretrained'")
    if pretrained is not None and pretrained.dim != config.dim:
        raise ValueError(f"embedding dim {pretrained.dim} != model dim {config.dim}")
    rng = np.random.default_rng(config.seed)
    params = {}
    for name, shape in param_shapes(config, len(vocab) + 1).items():
        params[name] = rng.uniform(-INIT_SCALE, INIT_SCALE, shape)
    params["embedding"][-1] = 0.0
    if config.arch is Arch.LSTM:
        H = config.hidden
        params["lstm_b"][H : 2 * H] = 1.0
    if pretrained is not None:
        emb = params["embedding"]
        for i, tok in enumerate(vocab.itos):
            try:
                vec = pretrained.compose(tok)
            except KeyError:
                continue
            if np.any(vec):
                emb[i] = vec
    return ClassifierModel(config, vocab, params, class_names)


# ---------------------------------------------------------------- batches


def pad_batch(seqs: Sequence[Sequence[int]], pad_index: int, min_len: int = 1):
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    if lengths.size == 0 or lengths.min() < 1:
        raise ValueError("every sequence needs at least one id")
    T = max(int(lengths.max()), min_len)
    ids = np.full((len(seqs), T), pad_index, dtype=np.int64)
    for b, s in enumerate(seqs):
        ids[b, : len(s)] = s
    return ids, lengths


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean negative log-likelihood over the batch and its gradient w.r.t. the logits."""
    logits = np.atleast_2d(logits)
    labels = np.asarray(labels).reshape(-1)
    B = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -logp[np.arange(B), labels].mean()
    d = np.exp(logp)
    d[np.arange(B), labels] -= 1.0
    return float(loss), d / B


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _encode_nbow(p, X, mask, lengths):
    h = (X * mask[:, :, None]).sum(axis=1) / lengths[:, None]
    return h, None


def _encode_cnn(p, X, mask, lengths, config):
    B, T, d = X.shape
    fw = config.filter_width
    P = T - fw + 1
    U = np.concatenate([X[:, j : j + P] for j in range(fw)], axis=2)  # (B, P, fw*d)
    W = p["conv_W"].reshape(config.num_filters, fw * d)
    conv = U @ W.T + p["conv_b"]
    act = np.maximum(conv, 0.0)
    n_valid = np.maximum(lengths, fw) - fw + 1
    valid = np.arange(P)[None, :] < n_valid[:, None]
    masked = np.where(valid[:, :, None], act, -np.inf)
    arg = masked.argmax(axis=1)  # (B, F)
    h = np.take_along_axis(act, arg[:, None, :], axis=1)[:, 0, :]
    return h, (U, conv, arg)


def _encode_lstm(p, X, mask, lengths, config):
    B, T, _ = X.shape
    H = config.hidden
    Wx, Wh, b = p["lstm_Wx"], p["lstm_Wh"], p["lstm_b"]
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    steps = []
    for t in range(T):
        z = X[:, t] @ Wx + h @ Wh + b
        gates = _sigmoid(z[:, : 3 * H])
        i, f, o = gates[:, :H], gates[:, H : 2 * H], gates[:, 2 * H :]
        g = np.tanh(z[:, 3 * H :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        m = mask[:, t : t + 1]
        steps.append((h, c, i, f, o, g, tc))
        h = m * h_new + (1 - m) * h
        c = m * c_new + (1 - m) * c
    return h, steps


def forward_batch(model: ClassifierModel, ids: np.ndarray, lengths: np.ndarray):
    """Logits ``(B, K)`` for padded ids, plus the cache the backward pass needs."""
    cfg, p = model.config, model.params
    X = p["embedding"][ids]
    mask = (np.arange(ids.shape[1])[None, :] < lengths[:, None]).astype(np.float64)
    if cfg.arch is Arch.NBOW:
        h, enc = _encode_nbow(p, X, mask, lengths)
    elif cfg.arch is Arch.CNN:
        h, enc = _encode_cnn(p, X, mask, lengths, cfg)
    else:
        h, enc = _encode_lstm(p, X, mask, lengths, cfg)
    logits = h @ p["out_W"].T + p["out_b"]
    return logits, (ids, lengths, X, mask, h, enc)


def forward(model: ClassifierModel, ids: Sequence[int]):
    """Logits ``(K,)`` for one id sequence (truncated to ``max_len``)."""
    ids = list(ids)[: model.config.max_len]
    if not ids:
        raise ValueError("empty input sequence")
    min_len = model.config.filter_width if model.config.arch is Arch.CNN else 1
    batch, lengths = pad_batch([ids], model.pad_index, min_len)
    logits, cache = forward_batch(model, batch, lengths)
    return logits[0], cache


def _backward_cnn(p, enc, dh, X, config):
    U, conv, arg = enc
    B, T, d = X.shape
    fw, F = config.filter_width, config.num_filters
    P = conv.shape[1]
    dact = np.zeros_like(conv)
    np.put_along_axis(dact, arg[:, None, :], dh[:, None, :], axis=1)
    dconv = dact * (conv > 0)
    W = p["conv_W"].reshape(F, fw * d)
    grads = {
        "conv_W": np.einsum("bpf,bpk->fk", dconv, U).reshape(F, fw, d),
        "conv_b": dconv.sum(axis=(0, 1)),
    }
    dU = dconv @ W
    dX = np.zeros_like(X)
    for j in range(fw):
        dX[:, j : j + P] += dU[:, :, j * d : (j + 1) * d]
    return dX, grads


def _backward_lstm(p, steps, dh, X, mask, config):
    B, T, _ = X.shape
    H = config.hidden
    Wx, Wh = p["lstm_Wx"], p["lstm_Wh"]
    dWx, dWh, db = np.zeros_like(Wx), np.zeros_like(Wh), np.zeros_like(p["lstm_b"])
    dX = np.zeros_like(X)
    dc = np.zeros((B, H))
    for t in reversed(range(T)):
        h_prev, c_prev, i, f, o, g, tc = steps[t]
        m = mask[:, t : t + 1]
        dh_new, dc_new = m * dh, m * dc
        do = dh_new * tc
        dc_new = dc_new + dh_new * o * (1 - tc**2)
        di, dg, df = dc_new * g, dc_new * i, dc_new * c_prev
        dz = np.concatenate([di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g**2)], axis=1)
        dWx += X[:, t].T @ dz
        dWh += h_prev.T @ dz
        db += dz.sum(axis=0)
        dX[:, t] = dz @ Wx.T
        dh = dz @ Wh.T + (1 - m) * dh
        dc = dc_new * f + (1 - m) * dc
    return dX, {"lstm_Wx": dWx, "lstm_Wh": dWh, "lstm_b": db}


def backward_batch(model: ClassifierModel, cache, dlogits: np.ndarray) -> dict:
    cfg, p = model.config, model.params
    ids, lengths, X, mask, h, enc = cache
    grads = {"out_W": dlogits.T @ h, "out_b": dlogits.sum(axis=0)}
    dh = dlogits @ p["out_W"]
    if cfg.arch is Arch.NBOW:
        dX = (dh / lengths[:, None])[:, None, :] * mask[:, :, None]
    elif cfg.arch is Arch.CNN:
        dX, g = _backward_cnn(p, enc, dh, X, cfg)
        grads.update(g)
    else:
        dX, g = _backward_lstm(p, enc, dh, X, mask, cfg)
        grads.update(g)
    dE = np.zeros_like(p["embedding"])
    if cfg.fine_tune_embeddings:
        np.add.at(dE, ids.ravel(), dX.reshape(-1, X.shape[2]))
        dE[model.pad_index] = 0.0
    grads["embedding"] = dE
    return grads


def loss_and_grad(model: ClassifierModel, batch: Sequence[tuple[Sequence[int], int]]):
    """Mean cross-entropy of ``(ids, label)`` pairs and the gradient of every tensor."""
    if not batch:
        raise ValueError("empty batch")
    cfg = model.config
    min_len = cfg.filter_width if cfg.arch is Arch.CNN else 1
    seqs = [list(ids)[: cfg.max_len] for ids, _ in batch]
    labels = np.array([y for _, y in batch])
    ids, lengths = pad_batch(seqs, model.pad_index, min_len)
    logits, cache = forward_batch(model, ids, lengths)
    loss, dlogits = softmax_cross_entropy(logits, labels)
    return loss, backward_batch(model, cache, dlogits)


# ---------------------------------------------------------------- training


@dataclass
class TrainReport:
    train_loss: list = field(default_factory=list)
    dev_accuracy: list = field(default_factory=list)
    best_epoch: int = 0
    best_dev_accuracy: float = 0.0

    def to_tsv(self) -> str:
        lines = ["epoch\ttrain_loss\tdev_accuracy"]
        for e, (l, a) in enumerate(zip(self.train_loss, self.dev_accuracy), 1):
            lines.append(f"{e}\t{l:.6f}\t{a:.6f}")
        lines.append(f"# best_epoch={self.best_epoch}\tbest_dev_accuracy={self.best_dev_accuracy:.6f}")
        return "\n".join(lines) + "\n"


class Adam:
    def __init__(self, params: dict, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        scale = self.lr * np.sqrt(1 - b2**self.t) / (1 - b1**self.t)
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            params[k] -= scale * m / (np.sqrt(v) + self.eps)


def _encode_all(model, headlines):
    return [(model.encode(h.tokens), h.label) for h in headlines]


def predict_ids_batch(model: ClassifierModel, seqs: Sequence[Sequence[int]], chunk: int = 256) -> np.ndarray:
    """Softmax probabilities ``(N, K)`` for already encoded sequences."""
    cfg = model.config
    min_len = cfg.filter_width if cfg.arch is Arch.CNN else 1
    out = []
    for s in range(0, len(seqs), chunk):
        ids, lengths = pad_batch([list(x)[: cfg.max_len] for x in seqs[s : s + chunk]], model.pad_index, min_len)
        logits, _ = forward_batch(model, ids, lengths)
        out.append(softmax(logits))
    if not out:
        return np.zeros((0, cfg.num_classes))
    return np.concatenate(out)


def accuracy_of(model: ClassifierModel, encoded) -> float:
    probs = predict_ids_batch(model, [x for x, _ in encoded])
    gold = np.array([y for _, y in encoded])
    return float((probs.argmax(axis=1) == gold).mean())


def train(model: ClassifierModel, train_set: Sequence[Headline], dev_set: Sequence[Headline]):
    """Mini-batch Adam over ``train_set``; returns the snapshot with the best dev accuracy."""
    if not train_set or not dev_set:
        raise ValueError("train and dev sets must be non-empty")
    cfg = model.config
    rng = np.random.default_rng([cfg.seed, 1])
    train_enc = _encode_all(model, train_set)
    dev_enc = _encode_all(model, dev_set)
    report = TrainReport()
    if cfg.epochs == 0:
        report.best_dev_accuracy = accuracy_of(model, dev_enc)
        return model.copy(), report
    current = model.copy()
    opt = Adam(current.params, cfg.lr)
    best = None
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_enc))
        total, n = 0.0, 0
        for s in range(0, len(order), cfg.batch_size):
            batch = [train_enc[i] for i in order[s : s + cfg.batch_size]]
            loss, grads = loss_and_grad(current, batch)
            if not cfg.fine_tune_embeddings:
                grads.pop("embedding")
            opt.step(current.params, grads)
            total += loss * len(batch)
            n += len(batch)
        acc = accuracy_of(current, dev_enc)
        report.train_loss.append(total / n)
        report.dev_accuracy.append(acc)
        if best is None or acc > report.best_dev_accuracy:
            best = current.copy()
            report.best_epoch, report.best_dev_accuracy = epoch, acc
    return best, report


def predict(model: ClassifierModel, tokens: Sequence[str]):
    """``(label, probabilities)``; ties in the argmax go to the smallest class index."""
    logits, _ = forward(model, model.encode(tokens))
    probs = softmax(logits)
    return int(np.argmax(probs)), probs


def predict_batch(model: ClassifierModel, token_seqs: Sequence[Sequence[str]]) -> np.ndarray:
    return predict_ids_batch(model, [model.encode(t) for t in token_seqs])


# ---------------------------------------------------------------- files

MODEL_MAGIC = "textvote-model"
_BOOL = {"true": True, "false": False}


def save_model(model: ClassifierModel, path) -> None:
    cfg = asdict(model.config)
    cfg["arch"] = model.config.arch.value
    cfg["init"] = model.config.init.value
    with atomic_write(path) as f:
        f.write(f"{MODEL_MAGIC} net\n")
        for key, val in cfg.items():
            if isinstance(val, bool):
                val = str(val).lower()
            f.write(f"{key} {val}\n")
        f.write(f"classes {' '.join(model.class_names)}\n")
        write_vocab(f, model.vocab)
        for name in param_shapes(model.config, 0):
            write_tensor(f, name, model.params[name])


def _net_config(r: LineReader) -> NetConfig:
    def as_bool(v):
        return _BOOL[v]

    casts = {
        "arch": Arch, "dim": int, "num_classes": int, "filter_width": int, "num_filters": int,
        "hidden": int, "max_len": int, "lr": float, "epochs": int, "batch_size": int, "seed": int,
        "fine_tune_embeddings": as_bool, "init": Init, "granularity": str,
    }
    values = {key: r.field(key, cast) for key, cast in casts.items()}
    try:
        return NetConfig(**values)
    except ValueError as e:
        raise r.error(f"invalid configuration: {e}") from None


def load_model(path) -> ClassifierModel:
    with open(path, encoding="utf-8") as f:
        r = LineReader(f, path)
    magic = r.next("header")
    if magic != f"{MODEL_MAGIC} net":
        raise DataFormatError(f"field 'magic': not a network model file ({magic[:40]!r})", path, 1)
    cfg = _net_config(r)
    classes = tuple(r.field("classes").split(" "))
    if len(classes) != cfg.num_classes:
        raise r.error("field 'classes' disagrees with num_classes")
    vocab = r.vocab()
    params = {name: r.tensor(name, shape) for name, shape in param_shapes(cfg, len(vocab) + 1).items()}
    if r.pos != len(r.lines):
        raise DataFormatError("trailing content", path, r.pos + 1)
    return ClassifierModel(cfg, vocab, params, classes)
