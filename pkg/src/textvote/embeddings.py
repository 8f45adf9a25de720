"""Skip-gram negative-sampling embeddings with character and subword composition.

Four variants share one trainer:

* ``sgns``      plain skip-gram, the word row is the word vector.
* ``cwe-p``     character-enhanced, each character has begin/middle/end vectors.
* ``cwe-l``     character-enhanced, each character has ``clusters`` vectors and the
                one closest to the current context is used.
* ``fasttext``  the word row is averaged with the vectors of its boundary-marked
                character n-grams; words never seen in training still get a vector.

Every composed vector is a weighted sum of parameter rows, so one generic
routine (:meth:`EmbeddingSet.parts`) drives composition and gradient routing.
"""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import DataFormatError, Vocabulary, build_vocab, chars_of
from .textio import atomic_write, parse_values, write_matrix_rows


class Variant(str, Enum):
    SGNS = "sgns"
    CWE_P = "cwe-p"
    CWE_L = "cwe-l"
    FASTTEXT = "fasttext"


POSITIONS = ("B", "M", "E")


@dataclass(frozen=True)
class EmbeddingTrainConfig:
    dim: int = 300
    window: int = 5
    epochs: int = 5
    negatives: int = 5
    min_count: int = 5
    lr0: float = 0.025
    variant: Variant = Variant.SGNS
    clusters: int = 3
    min_n: int = 1
    max_n: int = 3
    seed: int = 1
    # word2vec-style frequent-word subsampling threshold; 0 disables it
    sample: float = 0.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.dim < 1 or self.window < 1 or self.negatives < 1:
            raise ValueError("dim, window and negatives must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 1 <= self.min_n <= self.max_n:
            raise ValueError("need 1 <= min_n <= max_n")
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.lr0 < 0 or self.sample < 0:
            raise ValueError("lr0 and sample must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


# ---------------------------------------------------------------- sampling


class NegativeSamplingTable:
    """Unigram distribution raised to the 3/4 power."""

    def __init__(self, counts: Sequence[int], power: float = 0.75):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.size == 0:
            raise ValueError("empty vocabulary")
        if np.any(counts <= 0):
            raise ValueError("counts must be positive")
        weights = counts**power
        self.probs = weights / weights.sum()
        self.cdf = np.cumsum(self.probs)
        self.cdf[-1] = 1.0

    def __len__(self) -> int:
        return self.probs.size

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self.cdf, rng.random(size), side="right")
        return np.minimum(idx, self.probs.size - 1)


def build_sampling_table(vocab: Vocabulary) -> NegativeSamplingTable:
    return NegativeSamplingTable(vocab.counts)


# ---------------------------------------------------------------- n-grams


def extract_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of ``<word>`` with lengths in ``[min_n, max_n]``.

    Repeated n-grams are kept (the result is a multiset). The whole wrapped
    word is left out since it is represented by the word's own row.
    """
    if not word:
        raise ValueError("empty word")
    if not 1 <= min_n <= max_n:
        raise ValueError("need 1 <= min_n <= max_n")
    wrapped = f"<{word}>"
    full = len(wrapped)
    grams = []
    for n in range(min_n, min(max_n, full) + 1):
        if n == full:
            continue
        for i in range(full - n + 1):
            grams.append(wrapped[i : i + n])
    return grams


def _position(k: int, n: int) -> str:
    if k == 0:
        return "B"
    return "E" if k == n - 1 else "M"


def _cosines(matrix: np.ndarray, vec: np.ndarray) -> np.ndarray:
    qn = np.linalg.norm(vec)
    norms = np.linalg.norm(matrix, axis=1)
    denom = norms * qn
    dots = matrix @ vec
    out = np.zeros(matrix.shape[0])
    ok = denom > 0
    out[ok] = dots[ok] / denom[ok]
    return out


# ---------------------------------------------------------------- the set


class EmbeddingSet:
    """Word rows, context rows and the variant's character/n-gram table.

    ``in_vectors`` and ``out_vectors`` have one row per real vocabulary
    token (the UNK slot has no row). ``sub_vectors`` rows are addressed by
    the string keys in ``sub_keys``: ``"高@B"`` for position vectors,
    ``"高#2"`` for cluster vectors and the n-gram itself for fastText.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        in_vectors: np.ndarray,
        out_vectors: np.ndarray,
        variant: Variant | str = Variant.SGNS,
        sub_keys: Sequence[str] = (),
        sub_vectors: np.ndarray | None = None,
        config: EmbeddingTrainConfig | None = None,
        clusters: int = 1,
        ngram_range: tuple[int, int] | None = None,
        sub_variant: Variant | str | None = None,
    ):
        self.vocab = vocab
        self.in_vectors = np.asarray(in_vectors, dtype=np.float64)
        self.out_vectors = np.asarray(out_vectors, dtype=np.float64)
        self.variant = Variant(variant)
        self.config = config
        self.clusters = int(clusters)
        if self.variant is Variant.FASTTEXT and ngram_range is None:
            raise ValueError("fasttext needs an n-gram range")
        self.ngram_range = ngram_range
        self.sub_variant = Variant(sub_variant) if sub_variant is not None else self.variant
        n, dim = self.in_vectors.shape
        if n != vocab.n_tokens or self.out_vectors.shape != (n, dim):
            raise ValueError("matrix rows must match the vocabulary")
        self.sub_keys = list(sub_keys)
        if sub_vectors is None:
            sub_vectors = np.zeros((0, dim))
        self.sub_vectors = np.asarray(sub_vectors, dtype=np.float64).reshape(-1, dim)
        if self.sub_vectors.shape[0] != len(self.sub_keys):
            raise ValueError("sub table keys and rows differ in length")
        self.sub_index = {k: i for i, k in enumerate(self.sub_keys)}
        self._rows_cache: dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self.in_vectors.shape[1]

    def copy(self) -> "EmbeddingSet":
        return EmbeddingSet(
            self.vocab,
            self.in_vectors.copy(),
            self.out_vectors.copy(),
            self.variant,
            self.sub_keys,
            self.sub_vectors.copy(),
            self.config,
            self.clusters,
            self.ngram_range,
            self.sub_variant,
        )

    # -- composition ------------------------------------------------------

    def _sub_rows(self, word_index: int) -> np.ndarray:
        """Sub-table rows a word draws on; shape (N, S) for cwe-l, flat otherwise."""
        rows = self._rows_cache.get(word_index)
        if rows is not None:
            return rows
        word = self.vocab.itos[word_index]
        if self.variant is Variant.CWE_P:
            cs = chars_of(word)
            rows = np.array([self.sub_index[f"{c}@{_position(k, len(cs))}"] for k, c in enumerate(cs)])
        elif self.variant is Variant.CWE_L:
            rows = np.array(
                [[self.sub_index[f"{c}#{s}"] for s in range(self.clusters)] for c in chars_of(word)]
            )
        elif self.variant is Variant.FASTTEXT:
            rows = np.array([self.sub_index[g] for g in extract_ngrams(word, *self.ngram_range)], dtype=np.int64)
        else:
            rows = np.zeros(0, dtype=np.int64)
        self._rows_cache[word_index] = rows
        return rows

    def parts(self, word_index: int, context: np.ndarray | None = None):
        """``(word_weight, sub_rows, sub_weight)`` such that the composed vector is
        ``word_weight * in_vectors[i] + sub_weight * sub_vectors[sub_rows].sum(0)``."""
        rows = self._sub_rows(word_index)
        if self.variant is Variant.SGNS:
            return 1.0, rows, 0.0
        if self.variant is Variant.FASTTEXT:
            w = 1.0 / (1 + rows.size)
            return w, rows, w
        if self.variant is Variant.CWE_L:
            rows = np.array([r[self._pick_cluster(r, context)] for r in rows])
        return 0.5, rows, 0.5 / rows.size

    def _pick_cluster(self, rows: np.ndarray, context: np.ndarray | None) -> int:
        if context is None or rows.size == 1:
            return 0
        if not np.any(context):
            return 0
        return int(np.argmax(_cosines(self.sub_vectors[rows], context)))

    def compose_index(self, word_index: int, context: np.ndarray | None = None) -> np.ndarray:
        ww, rows, sw = self.parts(word_index, context)
        v = ww * self.in_vectors[word_index]
        if rows.size:
            v = v + sw * self.sub_vectors[rows].sum(axis=0)
        return v

    def compose(self, word: str, context: np.ndarray | None = None) -> np.ndarray:
        i = self.vocab.stoi.get(word)
        if i is not None:
            return self.compose_index(i, context)
        if self.ngram_range is None:
            raise KeyError(f"{word!r} is not in the vocabulary")
        rows = [self.sub_index[g] for g in extract_ngrams(word, *self.ngram_range) if g in self.sub_index]
        if not rows:
            return np.zeros(self.dim)
        return self.sub_vectors[rows].mean(axis=0)

    def word_vectors(self) -> np.ndarray:
        """Composed vectors of every real token, context-free."""
        if self.variant is Variant.SGNS:
            return self.in_vectors.copy()
        return np.stack([self.compose_index(i) for i in range(self.vocab.n_tokens)])


def compose_word_vector(word: str, eset: EmbeddingSet, context: np.ndarray | None = None) -> np.ndarray:
    return eset.compose(word, context)


def assign_cluster(char: str, context_mean: np.ndarray, eset: EmbeddingSet) -> int:
    """Index of the character's cluster vector most cosine-similar to ``context_mean``."""
    if eset.sub_variant is not Variant.CWE_L:
        raise ValueError("cluster assignment needs a cwe-l embedding set")
    try:
        rows = np.array([eset.sub_index[f"{char}#{s}"] for s in range(eset.clusters)])
    except KeyError:
        raise KeyError(f"unknown character {char!r}") from None
    return eset._pick_cluster(rows, np.asarray(context_mean, dtype=np.float64))


# ---------------------------------------------------------------- SGNS step


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return np.exp(_log_sigmoid(x))


def sgns_pair_grads(v: np.ndarray, u_pos: np.ndarray, u_neg: np.ndarray):
    """Loss ``-log s(u_pos.v) - sum log s(-u_neg.v)`` and its gradients.

    Returns ``(loss, d_v, d_u_pos, d_u_neg)``; ``u_neg`` has one row per negative.
    """
    u_neg = np.asarray(u_neg, dtype=np.float64).reshape(-1, v.size)
    x_pos = float(u_pos @ v)
    x_neg = u_neg @ v
    loss = -_log_sigmoid(x_pos) - float(_log_sigmoid(-x_neg).sum())
    g_pos = _sigmoid(x_pos) - 1.0
    g_neg = _sigmoid(x_neg)
    d_v = g_pos * u_pos + g_neg @ u_neg
    return loss, d_v, g_pos * v, np.outer(g_neg, v)


def draw_negatives(table: NegativeSamplingTable, positive: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` negatives, redrawing any that hit ``positive`` (up to 100 times, then dropped)."""
    negs = table.sample(rng, count)
    bad = np.flatnonzero(negs == positive)
    if bad.size == 0:
        return negs
    keep = np.ones(count, dtype=bool)
    for j in bad:
        for _ in range(100):
            negs[j] = table.sample(rng, 1)[0]
            if negs[j] != positive:
                break
        else:
            keep[j] = False
    return negs[keep]


def sgns_pair_update(
    v_in: np.ndarray,
    context_index: int,
    out_vectors: np.ndarray,
    table: NegativeSamplingTable,
    lr: float,
    negatives: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """One SGNS step on the context rows; returns the loss gradient w.r.t. ``v_in``.

    ``out_vectors`` is updated in place. The caller spreads ``-lr * grad`` over
    whatever rows composed ``v_in``.
    """
    negs = draw_negatives(table, context_index, negatives, rng)
    _, d_v, d_pos, d_neg = sgns_pair_grads(v_in, out_vectors[context_index], out_vectors[negs])
    if lr > 0:
        out_vectors[context_index] -= lr * d_pos
        if negs.size:
            np.subtract.at(out_vectors, negs, lr * d_neg)
    return d_v


def pair_loss_and_grads(
    eset: EmbeddingSet,
    word_index: int,
    context_index: int,
    negative_indices: Sequence[int],
    context: np.ndarray | None = None,
):
    """Pair loss for a center word and dense gradients for all three tables.

    The cwe-l cluster choice is treated as fixed (it is piecewise constant).
    Returns ``(loss, {"in": ..., "sub": ..., "out": ...})``.
    """
    negs = np.asarray(negative_indices, dtype=np.int64)
    ww, rows, sw = eset.parts(word_index, context)
    v = eset.compose_index(word_index, context)
    loss, d_v, d_pos, d_neg = sgns_pair_grads(v, eset.out_vectors[context_index], eset.out_vectors[negs])
    g_in = np.zeros_like(eset.in_vectors)
    g_in[word_index] += ww * d_v
    g_sub = np.zeros_like(eset.sub_vectors)
    if rows.size:
        np.add.at(g_sub, rows, sw * d_v)
    g_out = np.zeros_like(eset.out_vectors)
    g_out[context_index] += d_pos
    if negs.size:
        np.add.at(g_out, negs, d_neg)
    return loss, {"in": g_in, "sub": g_sub, "out": g_out}


# ---------------------------------------------------------------- training


def init_embedding_set(vocab: Vocabulary, config: EmbeddingTrainConfig, rng: np.random.Generator) -> EmbeddingSet:
    dim = config.dim
    bound = 0.5 / dim
    in_vectors = rng.uniform(-bound, bound, (vocab.n_tokens, dim))
    out_vectors = np.zeros((vocab.n_tokens, dim))
    keys: list[str] = []
    variant = config.variant
    if variant in (Variant.CWE_P, Variant.CWE_L):
        chars = sorted({c for w in vocab.itos for c in chars_of(w)})
        if variant is Variant.CWE_P:
            keys = [f"{c}@{p}" for c in chars for p in POSITIONS]
            sub = rng.uniform(-bound, bound, (len(keys), dim))
        else:
            keys = [f"{c}#{s}" for c in chars for s in range(config.clusters)]
            base = rng.uniform(-bound, bound, (len(chars), dim))
            # clusters start as small perturbations of a shared base so they can drift apart
            noise = rng.uniform(-0.1 * bound, 0.1 * bound, (len(chars), config.clusters, dim))
            sub = (base[:, None, :] + noise).reshape(-1, dim)
    elif variant is Variant.FASTTEXT:
        seen: dict[str, None] = {}
        for w in vocab.itos:
            for g in extract_ngrams(w, config.min_n, config.max_n):
                seen.setdefault(g, None)
        keys = sorted(seen)
        sub = rng.uniform(-bound, bound, (len(keys), dim))
    else:
        sub = np.zeros((0, dim))
    return EmbeddingSet(
        vocab,
        in_vectors,
        out_vectors,
        variant,
        keys,
        sub,
        config,
        clusters=config.clusters if variant is Variant.CWE_L else 1,
        ngram_range=(config.min_n, config.max_n) if variant is Variant.FASTTEXT else None,
    )


class _Schedule:
    """Linear learning-rate decay from lr0 down to lr0 * 1e-4, per processed center word."""

    def __init__(self, lr0: float, total: int):
        self.lr0 = lr0
        self.total = max(total, 1)
        self.done = 0
        self.lock = threading.Lock()

    def step(self) -> float:
        with self.lock:
            frac = self.done / self.total
            self.done += 1
        return self.lr0 * max(1e-4, 1.0 - frac)


def _keep_mask(ids: np.ndarray, keep_prob: np.ndarray | None, rng: np.random.Generator) -> np.ndarray:
    if keep_prob is None:
        return ids
    return ids[rng.random(ids.size) < keep_prob[ids]]


def _train_shard(eset, sentences, config, table, schedule, rng, keep_prob):
    in_vec, sub_vec, out_vec = eset.in_vectors, eset.sub_vectors, eset.out_vectors
    window, negatives = config.window, config.negatives
    use_context = eset.variant is Variant.CWE_L and eset.clusters > 1
    for _ in range(config.epochs):
        for sent in sentences:
            sent = _keep_mask(sent, keep_prob, rng)
            n = sent.size
            for t in range(n):
                lr = schedule.step()
                b = int(rng.integers(1, window + 1))
                lo, hi = max(0, t - b), min(n, t + b + 1)
                ctx = np.concatenate([sent[lo:t], sent[t + 1 : hi]])
                if ctx.size == 0:
                    continue
                center = int(sent[t])
                context = in_vec[ctx].mean(axis=0) if use_context else None
                ww, rows, sw = eset.parts(center, context)
                for o in ctx:
                    v = ww * in_vec[center]
                    if rows.size:
                        v = v + sw * sub_vec[rows].sum(axis=0)
                    d_v = sgns_pair_update(v, int(o), out_vec, table, lr, negatives, rng)
                    in_vec[center] -= (lr * ww) * d_v
                    if rows.size:
                        np.subtract.at(sub_vec, rows, (lr * sw) * d_v)


def train_embeddings(corpus: Iterable[Sequence[str]], config: EmbeddingTrainConfig) -> EmbeddingSet:
    """Train one embedding set over a stream of token lines.

    With ``config.workers == 1`` the result is a pure function of the corpus
    and the seed. More workers split the sentences into shards that update
    shared parameters without locking, which trades reproducibility for speed.
    """
    sentences = [list(s) for s in corpus]
    if not any(sentences):
        raise ValueError("empty corpus")
    vocab = build_vocab(sentences, config.min_count)
    rng = np.random.default_rng(config.seed)
    eset = init_embedding_set(vocab, config, rng)
    if config.epochs == 0:
        return eset
    ids = [np.array([vocab.stoi[t] for t in s if t in vocab.stoi], dtype=np.int64) for s in sentences]
    ids = [s for s in ids if s.size > 1]
    table = build_sampling_table(vocab)
    keep_prob = None
    if config.sample > 0:
        counts = np.asarray(vocab.counts, dtype=np.float64)
        thresh = config.sample * counts.sum()
        keep_prob = np.minimum(1.0, (np.sqrt(counts / thresh) + 1) * thresh / counts)
    schedule = _Schedule(config.lr0, config.epochs * sum(s.size for s in ids))
    if config.workers == 1:
        _train_shard(eset, ids, config, table, schedule, rng, keep_prob)
        return eset
    shards = [ids[k :: config.workers] for k in range(config.workers)]
    seeds = np.random.SeedSequence(config.seed).spawn(config.workers)
    threads = [
        threading.Thread(
            target=_train_shard,
            args=(eset, shard, config, table, schedule, np.random.default_rng(s), keep_prob),
        )
        for shard, s in zip(shards, seeds)
    ]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    return eset


# ---------------------------------------------------------------- queries


def nearest_neighbors(eset: EmbeddingSet, token: str, k: int = 10) -> list[tuple[str, float]]:
    """Top-``k`` vocabulary tokens by cosine to ``token``'s composed vector.

    The query itself is excluded; equal similarities are ordered by token.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query = eset.compose(token)
    if not np.any(query):
        raise ValueError(f"{token!r} has a zero vector")
    sims = _cosines(eset.word_vectors(), query)
    skip = eset.vocab.stoi.get(token)
    ranked = sorted(
        ((float(s), t) for i, (t, s) in enumerate(zip(eset.vocab.itos, sims)) if i != skip),
        key=lambda st: (-st[0], st[1]),
    )
    return [(t, s) for s, t in ranked[:k]]


def single_char_audit(neighbors: Iterable) -> int:
    """How many neighbours are one-character tokens.

    Accepts bare tokens or ``(token, score)`` pairs. A large count for a short
    Chinese query word hints that the subword unigrams dominate the vectors.
    """
    n = 0
    for item in neighbors:
        tok = item if isinstance(item, str) else item[0]
        n += len(tok) == 1
    return n


# ---------------------------------------------------------------- files


def sidecar_path(path) -> Path:
    return Path(f"{path}.sub")


def save_embeddings(eset: EmbeddingSet, path) -> None:
    """Write composed word vectors, plus a ``.sub`` sidecar with the character/n-gram table."""
    vectors = eset.word_vectors()
    with atomic_write(path) as f:
        f.write(f"{eset.vocab.n_tokens} {eset.dim}\n")
        write_matrix_rows(f, eset.vocab.itos, vectors)
    if eset.sub_keys:
        header = [eset.sub_variant.value, str(len(eset.sub_keys)), str(eset.dim)]
        if eset.sub_variant is Variant.CWE_L:
            header.append(str(eset.clusters))
        elif eset.sub_variant is Variant.FASTTEXT:
            header += [str(eset.ngram_range[0]), str(eset.ngram_range[1])]
        with atomic_write(sidecar_path(path)) as f:
            f.write(" ".join(header) + "\n")
            write_matrix_rows(f, eset.sub_keys, eset.sub_vectors)


def _read_rows(f, count, dim, path, first_lineno):
    keys, rows = [], []
    lineno = first_lineno
    for lineno, line in enumerate(f, first_lineno):
        fields = line.rstrip("\n").split(" ")
        if len(fields) < 2 or not fields[0]:
            raise DataFormatError("malformed row", path, lineno)
        if len(keys) == count:
            raise DataFormatError(f"more rows than the {count} announced", path, lineno)
        keys.append(fields[0])
        rows.append(parse_values(fields[1:], dim, path, lineno))
    if len(keys) != count:
        raise DataFormatError(f"header announces {count} rows, found {len(keys)}", path, lineno)
    return keys, np.array(rows).reshape(count, dim)


def _header_ints(line, n_min, n_max, path, lineno=1):
    fields = line.split()
    if not n_min <= len(fields) <= n_max:
        raise DataFormatError(f"malformed header {line.strip()!r}", path, lineno)
    try:
        return [int(x) for x in fields]
    except ValueError:
        raise DataFormatError(f"malformed header {line.strip()!r}", path, lineno) from None


def load_subword_table(path):
    """Parse a ``.sub`` sidecar into ``(variant, keys, matrix, extra_ints)``."""
    with open(path, encoding="utf-8") as f:
        head = f.readline().split()
        if len(head) < 3:
            raise DataFormatError("malformed sidecar header", path, 1)
        try:
            variant = Variant(head[0])
        except ValueError:
            raise DataFormatError(f"unknown variant tag {head[0]!r}", path, 1) from None
        n, dim, *extra = _header_ints(" ".join(head[1:]), 2, 4, path)
        keys, matrix = _read_rows(f, n, dim, path, 2)
    return variant, keys, matrix, extra


def load_embeddings(path) -> EmbeddingSet:
    """Read a word-vector file back as a plain (``sgns``) set.

    A fastText sidecar, when present, is attached so that out-of-vocabulary
    words can still be composed from their n-grams.
    """
    with open(path, encoding="utf-8") as f:
        n, dim = _header_ints(f.readline(), 2, 2, path)
        if n < 1 or dim < 1:
            raise DataFormatError("header needs positive sizes", path, 1)
        tokens, vectors = _read_rows(f, n, dim, path, 2)
    vocab = Vocabulary(tokens, [1] * n)
    kwargs = {}
    side = sidecar_path(path)
    if side.exists():
        variant, keys, matrix, extra = load_subword_table(side)
        if matrix.shape[1] != dim:
            raise DataFormatError("sidecar dimension differs from the word vectors", side, 1)
        kwargs = dict(sub_keys=keys, sub_vectors=matrix, sub_variant=variant)
        if variant is Variant.FASTTEXT and len(extra) == 2:
            kwargs["ngram_range"] = (extra[0], extra[1])
        elif variant is Variant.CWE_L and len(extra) == 1:
            kwargs["clusters"] = extra[0]
    return EmbeddingSet(vocab, vectors, np.zeros_like(vectors), Variant.SGNS, **kwargs)


def config_dict(config: EmbeddingTrainConfig) -> dict:
    d = asdict(config)
    d["variant"] = config.variant.value
    return d
