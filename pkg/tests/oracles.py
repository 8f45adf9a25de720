"""Independent reference implementations and random-case builders shared by the tests."""

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from textvote import nets
from textvote.bow_svm import hinge_objective, hinge_subgradient
from textvote.corpus import Vocabulary
from textvote.embeddings import EmbeddingTrainConfig, Variant, init_embedding_set, pair_loss_and_grads

ACCEPTANCE_LINES = []

# ---------------------------------------------------------------- numerics


def central_difference(f, params, step=1e-5, skip=None):
    """Numerical gradient of scalar ``f()`` w.r.t. every entry of the arrays in ``params`` (edited in place).

    ``skip`` maps a name to a boolean mask of entries to leave at zero.
    """
    grads = {}
    for name, arr in params.items():
        g = np.zeros_like(arr)
        flat, gflat = arr.reshape(-1), g.reshape(-1)
        mask = None if skip is None or name not in skip else np.asarray(skip[name]).reshape(-1)
        for j in range(flat.size):
            if mask is not None and mask[j]:
                continue
            old = flat[j]
            flat[j] = old + step
            up = f()
            flat[j] = old - step
            down = f()
            flat[j] = old
            gflat[j] = (up - down) / (2 * step)
        grads[name] = g
    return grads


def max_rel_error(analytic, numeric, floor=1e-6):
    """Largest ``|a - n| / max(|a|, |n|, floor)`` over all entries.

    The floor turns the measure into an absolute one (1e-10 at the 1e-4
    threshold) for entries whose true gradient is essentially zero.
    """
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float((np.abs(a - n) / denom).max()) if a.size else 0.0


def cosine(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


# ---------------------------------------------------------------- n-grams


def ngram_oracle(word, min_n, max_n):
    """Every (start, end) slice of the wrapped word, filtered by length, minus the whole thing."""
    w = "<" + word + ">"
    out = []
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            if min_n <= j - i <= max_n and not (i == 0 and j == len(w)):
                out.append(w[i:j])
    return Counter(out)


# ---------------------------------------------------------------- voting


def vote_oracle(labels, confidences, soft=False):
    """Winner and its mean confidence, by explicit tallies over the distinct labels."""
    tally = {}
    for lab, conf in zip(labels, confidences):
        n, s = tally.get(lab, (0, Fraction(0)))
        tally[lab] = (n + 1, s + Fraction(conf))
    key = (lambda lab: tally[lab][1]) if soft else (lambda lab: tally[lab][0])
    top = max(key(lab) for lab in tally)
    cands = [lab for lab in tally if key(lab) == top]
    best_mean = max(tally[lab][1] / tally[lab][0] for lab in cands)
    cands = [lab for lab in cands if tally[lab][1] / tally[lab][0] == best_mean]
    winner = min(cands)
    return winner, tally[winner][1] / tally[winner][0]


def nested_eval(node, table, soft=False):
    """Evaluate a tree of nested lists (leaf = system id string) with :func:`vote_oracle`."""
    if isinstance(node, str):
        return table[node]
    results = [nested_eval(c, table, soft) for c in node]
    lab, conf = vote_oracle([r[0] for r in results], [r[1] for r in results], soft)
    return lab, float(conf)


def random_nested_tree(rng, systems, depth=0, max_depth=3):
    if depth == max_depth or (depth > 0 and rng.random() < 0.35):
        return systems[int(rng.integers(len(systems)))]
    return [random_nested_tree(rng, systems, depth + 1, max_depth) for _ in range(int(rng.integers(1, 5)))]


# ---------------------------------------------------------------- metrics


def metrics_oracle(golds, preds, K):
    """Accuracy and macro P/R/F1 from per-example loops, no matrix."""
    n = len(golds)
    correct = 0
    for g, p in zip(golds, preds):
        if g == p:
            correct += 1
    ps, rs, fs = [], [], []
    for k in range(K):
        tp = fp = fn = 0
        for g, p in zip(golds, preds):
            if p == k and g == k:
                tp += 1
            elif p == k:
                fp += 1
            elif g == k:
                fn += 1
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        ps.append(prec)
        rs.append(rec)
        fs.append(f1)
    return {
        "accuracy": correct / n,
        "precision": ps,
        "recall": rs,
        "f1": fs,
        "macro_p": sum(ps) / K,
        "macro_r": sum(rs) / K,
        "macro_f1": sum(fs) / K,
    }


# ---------------------------------------------------------------- gradient cases

GRAD_WORDS = ["大家", "高兴", "好", "开心车", "家好", "车"]


def small_embedding_set(variant, seed=0, dim=5, clusters=3, noise=0.5):
    """A tiny embedding set with every table randomised so all gradients are non-trivial."""
    vocab = Vocabulary(GRAD_WORDS, [6, 5, 4, 3, 2, 1])
    cfg = EmbeddingTrainConfig(dim=dim, variant=variant, clusters=clusters, min_n=1, max_n=3, min_count=1)
    rng = np.random.default_rng(seed)
    eset = init_embedding_set(vocab, cfg, rng)
    eset.in_vectors[:] = rng.normal(0, noise, eset.in_vectors.shape)
    eset.out_vectors[:] = rng.normal(0, noise, eset.out_vectors.shape)
    eset.sub_vectors[:] = rng.normal(0, noise, eset.sub_vectors.shape)
    return eset


def embedding_grad_case(variant, seed):
    """Max relative error of one random pair-loss gradient against finite differences."""
    rng = np.random.default_rng(seed)
    eset = small_embedding_set(variant, seed=seed, dim=4)
    V = eset.vocab.n_tokens
    w, o = (int(x) for x in rng.integers(V, size=2))
    negs = rng.integers(V, size=3)
    ctx = rng.normal(size=eset.dim) if variant is Variant.CWE_L else None
    _, grads = pair_loss_and_grads(eset, w, o, negs, ctx)
    tables = {"in": eset.in_vectors, "sub": eset.sub_vectors, "out": eset.out_vectors}
    num = central_difference(lambda: pair_loss_and_grads(eset, w, o, negs, ctx)[0], tables)
    sub_reached = bool(np.any(grads["sub"])) or variant is Variant.SGNS
    return max(max_rel_error(grads[k], num[k]) for k in tables), sub_reached


def random_net(arch, seed, dim=8, F=4, H=6, K=3, fw=3, fine_tune=True, n_tokens=5):
    rng = np.random.default_rng(seed)
    cfg = nets.NetConfig(
        arch=arch, dim=dim, num_classes=K, filter_width=fw, num_filters=F, hidden=H, max_len=6,
        seed=seed, fine_tune_embeddings=fine_tune,
    )
    vocab = Vocabulary([f"t{i}" for i in range(n_tokens)], [1] * n_tokens)
    model = nets.init_model(cfg, vocab)
    for k, v in model.params.items():
        v[:] = rng.normal(0, 0.5, v.shape)
    model.params["embedding"][model.pad_index] = 0.0
    return model


def random_batch(rng, model, size=3, max_len=6):
    n_ids = len(model.vocab)  # real tokens plus UNK
    batch = []
    for _ in range(size):
        L = int(rng.integers(1, max_len + 1))
        batch.append((list(rng.integers(n_ids, size=L)), int(rng.integers(model.config.num_classes))))
    return batch


def net_loss(model, batch):
    """Forward-only mean cross-entropy, the scalar the finite differences probe."""
    cfg = model.config
    min_len = cfg.filter_width if cfg.arch is nets.Arch.CNN else 1
    ids, lengths = nets.pad_batch([list(x)[: cfg.max_len] for x, _ in batch], model.pad_index, min_len)
    logits, _ = nets.forward_batch(model, ids, lengths)
    return nets.softmax_cross_entropy(logits, np.array([y for _, y in batch]))[0]


def net_grad_case(arch, seed, fine_tune=True):
    """Max relative error of every parameter gradient of a random small net."""
    rng = np.random.default_rng(seed + 10_000)
    model = random_net(arch, seed, fine_tune=fine_tune)
    batch = random_batch(rng, model)
    _, grads = nets.loss_and_grad(model, batch)
    pad = np.zeros(model.params["embedding"].shape, dtype=bool)
    pad[model.pad_index] = True
    skip = {"embedding": pad if fine_tune else np.ones_like(pad)}
    num = central_difference(lambda: net_loss(model, batch), model.params, skip=skip)
    err = max(max_rel_error(grads[k], num[k]) for k in model.params)
    pad_ok = not np.any(grads["embedding"][model.pad_index])
    return err, pad_ok


def softmax_grad_case(seed):
    rng = np.random.default_rng(seed)
    B, K = int(rng.integers(1, 5)), int(rng.integers(2, 7))
    logits = rng.normal(0, 2, (B, K))
    labels = rng.integers(K, size=B)
    _, d = nets.softmax_cross_entropy(logits, labels)
    num = central_difference(lambda: nets.softmax_cross_entropy(logits, labels)[0], {"z": logits})["z"]
    return max_rel_error(d, num)


def hinge_grad_case(seed, min_gap=1e-3):
    """Subgradient check at a point where no margin is within ``min_gap`` of 1."""
    rng = np.random.default_rng(seed)
    while True:
        n, d = int(rng.integers(2, 8)), int(rng.integers(1, 6))
        X = rng.normal(size=(n, d))
        y = rng.choice([-1.0, 1.0], size=n)
        w = rng.normal(size=d)
        b = float(rng.normal())
        C = float(rng.uniform(0.1, 3.0))
        if np.all(np.abs(y * (X @ w + b) - 1.0) > min_gap):
            break
    dw, db = hinge_subgradient(w, b, X, y, C)
    bb = np.array([b])
    num = central_difference(lambda: hinge_objective(w, float(bb[0]), X, y, C), {"w": w, "b": bb})
    # the objective is piecewise quadratic, so the differences are exact up to
    # round-off (~1e-10 here); the floor keeps exact-zero entries from amplifying it
    return max(max_rel_error(dw, num["w"], floor=1e-3), max_rel_error([db], num["b"], floor=1e-3))
