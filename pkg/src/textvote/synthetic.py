"""Small generated datasets with known answers, for tests and demos."""

from __future__ import annotations

import numpy as np

from .corpus import DatasetSpec, Headline


def keyword_dataset(
    num_classes: int = 18,
    n_train: int = 2000,
    n_dev: int = 500,
    markers_per_class: int = 1,
    n_filler: int = 200,
    length: tuple[int, int] = (4, 10),
    seed: int = 0,
):
    """Headlines whose class is given away by one marker token.

    Each example holds exactly one of its class's marker tokens at a random
    position among filler tokens shared by all classes. Returns
    ``(spec, train, dev)``.
    """
    rng = np.random.default_rng(seed)
    spec = DatasetSpec(tuple(f"c{k:02d}" for k in range(num_classes)), {"train": n_train, "dev": n_dev})
    markers = [[f"k{k:02d}m{j}" for j in range(markers_per_class)] for k in range(num_classes)]
    filler = [f"w{j:03d}" for j in range(n_filler)]

    def draw(n):
        out = []
        for _ in range(n):
            label = int(rng.integers(num_classes))
            size = int(rng.integers(length[0], length[1] + 1))
            toks = [filler[j] for j in rng.integers(n_filler, size=size - 1)]
            toks.insert(int(rng.integers(size)), markers[label][int(rng.integers(markers_per_class))])
            out.append(Headline(label, tuple(toks)))
        return out

    return spec, draw(n_train), draw(n_dev)


def twin_corpus(
    a: str = "高兴",
    b: str = "开心",
    c: str = "汽车",
    n_sentences: int = 600,
    n_context: int = 10,
    width: int = 3,
    seed: int = 0,
) -> list[list[str]]:
    """Unlabeled sentences where ``a`` and ``b`` share one context pool and ``c`` another.

    ``a`` and ``b`` are distributionally identical; ``c`` never shares a
    context word with them.
    """
    rng = np.random.default_rng(seed)
    pool_ab = [f"甲{i}" for i in range(n_context)]
    pool_c = [f"乙{i}" for i in range(n_context)]
    sents = []
    for _ in range(n_sentences):
        for target, pool in ((a, pool_ab), (b, pool_ab), (c, pool_c)):
            ctx = [pool[j] for j in rng.integers(len(pool), size=2 * width)]
            sents.append(ctx[:width] + [target] + ctx[width:])
    return sents
