"""Train the four embedding variants on a toy corpus and look at what they learn.

Two words (高兴, 开心) appear in exactly the same kind of context; a third
(汽车) never shares a context word with them. Every variant should put the
first two close together. fastText also gives a vector to a word it never
saw, built from its character n-grams.

    python demos/01_embeddings.py
"""

import numpy as np

from textvote.embeddings import EmbeddingTrainConfig, Variant, nearest_neighbors, train_embeddings
from textvote.synthetic import twin_corpus


def cos(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b) + 1e-12))


corpus = twin_corpus()
print(f"{len(corpus)} sentences, e.g. {' '.join(corpus[0])}\n")

for variant in Variant:
    cfg = EmbeddingTrainConfig(dim=20, window=3, epochs=3, min_count=1, variant=variant, seed=1)
    eset = train_embeddings(corpus, cfg)
    a, b, c = (eset.compose(w) for w in ("高兴", "开心", "汽车"))
    top = ", ".join(f"{w} {s:.2f}" for w, s in nearest_neighbors(eset, "高兴", 3))
    print(f"{variant.value:9s} cos(高兴,开心)={cos(a, b):.3f}  cos(高兴,汽车)={cos(a, c):.3f}  nn: {top}")
    if variant is Variant.FASTTEXT:
        oov = eset.compose("高车")
        print(f"{'':9s} unseen 高车 -> |v|={np.linalg.norm(oov):.3f}, cos with 高兴 {cos(oov, a):.3f}")
