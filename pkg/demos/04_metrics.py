"""Accuracy is not the whole story when classes are unbalanced.

A predictor that always answers the majority class scores well on accuracy
and poorly on macro F1, which weighs every class equally.

    python demos/04_metrics.py
"""

import numpy as np

from textvote.metrics import compute_metrics, confusion

rng = np.random.default_rng(0)
K = 4
gold = rng.choice(K, size=400, p=[0.7, 0.1, 0.1, 0.1])
lazy = np.zeros_like(gold)
noisy = np.where(rng.random(gold.size) < 0.75, gold, rng.integers(K, size=gold.size))

for name, pred in (("always class 0", lazy), ("75% right, else random", noisy)):
    cm = confusion(gold.tolist(), pred.tolist(), K)
    m = compute_metrics(cm)
    print(f"{name:24s} acc {m.accuracy:.3f}  macro-F1 {m.macro_f1:.3f}  "
          f"(harmonic of macro P/R: {m.macro_f1_harmonic:.3f})")
    print("   per-class F1:", np.round(m.f1, 3))
print("\nconfusion for the noisy predictor (rows gold, columns predicted):")
print(cm.counts)
