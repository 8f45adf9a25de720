"""Fit the three neural baselines and the bag-of-words SVM on an easy 18-class task.

Each headline contains a single class-revealing token hidden among shared
filler words, so a working model should get close to 100% on held-out data.
The LSTM is the slowest to pick it up; expect about half a minute in total.

    python demos/02_classifiers.py
"""

import time

import numpy as np

from textvote.bow_svm import SvmConfig, predict_tokens, train_svm
from textvote.corpus import build_vocab
from textvote.nets import Arch, NetConfig, build_unit_vocab, init_model, train
from textvote.synthetic import keyword_dataset

spec, train_set, dev_set = keyword_dataset()
print(f"{len(train_set)} train / {len(dev_set)} dev headlines, {spec.num_classes} classes")
print("example:", spec.class_names[train_set[0].label], " ".join(train_set[0].tokens), "\n")

for arch in Arch:
    start = time.perf_counter()
    cfg = NetConfig(arch=arch, num_classes=spec.num_classes)
    model = init_model(cfg, build_unit_vocab(train_set, cfg), class_names=spec.class_names)
    _, report = train(model, train_set, dev_set)
    curve = " ".join(f"{a:.2f}" for a in report.dev_accuracy)
    print(f"{arch.value:5s} dev acc by epoch: {curve}  (best {report.best_dev_accuracy:.3f}, "
          f"{time.perf_counter() - start:.1f}s)")

start = time.perf_counter()
vocab = build_vocab((h.tokens for h in train_set), 1)
svm = train_svm(train_set, vocab, SvmConfig(), spec.num_classes, spec.class_names)
acc = np.mean([predict_tokens(svm, h.tokens)[0] == h.label for h in dev_set])
print(f"svm   dev acc {acc:.3f} ({time.perf_counter() - start:.1f}s)")

# the SVM should lean almost entirely on the marker tokens
k = 0
top = np.argsort(-svm.weights[k])[:3]
print(f"heaviest features for {spec.class_names[k]}:", [vocab.itos[i] for i in top])
