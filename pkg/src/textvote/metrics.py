"""Accuracy and macro-averaged precision / recall / F1."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .textio import atomic_write


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold classes, columns predicted classes."""

    counts: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(golds: Sequence[int], preds: Sequence[int], num_classes: int) -> ConfusionMatrix:
    g = np.asarray(golds, dtype=np.int64).reshape(-1)
    p = np.asarray(preds, dtype=np.int64).reshape(-1)
    if g.size != p.size:
        raise ValueError(f"{g.size} gold labels but {p.size} predictions")
    for name, arr in (("gold", g), ("predicted", p)):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise ValueError(f"{name} label out of range [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (g, p), 1)
    return ConfusionMatrix(counts)


def _ratio(num, den):
    out = np.zeros_like(num, dtype=np.float64)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_p: float
    macro_r: float
    macro_f1: float
    # harmonic mean of macro_p and macro_r; some shared-task scorers report this instead
    macro_f1_harmonic: float


def compute_metrics(cm: ConfusionMatrix) -> Metrics:
    """Per-class and macro scores; 0/0 counts as 0 and absent classes stay in the average."""
    c = cm.counts.astype(np.float64)
    if cm.total < 1:
        raise ValueError("empty confusion matrix")
    tp = np.diag(c)
    precision = _ratio(tp, c.sum(axis=0))
    recall = _ratio(tp, c.sum(axis=1))
    f1 = _ratio(2 * precision * recall, precision + recall)
    mp, mr = float(precision.mean()), float(recall.mean())
    harmonic = 2 * mp * mr / (mp + mr) if mp + mr > 0 else 0.0
    return Metrics(
        accuracy=float(tp.sum() / cm.total),
        precision=precision,
        recall=recall,
        f1=f1,
        macro_p=mp,
        macro_r=mr,
        macro_f1=float(f1.mean()),
        macro_f1_harmonic=harmonic,
    )


def report_items(metrics: Metrics, class_names: Sequence[str], harmonic: bool = False) -> list[tuple[str, float]]:
    items = [
        ("accuracy", metrics.accuracy),
        ("macro_p", metrics.macro_p),
        ("macro_r", metrics.macro_r),
        ("macro_f1", metrics.macro_f1_harmonic if harmonic else metrics.macro_f1),
    ]
    for k, name in enumerate(class_names):
        items += [
            (f"p_{name}", float(metrics.precision[k])),
            (f"r_{name}", float(metrics.recall[k])),
            (f"f1_{name}", float(metrics.f1[k])),
        ]
    return items


def write_report(items, tsv_path=None, json_path=None) -> None:
    if tsv_path is not None:
        with atomic_write(tsv_path) as f:
            for key, val in items:
                f.write(f"{key}\t{val:.6f}\n")
    if json_path is not None:
        with atomic_write(json_path) as f:
            json.dump(dict(items), f, indent=2, ensure_ascii=False)
            f.write("\n")
