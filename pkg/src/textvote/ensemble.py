"""Plurality voting over prediction sources, arranged as a tree of votes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .corpus import DataFormatError
from .textio import atomic_write, fmt_values

VOTE_KEYWORD = "vote"
INDENT = "  "

PAPER_ARCHS = ("nbow", "cnn", "lstm")
PAPER_EMBEDDINGS = ("CWE-L-W5", "CWE-P-W5", "FastText-W5", "CWE-L-W11", "CWE-P-W11")
PAPER_BOW = "bow-svm"


@dataclass(frozen=True)
class Prediction:
    label: int
    confidence: float

    def __post_init__(self):
        if self.label < 0:
            raise ValueError(f"negative label {self.label}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Leaf:
    system: str

    def __post_init__(self):
        if not self.system or self.system == VOTE_KEYWORD or any(c.isspace() for c in self.system):
            raise ValueError(f"invalid system id {self.system!r}")


@dataclass(frozen=True)
class Vote:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("a vote needs at least one child")


VoteTree = Union[Leaf, Vote]


def plurality_vote(votes: Sequence[Prediction], soft: bool = False) -> Prediction:
    """Most frequent label wins.

    Ties go to the label whose votes have the higher mean confidence, then to
    the smaller label. With ``soft`` the labels are ranked by summed
    confidence instead of by count. The result carries the mean confidence
    of the winning label's votes. Means are compared exactly (as fractions)
    so ties do not depend on summation order.
    """
    if not votes:
        raise ValueError("no votes")
    groups: dict[int, list[Fraction]] = {}
    for v in votes:
        groups.setdefault(v.label, []).append(Fraction(v.confidence))

    def rank(label):
        confs = groups[label]
        total = sum(confs, Fraction(0))
        mean = total / len(confs)
        primary = total if soft else len(confs)
        return (primary, mean, -label)

    winner = max(groups, key=rank)
    confs = groups[winner]
    return Prediction(winner, float(sum(confs, Fraction(0)) / len(confs)))


def leaves(tree: VoteTree) -> list[str]:
    if isinstance(tree, Leaf):
        return [tree.system]
    return [s for child in tree.children for s in leaves(child)]


def flatten(tree: VoteTree) -> Vote:
    """The same systems in one flat vote."""
    return Vote(tuple(Leaf(s) for s in leaves(tree)))


def eval_tree(tree: VoteTree, predictions: Mapping[str, Prediction], soft: bool = False) -> Prediction:
    missing = [s for s in leaves(tree) if s not in predictions]
    if missing:
        raise KeyError(f"no prediction for system {missing[0]!r}")
    return _eval(tree, predictions, soft)


def _eval(tree, predictions, soft):
    if isinstance(tree, Leaf):
        return predictions[tree.system]
    return plurality_vote([_eval(c, predictions, soft) for c in tree.children], soft)


def paper_system_ids() -> tuple[list[str], str]:
    """Default ids: ``nbow/CWE-L-W5`` ... ``lstm/CWE-P-W11`` (architecture-major) and the BoW id."""
    return [f"{a}/{e}" for a in PAPER_ARCHS for e in PAPER_EMBEDDINGS], PAPER_BOW


def build_paper_topology(baseline_ids: Sequence[str], bow_id: str) -> Vote:
    """Three per-architecture votes over five embeddings each, plus the BoW SVM, voted at the root.

    ``baseline_ids`` lists 15 systems architecture-major: five NBoW, five CNN,
    five LSTM.
    """
    n = len(PAPER_ARCHS) * len(PAPER_EMBEDDINGS)
    if len(baseline_ids) != n:
        raise ValueError(f"expected {n} baseline systems, got {len(baseline_ids)}")
    if len(set(baseline_ids) | {bow_id}) != n + 1:
        raise ValueError("system ids must be distinct")
    k = len(PAPER_EMBEDDINGS)
    groups = [Vote(tuple(Leaf(s) for s in baseline_ids[i : i + k])) for i in range(0, n, k)]
    return Vote((*groups, Leaf(bow_id)))


# ---------------------------------------------------------------- files


def format_tree(tree: VoteTree) -> str:
    lines = []

    def walk(node, depth):
        if isinstance(node, Leaf):
            lines.append(INDENT * depth + node.system)
        else:
            lines.append(INDENT * depth + VOTE_KEYWORD)
            for c in node.children:
                walk(c, depth + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"


def parse_tree(text: str, path=None) -> VoteTree:
    """Parse the indented format written by :func:`format_tree`.

    One node per line; two spaces of indentation per level; internal nodes
    are the word ``vote`` and everything else is a system id.
    """
    rows = []
    for lineno, raw in enumerate(text.split("\n"), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        body = raw.lstrip(" ")
        pad = len(raw) - len(body)
        if pad % len(INDENT) or body != body.strip():
            raise DataFormatError("indent with two spaces per level, no tabs or trailing blanks", path, lineno)
        rows.append((pad // len(INDENT), body, lineno))
    if not rows:
        raise DataFormatError("empty ensemble spec", path)
    pos = 0

    def node(depth):
        nonlocal pos
        d, body, lineno = rows[pos]
        if d != depth:
            raise DataFormatError(f"unexpected indentation (depth {d}, expected {depth})", path, lineno)
        pos += 1
        if body != VOTE_KEYWORD:
            try:
                return Leaf(body)
            except ValueError as e:
                raise DataFormatError(str(e), path, lineno) from None
        children = []
        while pos < len(rows) and rows[pos][0] > depth:
            children.append(node(depth + 1))
        if not children:
            raise DataFormatError("vote without children", path, lineno)
        return Vote(tuple(children))

    tree = node(0)
    if pos != len(rows):
        raise DataFormatError("more than one root node", path, rows[pos][2])
    return tree


def save_tree(tree: VoteTree, path) -> None:
    with atomic_write(path) as f:
        f.write(format_tree(tree))


def load_tree(path) -> VoteTree:
    with open(path, encoding="utf-8") as f:
        return parse_tree(f.read(), path)


# ---------------------------------------------------------------- prediction files


def write_predictions(path, labels: Sequence[str], probs) -> None:
    """One line per input: ``label<TAB>p_0 ... p_{K-1}``."""
    with atomic_write(path) as f:
        for label, row in zip(labels, probs, strict=True):
            f.write(f"{label}\t{fmt_values(row)}\n")


def read_predictions(path) -> list[tuple[str, list[float]]]:
    rows = []
    width = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            label, sep, rest = line.rstrip("\n").partition("\t")
            if not sep or not label:
                raise DataFormatError("expected 'label<TAB>p_0 ... p_K-1'", path, lineno)
            try:
                values = [float(x) for x in rest.split(" ")]
            except ValueError:
                raise DataFormatError("bad probability value", path, lineno) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataFormatError(f"expected {width} values, got {len(values)}", path, lineno)
            rows.append((label, values))
    return rows


def to_prediction(label: str, values: Sequence[float], class_names: Sequence[str]) -> Prediction:
    """The file row as a vote: the label's index and its own score, clipped into [0, 1]."""
    try:
        k = list(class_names).index(label)
    except ValueError:
        raise KeyError(f"unknown class {label!r}") from None
    if len(values) != len(class_names):
        raise ValueError(f"{len(values)} scores for {len(class_names)} classes")
    return Prediction(k, min(1.0, max(0.0, float(values[k]))))
