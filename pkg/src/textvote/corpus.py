"""Labeled headline datasets, unlabeled corpora and vocabularies.

Input text is expected to be segmented already: tokens are separated by
whitespace, and a labeled line looks like ``label<TAB>tok tok tok``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

UNK = "<unk>"


class DataFormatError(ValueError):
    """A data file line could not be parsed."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        where = ""
        if path is not None:
            where += f"{path}"
        if lineno is not None:
            where += f":{lineno}" if where else f"line {lineno}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class Headline:
    label: int
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a headline needs at least one token")
        if any(not t or any(c.isspace() for c in t) for t in self.tokens):
            raise ValueError(f"bad token in {self.tokens!r}")
        if self.label < 0:
            raise ValueError(f"negative label {self.label}")


@dataclass(frozen=True)
class DatasetSpec:
    """Class inventory plus split-size metadata.

    The split sizes are informational only; nothing is checked against them.
    """

    class_names: tuple[str, ...]
    split_sizes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if len(self.class_names) < 2:
            raise ValueError("need at least two classes")
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError("class names must be unique")
        for name in self.class_names:
            if not name or any(c.isspace() for c in name):
                raise ValueError(f"invalid class name {name!r}")

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def index(self, name: str) -> int:
        try:
            return self.class_names.index(name)
        except ValueError:
            raise KeyError(name) from None

    @classmethod
    def from_file(cls, path) -> "DatasetSpec":
        """One class name per line; blank lines are skipped."""
        with open(path, encoding="utf-8") as f:
            names = [line.strip() for line in f if line.strip()]
        return cls(tuple(names))


# Split sizes of the NLPCC 2017 headline task (train / dev / test).
NLPCC2017_SPLITS = {"train": 156000, "dev": 36000, "test": 36000}


def parse_line(line: str, spec: DatasetSpec, lineno: int | None = None, path=None) -> Headline:
    line = line.rstrip("\n")
    if "\t" not in line:
        raise DataFormatError("expected 'label<TAB>tokens'", path, lineno)
    name, text = line.split("\t", 1)
    try:
        label = spec.index(name)
    except KeyError:
        raise DataFormatError(f"unknown label {name!r}", path, lineno) from None
    tokens = tuple(text.split())
    if not tokens:
        raise DataFormatError("empty token list", path, lineno)
    return Headline(label, tokens)


def format_line(headline: Headline, spec: DatasetSpec) -> str:
    return f"{spec.class_names[headline.label]}\t{' '.join(headline.tokens)}"


def load_dataset(path, spec: DatasetSpec) -> list[Headline]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            out.append(parse_line(line, spec, lineno, path))
    return out


def save_dataset(headlines: Iterable[Headline], path, spec: DatasetSpec) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for h in headlines:
            f.write(format_line(h, spec) + "\n")


def read_token_lines(path) -> Iterator[list[str]]:
    """Yield whitespace-split sentences of an unlabeled corpus, skipping blank lines."""
    with open(path, encoding="utf-8") as f:
        for line in f:
            toks = line.split()
            if toks:
                yield toks


def read_unlabeled(path) -> list[tuple[str, ...]]:
    """Token sequences of an input file whose lines may or may not carry a label column."""
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            text = line.split("\t", 1)[1] if "\t" in line else line
            toks = tuple(text.split())
            if not toks:
                raise DataFormatError("empty token list", path, lineno)
            out.append(toks)
    return out


class Vocabulary:
    """Dense token <-> index map.

    Real tokens take indices ``0..n_tokens-1`` ordered by descending count,
    then lexicographically. One UNK slot sits at ``unk_index == n_tokens``,
    so ``len(vocab) == n_tokens + 1``.
    """

    def __init__(self, tokens: Sequence[str], counts: Sequence[int], min_count: int = 1):
        if len(tokens) != len(counts):
            raise ValueError("tokens and counts differ in length")
        self.itos: tuple[str, ...] = tuple(str(t) for t in tokens)
        self.counts: tuple[int, ...] = tuple(int(c) for c in counts)
        self.min_count = int(min_count)
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        if len(self.stoi) != len(self.itos):
            raise ValueError("duplicate tokens in vocabulary")
        if UNK in self.stoi:
            raise ValueError(f"{UNK!r} is reserved")

    @property
    def n_tokens(self) -> int:
        return len(self.itos)

    @property
    def unk_index(self) -> int:
        return len(self.itos)

    def __len__(self) -> int:
        return len(self.itos) + 1

    def __contains__(self, token) -> bool:
        return token in self.stoi

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.itos == other.itos
            and self.counts == other.counts
            and self.min_count == other.min_count
        )

    def __repr__(self) -> str:
        return f"Vocabulary(n_tokens={self.n_tokens}, min_count={self.min_count})"

    def index(self, token: str) -> int:
        return self.stoi.get(token, self.unk_index)

    def token(self, index: int) -> str:
        if index == self.unk_index:
            return UNK
        return self.itos[index]

    def count(self, token: str) -> int:
        i = self.stoi.get(token)
        return 0 if i is None else self.counts[i]


def build_vocab(corpora: Iterable[Iterable[str]], min_count: int = 1) -> Vocabulary:
    """Count tokens over an iterable of token sequences and keep those seen ``min_count`` times."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counter: Counter = Counter()
    for seq in corpora:
        counter.update(seq)
    kept = [(t, c) for t, c in counter.items() if c >= min_count and t != UNK]
    if not kept:
        raise ValueError(f"no token reaches min_count={min_count}")
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    return Vocabulary([t for t, _ in kept], [c for _, c in kept], min_count)


def tokens_to_ids(tokens: Iterable[str], vocab: Vocabulary) -> list[int]:
    return [vocab.index(t) for t in tokens]


def chars_of(token: str) -> list[str]:
    if not token:
        raise ValueError("empty token has no characters")
    return list(token)
