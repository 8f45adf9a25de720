"""Fixed-precision text serialization shared by the embedding, model and prediction files."""

from __future__ import annotations

import contextlib
import os
import tempfile
from pathlib import Path

import numpy as np

from .corpus import DataFormatError, Vocabulary

DECIMALS = 6


def fmt_values(values) -> str:
    # "-0.000000" is kept as is: it parses to -0.0 and prints back identically
    return " ".join(f"{v:.{DECIMALS}f}" for v in np.asarray(values, dtype=np.float64).ravel())


def parse_values(fields, expected: int, path=None, lineno=None) -> np.ndarray:
    if len(fields) != expected:
        raise DataFormatError(f"expected {expected} values, got {len(fields)}", path, lineno)
    try:
        arr = np.array([float(x) for x in fields], dtype=np.float64)
    except ValueError as e:
        raise DataFormatError(f"bad number ({e})", path, lineno) from None
    if not np.all(np.isfinite(arr)):
        raise DataFormatError("non-finite value", path, lineno)
    return arr


def write_matrix_rows(f, keys, matrix) -> None:
    for key, row in zip(keys, matrix):
        f.write(f"{key} {fmt_values(row)}\n")


@contextlib.contextmanager
def atomic_write(path):
    """Open ``path`` for writing through a temp file that only replaces it on success."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_vocab(f, vocab: Vocabulary) -> None:
    f.write(f"vocab {vocab.n_tokens} {vocab.min_count}\n")
    for tok, cnt in zip(vocab.itos, vocab.counts):
        f.write(f"{tok}\t{cnt}\n")


def write_tensor(f, name: str, arr: np.ndarray) -> None:
    arr = np.atleast_1d(arr)
    f.write(f"tensor {name} {' '.join(str(s) for s in arr.shape)}\n")
    for row in arr.reshape(-1, arr.shape[-1]):
        f.write(fmt_values(row) + "\n")


class LineReader:
    """Line cursor with error messages that carry the line number."""

    def __init__(self, f, path):
        self.lines = f.read().split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0
        self.path = path

    def next(self, what: str) -> str:
        if self.pos >= len(self.lines):
            raise DataFormatError(f"unexpected end of file, expected {what}", self.path, self.pos + 1)
        self.pos += 1
        return self.lines[self.pos - 1]

    def field(self, key: str, cast=str):
        line = self.next(f"field '{key}'")
        name, _, value = line.partition(" ")
        if name != key:
            raise DataFormatError(f"expected field '{key}', found {name!r}", self.path, self.pos)
        try:
            return cast(value)
        except (ValueError, KeyError):
            raise DataFormatError(f"bad value for field '{key}': {value!r}", self.path, self.pos) from None

    def error(self, msg: str):
        return DataFormatError(msg, self.path, self.pos)

    def vocab(self) -> Vocabulary:
        n, min_count = self.field("vocab", lambda v: tuple(int(x) for x in v.split()))
        toks, counts = [], []
        for _ in range(n):
            tok, sep, cnt = self.next("vocabulary entry").partition("\t")
            if not sep:
                raise self.error("vocabulary entry needs 'token<TAB>count'")
            toks.append(tok)
            try:
                counts.append(int(cnt))
            except ValueError:
                raise self.error(f"bad count {cnt!r}") from None
        return Vocabulary(toks, counts, min_count)

    def tensor(self, name: str, shape: tuple) -> np.ndarray:
        line = self.next(f"tensor '{name}'")
        head = line.split(" ")
        if head[:2] != ["tensor", name]:
            raise self.error(f"expected tensor '{name}', found {line[:40]!r}")
        try:
            got = tuple(int(s) for s in head[2:])
        except ValueError:
            raise self.error(f"bad shape for tensor '{name}'") from None
        if got != tuple(shape):
            raise self.error(f"tensor '{name}' has shape {got}, expected {tuple(shape)}")
        n_rows = int(np.prod(shape[:-1])) if len(shape) > 1 else 1
        rows = [parse_values(self.next(f"row of '{name}'").split(" "), shape[-1], self.path, self.pos) for _ in range(n_rows)]
        return np.array(rows).reshape(shape)
