"""Pretrained word-embedding tables in a plain text format.

File layout: a header line `dim N`, then one row per word holding the
word followed by N float components, all space-separated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import EmbeddingFormatError, MissingEmbedding

__all__ = ["EmbeddingTable", "load_embedding_table", "save_embedding_table"]

log = logging.getLogger(__name__)


@dataclass
class EmbeddingTable:
    """Word to dense-vector lookup with a configurable fallback.

    fallback="error" raises for unknown words; fallback="zero" returns
    the zero vector, which keeps inference usable on words the
    embedding model never saw.
    """

    dim: int
    vectors: dict[str, np.ndarray]
    fallback: str = "error"
    _zero: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.fallback not in ("error", "zero"):
            raise EmbeddingFormatError(f"unknown fallback policy {self.fallback!r}")
        self._zero = np.zeros(self.dim, dtype=np.float32)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def lookup(self, word: str) -> np.ndarray:
        vec = self.vectors.get(word)
        if vec is None:
            if self.fallback == "zero":
                return self._zero
            raise MissingEmbedding(f"no embedding vector for word {word!r}")
        return vec

    def matrix(self, words: Sequence[str]) -> np.ndarray:
        """Stack lookups into a (len(words), dim) float32 matrix."""
        out = np.empty((len(words), self.dim), dtype=np.float32)
        for row, word in enumerate(words):
            out[row] = self.lookup(word)
        return out


def load_embedding_table(path: str | Path, fallback: str = "error") -> EmbeddingTable:
    """Parse an embedding file; malformed content reports the line number.

    A word appearing twice keeps the last row and logs a warning.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if dim is None:
                if len(parts) != 2 or parts[0] != "dim":
                    raise EmbeddingFormatError(
                        f"{path}:{line_no}: expected header 'dim N', got {line!r}"
                    )
                try:
                    dim = int(parts[1])
                except ValueError:
                    raise EmbeddingFormatError(
                        f"{path}:{line_no}: dimension is not an integer: {parts[1]!r}"
                    ) from None
                if dim < 1:
                    raise EmbeddingFormatError(f"{path}:{line_no}: dimension must be >= 1")
                continue
            word = parts[0]
            if len(parts) - 1 != dim:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: expected {dim} components for {word!r}, "
                    f"got {len(parts) - 1}"
                )
            try:
                vec = np.array([float(v) for v in parts[1:]], dtype=np.float32)
            except ValueError:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: non-numeric component in row for {word!r}"
                ) from None
            if word in vectors:
                log.warning("%s:%d: duplicate embedding row for %r, keeping the last", path, line_no, word)
            vectors[word] = vec
    if dim is None:
        raise EmbeddingFormatError(f"{path}: empty embedding file")
    return EmbeddingTable(dim=dim, vectors=vectors, fallback=fallback)


def save_embedding_table(table: EmbeddingTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"dim {table.dim}\n")
        for word, vec in table.vectors.items():
            comps = " ".join(repr(float(v)) for v in vec)
            fh.write(f"{word} {comps}\n")
