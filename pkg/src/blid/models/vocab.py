"""Character vocabulary with padding/unknown handling for word encoders."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigError, EmptyWord

__all__ = ["PAD_INDEX", "UNK_INDEX", "DEFAULT_MAX_WORD_LEN", "CharVocab", "encode_word"]

PAD_INDEX = 0
UNK_INDEX = 1
DEFAULT_MAX_WORD_LEN = 24


@dataclass(frozen=True)
class CharVocab:
    """Maps characters to contiguous indices; 0 is padding, 1 is unknown."""

    chars: tuple[str, ...]
    max_word_len: int
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.max_word_len < 1:
            raise ConfigError(f"max_word_len must be >= 1, got {self.max_word_len}")
        if len(set(self.chars)) != len(self.chars):
            raise ConfigError("vocabulary characters must be distinct")
        object.__setattr__(
            self, "index", {c: i + 2 for i, c in enumerate(self.chars)}
        )

    @classmethod
    def build(
        cls,
        words: Iterable[str],
        max_word_len: int | None = None,
    ) -> "CharVocab":
        """Collect the sorted character set of `words`.

        With max_word_len=None the length is fitted to the longest word,
        capped at DEFAULT_MAX_WORD_LEN; longer words get truncated when
        encoded.
        """
        seen: set[str] = set()
        longest = 0
        for word in words:
            seen.update(word)
            longest = max(longest, len(word))
        if max_word_len is None:
            max_word_len = min(max(longest, 1), DEFAULT_MAX_WORD_LEN)
        return cls(chars=tuple(sorted(seen)), max_word_len=max_word_len)

    @property
    def size(self) -> int:
        """Number of embedding rows: characters plus PAD and UNK."""
        return len(self.chars) + 2

    def encode(self, word: str) -> np.ndarray:
        return encode_word(word, self)

    def encode_batch(self, words: Sequence[str]) -> np.ndarray:
        if not words:
            raise EmptyWord("cannot encode an empty batch of words")
        out = np.zeros((len(words), self.max_word_len), dtype=np.int64)
        for row, word in enumerate(words):
            out[row] = encode_word(word, self)
        return out

    def to_dict(self) -> dict:
        return {"chars": "".join(self.chars), "max_word_len": self.max_word_len}

    @classmethod
    def from_dict(cls, data: dict) -> "CharVocab":
        return cls(chars=tuple(data["chars"]), max_word_len=int(data["max_word_len"]))


def encode_word(word: str, vocab: CharVocab) -> np.ndarray:
    """Fixed-length index vector: truncated at max_word_len, right-padded
    with PAD, out-of-vocabulary characters mapped to UNK."""
    if not word:
        raise EmptyWord("cannot encode an empty word")
    out = np.full(vocab.max_word_len, PAD_INDEX, dtype=np.int64)
    for pos, ch in enumerate(word[: vocab.max_word_len]):
        out[pos] = vocab.index.get(ch, UNK_INDEX)
    return out
