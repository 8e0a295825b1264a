"""Hashed character n-gram features for the linear baseline."""

from __future__ import annotations

import zlib
from typing import Callable, Sequence

import numpy as np

from ..errors import EmptyWord

__all__ = ["char_ngrams", "logreg_features", "feature_matrix", "DEFAULT_HASH_DIM"]

DEFAULT_HASH_DIM = 2 ** 15

BOUNDARY_START = "^"
BOUNDARY_END = "$"


def char_ngrams(word: str, n_min: int = 1, n_max: int = 3) -> list[str]:
    """Character n-grams of the boundary-marked word, shortest first.

    The word is wrapped as ^word$ so that prefixes and suffixes hash to
    their own buckets.
    """
    if not word:
        raise EmptyWord("cannot extract n-grams from an empty word")
    marked = BOUNDARY_START + word + BOUNDARY_END
    grams: list[str] = []
    for n in range(n_min, n_max + 1):
        for start in range(len(marked) - n + 1):
            grams.append(marked[start : start + n])
    return grams


def _crc32_bucket(gram: str, hash_dim: int) -> int:
    return zlib.crc32(gram.encode("utf-8")) % hash_dim


def logreg_features(
    word: str,
    hash_dim: int = DEFAULT_HASH_DIM,
    hash_fn: Callable[[str, int], int] | None = None,
) -> dict[int, float]:
    """Sparse bucket->count features from hashed 1..3-grams.

    Collisions add up in the shared bucket.  `hash_fn` is injectable so
    tests can substitute a collision-free assignment.
    """
    bucket = hash_fn or _crc32_bucket
    feats: dict[int, float] = {}
    for gram in char_ngrams(word):
        key = bucket(gram, hash_dim)
        feats[key] = feats.get(key, 0.0) + 1.0
    return feats


def feature_matrix(
    words: Sequence[str],
    hash_dim: int = DEFAULT_HASH_DIM,
    dtype=np.float32,
    hash_fn: Callable[[str, int], int] | None = None,
) -> np.ndarray:
    """Densify per-word sparse features into a (len(words), hash_dim) array."""
    out = np.zeros((len(words), hash_dim), dtype=dtype)
    for row, word in enumerate(words):
        for key, value in logreg_features(word, hash_dim, hash_fn).items():
            out[row, key] = value
    return out
