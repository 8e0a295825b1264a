"""Seeded synthetic corpora for tests and desk-scale experiments.

Real annotated data for this language pair is not distributable, so the
toolkit ships a generator whose class signal is carried by characters:
each language draws on private marker consonants and suffixes while the
shared class uses only the neutral inventory.  That makes the tags
learnable by any character-level model yet keeps the three classes
disjoint by construction.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .corpus import Corpus, LabeledWord, Tag
from .errors import ConfigError
from .models.embeddings import EmbeddingTable, save_embedding_table

__all__ = ["gen_synthetic", "gen_random_embeddings", "write_random_embeddings"]

_VOWELS = "aeiou"
_NEUTRAL = "bdgklmnstz"
# Marker consonants appear only in words of their own language.
_WAL_MARKERS = "cwx"
_GOF_MARKERS = "fhr"
_WAL_SUFFIXES = ("idi", "iis", "awu", "ana")
_GOF_SUFFIXES = ("afe", "ey", "ethay", "ide")
_SHARED_SUFFIXES = ("aa", "o", "i")


def _make_word(rng: np.random.Generator, markers: str, suffixes: tuple[str, ...]) -> str:
    syllables = int(rng.integers(2, 4))
    consonants = []
    for _ in range(syllables):
        pool = _NEUTRAL + markers
        consonants.append(pool[int(rng.integers(0, len(pool)))])
    if markers and not any(c in markers for c in consonants):
        slot = int(rng.integers(0, syllables))
        consonants[slot] = markers[int(rng.integers(0, len(markers)))]
    word = "".join(c + _VOWELS[int(rng.integers(0, len(_VOWELS)))] for c in consonants)
    if suffixes:
        word += suffixes[int(rng.integers(0, len(suffixes)))]
    return word


def _draw_class(
    rng: np.random.Generator,
    count: int,
    markers: str,
    suffixes: tuple[str, ...],
    taken: set[str],
) -> list[str]:
    words: list[str] = []
    attempts = 0
    while len(words) < count:
        attempts += 1
        if attempts > 200 * max(count, 1):
            raise ConfigError(
                f"could not draw {count} distinct synthetic words; lower the size"
            )
        word = _make_word(rng, markers, suffixes)
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


def gen_synthetic(
    size: int,
    overlap: float,
    seed: int,
    wal_frac: float = 0.5,
    name: str = "synthetic",
) -> Corpus:
    """Generate `size` labeled words with an `overlap` fraction of shared
    (wal-gof) vocabulary; the remainder splits `wal_frac` to wal.

    overlap=0 yields no shared items, overlap=1 only shared items.  The
    same (size, overlap, seed, wal_frac) always returns the same corpus.
    """
    if size < 1:
        raise ConfigError(f"size must be >= 1, got {size}")
    if not 0.0 <= overlap <= 1.0:
        raise ConfigError(f"overlap must lie in [0, 1], got {overlap}")
    if not 0.0 <= wal_frac <= 1.0:
        raise ConfigError(f"wal_frac must lie in [0, 1], got {wal_frac}")
    rng = np.random.default_rng(seed)
    n_shared = round(size * overlap)
    rest = size - n_shared
    n_wal = round(rest * wal_frac)
    n_gof = rest - n_wal

    taken: set[str] = set()
    items = [
        LabeledWord(w, Tag.WAL)
        for w in _draw_class(rng, n_wal, _WAL_MARKERS, _WAL_SUFFIXES, taken)
    ]
    items += [
        LabeledWord(w, Tag.GOF)
        for w in _draw_class(rng, n_gof, _GOF_MARKERS, _GOF_SUFFIXES, taken)
    ]
    items += [
        LabeledWord(w, Tag.WAL_GOF)
        for w in _draw_class(rng, n_shared, "", _SHARED_SUFFIXES, taken)
    ]
    order = rng.permutation(len(items))
    return Corpus(items=[items[i] for i in order], name=name, seed=seed)


def gen_random_embeddings(words: list[str], dim: int, seed: int) -> EmbeddingTable:
    """Fixed random unit-scale vectors, one per distinct word.

    Stands in for a frozen pre-trained encoder: vectors carry no real
    signal beyond being a stable word identity.
    """
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    for word in dict.fromkeys(words):
        vectors[word] = rng.standard_normal(dim).astype(np.float32)
    return EmbeddingTable(dim=dim, vectors=vectors)


def write_random_embeddings(words: list[str], dim: int, seed: int, path: str | Path) -> Path:
    path = Path(path)
    save_embedding_table(gen_random_embeddings(words, dim, seed), path)
    return path
