"""Word-level corpus handling for the Wolayta/Gofa language-ID task.

A corpus is an ordered list of (word, tag) pairs.  Tags distinguish
Wolayta-only words (``wal``), Gofa-only words (``gof``) and words shared
by both languages (``wal-gof``).  The on-disk format is UTF-8 TSV with
one ``word<TAB>tag`` pair per line; ``#``-prefixed lines are comments.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyCorpus,
    EmptyWord,
    MalformedLine,
    RatioSum,
    UnknownTag,
)

__all__ = [
    "Tag",
    "LabeledWord",
    "Corpus",
    "TagDistribution",
    "clean_text",
    "tokenize",
    "load_corpus",
    "save_corpus",
    "load_wordlist",
    "save_wordlist",
    "shuffle_split",
    "dedupe_common",
    "stats",
]


class Tag(enum.IntEnum):
    """The three word classes, with their stable label encoding."""

    WAL = 0
    GOF = 1
    WAL_GOF = 2

    def __str__(self) -> str:
        return _TAG_TO_STR[self]

    @classmethod
    def parse(cls, text: str) -> "Tag":
        try:
            return _STR_TO_TAG[text]
        except KeyError:
            raise UnknownTag(f"unknown tag {text!r} (expected wal, gof or wal-gof)") from None


_TAG_TO_STR = {Tag.WAL: "wal", Tag.GOF: "gof", Tag.WAL_GOF: "wal-gof"}
_STR_TO_TAG = {s: t for t, s in _TAG_TO_STR.items()}

TAGS: tuple[Tag, Tag, Tag] = (Tag.WAL, Tag.GOF, Tag.WAL_GOF)


@dataclass(frozen=True)
class LabeledWord:
    """A single word with its gold tag."""

    word: str
    tag: Tag

    def __post_init__(self) -> None:
        if not self.word:
            raise EmptyWord("word must be non-empty")
        if clean_text(self.word) != self.word or " " in self.word:
            raise MalformedLine(f"word {self.word!r} is not a single cleaned token")


@dataclass
class Corpus:
    """Ordered collection of labeled words.

    ``seed`` records the shuffle seed when the corpus is the product of
    :func:`shuffle_split`, so a run can be reproduced from its outputs.
    """

    items: list[LabeledWord] = field(default_factory=list)
    name: str = ""
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[LabeledWord]:
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def words(self) -> list[str]:
        return [it.word for it in self.items]

    def tags(self) -> list[Tag]:
        return [it.tag for it in self.items]

    def stats(self) -> "TagDistribution":
        return stats(self)


@dataclass(frozen=True)
class TagDistribution:
    """Tag counts plus their fractions of the total.

    For an empty corpus all fractions are reported as 0.0.
    """

    counts: dict[Tag, int]
    fractions: dict[Tag, float]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


# -- text cleaning ----------------------------------------------------------

_URL_RE = re.compile(r"(?:\b[a-z][a-z0-9+.-]*://\S+|\bwww\.\S+)")
_HTML_TAG_RE = re.compile(r"<[^<>]*>")
_WS_RE = re.compile(r"\s+")


def clean_text(raw: str) -> str:
    """Normalize raw text down to lowercase word material.

    Removal rules, applied in order: lowercasing, URLs (``scheme://...``
    and ``www....`` tokens), HTML tags, digits, and every punctuation
    mark except apostrophes that sit between letters (Wolayta/Gofa
    orthography uses the apostrophe for glottal sounds, so stripping it
    would merge distinct words).  Whitespace runs collapse to single
    spaces.  The function is idempotent.
    """
    text = raw.lower()
    text = _URL_RE.sub(" ", text)
    text = _HTML_TAG_RE.sub(" ", text)
    text = text.replace("’", "'")  # curly apostrophe
    # Keep letters, whitespace and apostrophes; digits and punctuation
    # become spaces so unrelated tokens never merge.
    text = "".join(
        c if (c.isalpha() or c.isspace() or c == "'") else " " for c in text
    )
    text = re.sub(r"''+", "'", text)
    # Apostrophes survive only between two letters.
    text = re.sub(r"(?<!\S)'+|'+(?!\S)", " ", text)
    return _WS_RE.sub(" ", text).strip()


def tokenize(text: str) -> list[str]:
    """Split cleaned text on whitespace, preserving order."""
    return text.split()


# -- corpus I/O --------------------------------------------------------------

def load_corpus(path: str | Path, name: str | None = None) -> Corpus:
    """Load a TSV corpus file (``word<TAB>tag`` per line).

    Words are passed through :func:`clean_text` and must survive as a
    single non-empty token.  Malformed lines, unknown tags and words
    that clean to empty are reported with their line number.
    """
    path = Path(path)
    items: list[LabeledWord] = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MalformedLine(path, line_no, f"expected 2 tab-separated columns, got {len(parts)}")
            raw_word, tag_str = parts
            try:
                tag = Tag.parse(tag_str.strip())
            except UnknownTag as exc:
                raise UnknownTag(path, line_no, str(exc)) from None
            cleaned = clean_text(raw_word)
            if not cleaned:
                raise EmptyWord(path, line_no, f"word {raw_word!r} cleans to empty")
            if " " in cleaned:
                raise MalformedLine(path, line_no, f"word field contains multiple tokens: {cleaned!r}")
            items.append(LabeledWord(cleaned, tag))
    return Corpus(items, name=name or path.stem)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the TSV format accepted by :func:`load_corpus`."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for item in corpus:
            fh.write(f"{item.word}\t{item.tag}\n")


def load_wordlist(path: str | Path, clean: bool = True) -> list[str]:
    """Load a one-word-per-line file, optionally cleaning each line.

    Lines that clean to multiple tokens contribute each token; lines
    that clean to nothing are dropped.
    """
    words: list[str] = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            words.extend(tokenize(clean_text(line)) if clean else [line.strip()])
    return words


def save_wordlist(words: Iterable[str], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for w in words:
            fh.write(w + "\n")


# -- splitting and statistics ------------------------------------------------

def shuffle_split(
    corpus: Corpus,
    seed: int,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> tuple[Corpus, Corpus, Corpus]:
    """Shuffle then cut a corpus into train/dev/test partitions.

    Uses an explicit Fisher-Yates shuffle driven by a seeded generator,
    then contiguous cuts at ``floor(n*train)`` and ``floor(n*(train+dev))``.
    Deterministic for a fixed seed; the three partitions are disjoint
    and their union is the input (as a multiset).
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot split an empty corpus")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise RatioSum(f"split ratios must sum to 1, got {ratios} (sum {sum(ratios)})")
    if any(r < 0 for r in ratios):
        raise RatioSum(f"split ratios must be non-negative, got {ratios}")

    rng = np.random.default_rng(seed)
    items = list(corpus.items)
    for i in range(len(items) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        items[i], items[j] = items[j], items[i]

    n = len(items)
    cut1 = int(n * ratios[0])
    cut2 = int(n * (ratios[0] + ratios[1]))
    mk = lambda part, suffix: Corpus(part, name=f"{corpus.name}-{suffix}" if corpus.name else suffix, seed=seed)
    return (
        mk(items[:cut1], "train"),
        mk(items[cut1:cut2], "dev"),
        mk(items[cut2:], "test"),
    )


def dedupe_common(
    list_a: Iterable[str], list_b: Iterable[str]
) -> tuple[set[str], set[str], set[str]]:
    """Split two word lists into exclusive and shared vocabulary.

    Returns ``(a_only, b_only, common)`` where ``common`` is the exact
    case-folded string intersection.  The common words are the candidate
    ``wal-gof`` items presented to annotators.
    """
    set_a = {w.casefold() for w in list_a}
    set_b = {w.casefold() for w in list_b}
    common = set_a & set_b
    return set_a - common, set_b - common, common


def stats(corpus: Corpus | Sequence[LabeledWord]) -> TagDistribution:
    """Exact tag counts and fractions for a corpus."""
    counts = {t: 0 for t in TAGS}
    for item in corpus:
        counts[item.tag] += 1
    total = sum(counts.values())
    if total == 0:
        fractions = {t: 0.0 for t in TAGS}
    else:
        fractions = {t: counts[t] / total for t in TAGS}
    return TagDistribution(counts=counts, fractions=fractions)
