"""Word-level bilingual language identification for Wolayta and Gofa.

The toolkit covers the whole pipeline: corpus cleaning and splitting,
three-annotator labeling with majority-vote merging, seven classifier
architectures trained with a from-scratch reverse-mode gradient engine,
and macro precision/recall/F1 evaluation.
"""

from .corpus import (
    Corpus,
    LabeledWord,
    Tag,
    TagDistribution,
    clean_text,
    dedupe_common,
    load_corpus,
    save_corpus,
    shuffle_split,
    stats,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "LabeledWord",
    "Tag",
    "TagDistribution",
    "clean_text",
    "dedupe_common",
    "load_corpus",
    "save_corpus",
    "shuffle_split",
    "stats",
    "tokenize",
    "__version__",
]
