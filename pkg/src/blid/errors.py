"""Exception hierarchy shared across the toolkit.

Every error carries a stable ``code`` string so the CLI and the HTTP
service can report machine-parseable error identifiers.
"""

from __future__ import annotations


class BlidError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


# -- corpus ----------------------------------------------------------------

class CorpusError(BlidError):
    code = "corpus"


class MalformedLine(CorpusError):
    """Raised either with (path, line_no, detail) for file context or
    with a plain message when no file is involved."""

    code = "malformed_line"

    def __init__(self, *args):
        self.path = None
        self.line_no = None
        if len(args) == 3 and isinstance(args[1], int):
            path, line_no, detail = args
            self.path = path
            self.line_no = line_no
            args = (f"{path}:{line_no}: {detail}",)
        super().__init__(*args)


class UnknownTag(MalformedLine):
    code = "unknown_tag"


class EmptyWord(MalformedLine):
    code = "empty_word"


class RatioSum(CorpusError):
    code = "ratio_sum"


class EmptyCorpus(CorpusError):
    code = "empty_corpus"


# -- annotation ------------------------------------------------------------

class AnnotationError(BlidError):
    code = "annotation"


class UnknownItem(AnnotationError):
    code = "unknown_item"


class UnknownAnnotator(AnnotationError):
    code = "unknown_annotator"


class DuplicateVote(AnnotationError):
    code = "duplicate_vote"


class NotInAdjudication(AnnotationError):
    code = "not_in_adjudication"


class TooManyVotes(AnnotationError):
    code = "too_many_votes"


class StoreFormatError(AnnotationError):
    code = "store_format"


# -- nn / models -----------------------------------------------------------

class ShapeError(BlidError):
    code = "shape"


class NonFiniteValue(BlidError):
    """NaN or Inf encountered where a finite value is required."""

    code = "non_finite"


class ConfigError(BlidError):
    code = "config"


class MissingEmbedding(BlidError):
    code = "missing_embedding"


class EmbeddingFormatError(BlidError):
    code = "embedding_format"


class CheckpointError(BlidError):
    code = "checkpoint"
