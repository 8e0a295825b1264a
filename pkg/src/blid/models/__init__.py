"""Word-level classifiers: configs, features, architectures, training."""

from .architectures import Model, build_model, predict
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig, ModelKind, TrainingConfig
from .embeddings import EmbeddingTable, load_embedding_table, save_embedding_table
from .features import DEFAULT_HASH_DIM, char_ngrams, feature_matrix, logreg_features
from .training import (
    EpochRecord,
    TrainHistory,
    evaluate_model,
    predict_corpus,
    train,
)
from .vocab import (
    DEFAULT_MAX_WORD_LEN,
    PAD_INDEX,
    UNK_INDEX,
    CharVocab,
    encode_word,
)

__all__ = [
    "Model",
    "build_model",
    "predict",
    "load_checkpoint",
    "save_checkpoint",
    "ModelConfig",
    "ModelKind",
    "TrainingConfig",
    "EmbeddingTable",
    "load_embedding_table",
    "save_embedding_table",
    "DEFAULT_HASH_DIM",
    "char_ngrams",
    "feature_matrix",
    "logreg_features",
    "EpochRecord",
    "TrainHistory",
    "evaluate_model",
    "predict_corpus",
    "train",
    "DEFAULT_MAX_WORD_LEN",
    "PAD_INDEX",
    "UNK_INDEX",
    "CharVocab",
    "encode_word",
]
