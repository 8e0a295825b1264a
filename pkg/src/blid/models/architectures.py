"""The seven word-level classifier architectures.

Every model maps a batch of words to a (batch, 3) matrix of tag
probabilities.  They differ only in how a word becomes a vector:

* logreg        hashed character n-gram counts, single affine layer
* lstm-attn     char embeddings -> LSTM -> additive attention
* bilstm-attn   char embeddings -> BiLSTM -> additive attention
* cnn           char embeddings -> parallel convolutions -> max pool
* cnn-lstm      char embeddings -> convolutions -> LSTM (last state)
* cnn-bilstm    char embeddings -> convolutions -> BiLSTM (both ends)
* ext-emb-lstm  pretrained word vector -> LSTM -> batch norm head

All but logreg and ext-emb-lstm share the classification head
dense(768, leaky_relu) -> dropout -> dense(3) -> softmax.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..corpus import Tag
from ..errors import ConfigError, EmptyWord
from ..nn import (
    DEFAULT_DTYPE,
    Attention,
    BatchNorm,
    BiLstm,
    Conv1dLayer,
    Dense,
    Dropout,
    Embedding,
    Lstm,
    LstmCell,
    Parameter,
    Tensor,
    concat,
    cross_entropy,
    leaky_relu,
    max_pool_over_time,
    narrow,
    relu,
    reshape,
    softmax,
)
from .config import ModelConfig, ModelKind
from .embeddings import EmbeddingTable
from .features import feature_matrix
from .vocab import CharVocab

__all__ = ["Model", "build_model", "predict"]


class _Head:
    """Shared classifier head: wide dense layer, dropout, softmax output."""

    def __init__(self, in_dim: int, cfg: ModelConfig, rng: np.random.Generator, dtype):
        self.fc = Dense(in_dim, cfg.dense, rng, dtype, name="head.fc")
        self.out = Dense(cfg.dense, cfg.classes, rng, dtype, name="head.out")
        self.drop = Dropout(cfg.dropout)
        self.alpha = cfg.leaky_alpha

    def __call__(self, x: Tensor, rng: np.random.Generator, training: bool) -> Tensor:
        h = leaky_relu(self.fc(x), alpha=self.alpha)
        h = self.drop(h, rng, training)
        return softmax(self.out(h), axis=1)

    def params(self) -> list[Parameter]:
        return self.fc.params() + self.out.params()


class Model:
    """Base class: batching, loss and probability helpers.

    Subclasses set up their layers and implement ``encode`` (words to
    a numeric batch) and ``forward`` (batch to probability Tensor).
    """

    def __init__(self, config: ModelConfig, seed: int, dtype=DEFAULT_DTYPE):
        self.config = config
        self.seed = seed
        self.dtype = np.dtype(dtype)
        self.vocab: CharVocab | None = None
        self.embeddings: EmbeddingTable | None = None
        # One generator drives both weight init and dropout masks, so a
        # (config, seed) pair fixes the whole run.
        self._rng = np.random.default_rng(seed)

    @property
    def kind(self) -> ModelKind:
        return self.config.kind

    def params(self) -> list[Parameter]:
        raise NotImplementedError

    def state_arrays(self) -> list[tuple[str, np.ndarray]]:
        """All persistent arrays: parameters plus non-trained state such
        as batch-norm running statistics."""
        return [(p.name, p.data) for p in self.params()]

    def encode(self, words: Sequence[str]) -> np.ndarray:
        raise NotImplementedError

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        raise NotImplementedError

    def loss(self, encoded: np.ndarray, onehot: np.ndarray, training: bool = True) -> Tensor:
        return cross_entropy(self.forward(encoded, training=training), onehot)

    def predict_proba(self, words: Sequence[str]) -> np.ndarray:
        if not words:
            raise EmptyWord("cannot predict on an empty batch")
        return self.forward(self.encode(words), training=False).data.copy()

    def _check_vocab_len(self) -> None:
        assert self.vocab is not None
        needed = max(self.config.cnn_kernels)
        if self.vocab.max_word_len < needed:
            raise ConfigError(
                f"max_word_len {self.vocab.max_word_len} is shorter than the "
                f"widest convolution kernel {needed}"
            )


class LogRegModel(Model):
    """Multinomial logistic regression over hashed n-gram counts."""

    def __init__(self, config: ModelConfig, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, seed, dtype)
        self.out = Dense(config.hash_dim, config.classes, self._rng, dtype, name="logreg")

    def params(self) -> list[Parameter]:
        return self.out.params()

    def encode(self, words: Sequence[str]) -> np.ndarray:
        return feature_matrix(words, self.config.hash_dim, dtype=self.dtype)

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        return softmax(self.out(Tensor(encoded)), axis=1)


class _CharModel(Model):
    """Common ground for models that read character index sequences."""

    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, seed, dtype)
        self.vocab = vocab
        self.embed = Embedding(vocab.size, config.char_embed_dim, self._rng, dtype)

    def encode(self, words: Sequence[str]) -> np.ndarray:
        assert self.vocab is not None
        return self.vocab.encode_batch(words)

    def _embed_steps(self, indices: np.ndarray) -> list[Tensor]:
        return [self.embed(indices[:, t]) for t in range(indices.shape[1])]


class LstmAttnModel(_CharModel):
    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self.lstm = Lstm(LstmCell(config.char_embed_dim, config.hidden, self._rng, dtype))
        self.attn = Attention(config.hidden, self._rng, dtype)
        self.head = _Head(config.hidden, config, self._rng, dtype)

    def params(self) -> list[Parameter]:
        return (self.embed.params() + self.lstm.params()
                + self.attn.params() + self.head.params())

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        states = self.lstm.run(self._embed_steps(encoded))
        return self.head(self.attn(states), self._rng, training)


class BiLstmAttnModel(_CharModel):
    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self.bilstm = BiLstm(
            LstmCell(config.char_embed_dim, config.hidden, self._rng, dtype, name="lstm_f"),
            LstmCell(config.char_embed_dim, config.hidden, self._rng, dtype, name="lstm_b"),
        )
        self.attn = Attention(2 * config.hidden, self._rng, dtype)
        self.head = _Head(2 * config.hidden, config, self._rng, dtype)

    def params(self) -> list[Parameter]:
        return (self.embed.params() + self.bilstm.params()
                + self.attn.params() + self.head.params())

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        states = self.bilstm.run(self._embed_steps(encoded))
        return self.head(self.attn(states), self._rng, training)


class CnnModel(_CharModel):
    """Parallel convolutions with valid padding, max-pooled over time."""

    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self._check_vocab_len()
        self.convs = [
            Conv1dLayer(k, config.char_embed_dim, config.cnn_filters, self._rng,
                        padding="valid", dtype=dtype, name=f"conv{k}")
            for k in config.cnn_kernels
        ]
        pooled_dim = config.cnn_filters * len(config.cnn_kernels)
        self.head = _Head(pooled_dim, config, self._rng, dtype)

    def params(self) -> list[Parameter]:
        out = self.embed.params()
        for conv in self.convs:
            out += conv.params()
        return out + self.head.params()

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        x = self.embed(encoded)  # (B, L, D)
        pooled = [max_pool_over_time(relu(conv(x))) for conv in self.convs]
        return self.head(concat(pooled, axis=1), self._rng, training)


class _CnnRecurrentModel(_CharModel):
    """Convolution stack with same padding feeding a recurrent encoder."""

    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self._check_vocab_len()
        self.convs = [
            Conv1dLayer(k, config.char_embed_dim, config.cnn_filters, self._rng,
                        padding="same", dtype=dtype, name=f"conv{k}")
            for k in config.cnn_kernels
        ]
        self.conv_out_dim = config.cnn_filters * len(config.cnn_kernels)

    def _conv_steps(self, encoded: np.ndarray) -> list[Tensor]:
        x = self.embed(encoded)  # (B, L, D)
        feats = concat([relu(conv(x)) for conv in self.convs], axis=2)  # (B, L, F)
        batch, length, channels = feats.data.shape
        return [
            reshape(narrow(feats, 1, t, 1), (batch, channels))
            for t in range(length)
        ]

    def _conv_params(self) -> list[Parameter]:
        out = self.embed.params()
        for conv in self.convs:
            out += conv.params()
        return out


class CnnLstmModel(_CnnRecurrentModel):
    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self.lstm = Lstm(LstmCell(self.conv_out_dim, config.hidden, self._rng, dtype))
        self.head = _Head(config.hidden, config, self._rng, dtype)

    def params(self) -> list[Parameter]:
        return self._conv_params() + self.lstm.params() + self.head.params()

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        states = self.lstm.run(self._conv_steps(encoded))
        return self.head(states[-1], self._rng, training)


class CnnBiLstmModel(_CnnRecurrentModel):
    def __init__(self, config: ModelConfig, vocab: CharVocab, seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, vocab, seed, dtype)
        self.bilstm = BiLstm(
            LstmCell(self.conv_out_dim, config.hidden, self._rng, dtype, name="lstm_f"),
            LstmCell(self.conv_out_dim, config.hidden, self._rng, dtype, name="lstm_b"),
        )
        self.head = _Head(2 * config.hidden, config, self._rng, dtype)

    def params(self) -> list[Parameter]:
        return self._conv_params() + self.bilstm.params() + self.head.params()

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        final = self.bilstm.final_state(self._conv_steps(encoded))
        return self.head(final, self._rng, training)


class ExtEmbLstmModel(Model):
    """Pretrained word vector treated as a one-step sequence.

    Head differs from the shared one: LSTM state -> batch norm ->
    dense(768, relu) -> dense(768) -> dropout -> dense(3) softmax.
    """

    def __init__(self, config: ModelConfig, embeddings: EmbeddingTable,
                 seed: int, dtype=DEFAULT_DTYPE):
        super().__init__(config, seed, dtype)
        if embeddings.dim != config.ext_embed_dim:
            raise ConfigError(
                f"embedding table dimension {embeddings.dim} does not match "
                f"configured ext_embed_dim {config.ext_embed_dim}"
            )
        self.embeddings = embeddings
        self.lstm = Lstm(LstmCell(config.ext_embed_dim, config.hidden, self._rng, dtype))
        self.bn = BatchNorm(config.hidden, dtype=dtype)
        self.fc1 = Dense(config.hidden, config.dense, self._rng, dtype, name="fc1")
        self.fc2 = Dense(config.dense, config.dense, self._rng, dtype, name="fc2")
        self.drop = Dropout(config.dropout)
        self.out = Dense(config.dense, config.classes, self._rng, dtype, name="out")

    def params(self) -> list[Parameter]:
        return (self.lstm.params() + self.bn.params() + self.fc1.params()
                + self.fc2.params() + self.out.params())

    def state_arrays(self) -> list[tuple[str, np.ndarray]]:
        return super().state_arrays() + [
            ("bn.running_mean", self.bn.running_mean),
            ("bn.running_var", self.bn.running_var),
        ]

    def encode(self, words: Sequence[str]) -> np.ndarray:
        assert self.embeddings is not None
        return self.embeddings.matrix(words).astype(self.dtype)

    def forward(self, encoded: np.ndarray, training: bool = False) -> Tensor:
        h = self.lstm.run([Tensor(encoded)])[-1]
        h = self.bn(h, training)
        h = relu(self.fc1(h))
        h = self.fc2(h)
        h = self.drop(h, self._rng, training)
        return softmax(self.out(h), axis=1)


_CHAR_MODELS = {
    ModelKind.LSTM_ATTN: LstmAttnModel,
    ModelKind.BILSTM_ATTN: BiLstmAttnModel,
    ModelKind.CNN: CnnModel,
    ModelKind.CNN_LSTM: CnnLstmModel,
    ModelKind.CNN_BILSTM: CnnBiLstmModel,
}


def build_model(
    config: ModelConfig,
    seed: int,
    vocab: CharVocab | None = None,
    embeddings: EmbeddingTable | None = None,
    dtype=DEFAULT_DTYPE,
) -> Model:
    """Construct any of the seven architectures with seeded weights."""
    kind = config.kind
    if kind is ModelKind.LOGREG:
        return LogRegModel(config, seed, dtype)
    if kind is ModelKind.EXT_EMB_LSTM:
        if embeddings is None:
            raise ConfigError("ext-emb-lstm needs an embedding table attached")
        return ExtEmbLstmModel(config, embeddings, seed, dtype)
    if vocab is None:
        raise ConfigError(f"{kind} needs a character vocabulary")
    return _CHAR_MODELS[kind](config, vocab, seed, dtype)


def predict(model: Model, word: str) -> tuple[Tag, np.ndarray]:
    """Single-word prediction: (tag, probability vector).

    Probability ties resolve to the lowest tag index so repeated calls
    agree bit for bit.
    """
    if not word:
        raise EmptyWord("cannot predict the tag of an empty word")
    probs = model.predict_proba([word])[0]
    return Tag(int(np.argmax(probs))), probs
