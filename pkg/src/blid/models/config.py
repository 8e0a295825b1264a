"""Model architecture kinds and hyperparameter dataclasses."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import ConfigError

__all__ = ["ModelKind", "ModelConfig", "TrainingConfig"]


class ModelKind(enum.Enum):
    """The seven supported classifier architectures."""

    LOGREG = "logreg"
    LSTM_ATTN = "lstm-attn"
    BILSTM_ATTN = "bilstm-attn"
    CNN = "cnn"
    CNN_LSTM = "cnn-lstm"
    CNN_BILSTM = "cnn-bilstm"
    EXT_EMB_LSTM = "ext-emb-lstm"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        for kind in cls:
            if kind.value == text:
                return kind
        known = ", ".join(k.value for k in cls)
        raise ConfigError(f"unknown model kind {text!r} (expected one of: {known})")

    @property
    def uses_chars(self) -> bool:
        return self not in (ModelKind.LOGREG, ModelKind.EXT_EMB_LSTM)

    @property
    def uses_embeddings(self) -> bool:
        return self is ModelKind.EXT_EMB_LSTM


@dataclass
class ModelConfig:
    """Architecture hyperparameters, defaulting to the reference setup."""

    kind: ModelKind
    char_embed_dim: int = 64
    hidden: int = 128
    dense: int = 768
    dropout: float = 0.1
    leaky_alpha: float = 0.01
    cnn_filters: int = 64
    cnn_kernels: tuple[int, ...] = (2, 3, 4)
    classes: int = 3
    ext_embed_dim: int = 768
    # LogReg-only: number of hash buckets for character n-gram features.
    hash_dim: int = 2 ** 15

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            self.kind = ModelKind.parse(self.kind)
        self.cnn_kernels = tuple(int(k) for k in self.cnn_kernels)
        for name in ("char_embed_dim", "hidden", "dense", "cnn_filters", "ext_embed_dim", "hash_dim"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.classes != 3:
            raise ConfigError(f"classes is fixed at 3, got {self.classes}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.leaky_alpha < 0.0:
            raise ConfigError(f"leaky_alpha must be >= 0, got {self.leaky_alpha}")
        if not self.cnn_kernels or any(k < 1 for k in self.cnn_kernels):
            raise ConfigError(f"cnn_kernels must be positive, got {self.cnn_kernels}")


@dataclass
class TrainingConfig:
    """Optimization settings for a training run.

    The seed is part of the configuration on purpose: two runs with the
    same data, model config and training config must produce identical
    loss histories.
    """

    epochs: int = 20
    batch_size: int = 128
    lr: float = 0.001
    seed: int = 0
    shuffle_each_epoch: bool = True
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.lr > 0.0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
