"""Seeded minibatch training loop with best-epoch weight retention."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus, Tag
from ..errors import EmptyCorpus, MissingEmbedding, NonFiniteValue
from ..evaluation import EvalReport, evaluate_predictions
from ..nn import Adam
from .architectures import Model
from .config import TrainingConfig

__all__ = ["EpochRecord", "TrainHistory", "train", "evaluate_model", "predict_corpus"]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    dev_macro_f1: float


@dataclass
class TrainHistory:
    records: list[EpochRecord]
    best_epoch: int
    best_dev_f1: float
    stopped_early: bool = False


def _onehot(tags: list[Tag], classes: int, dtype) -> np.ndarray:
    out = np.zeros((len(tags), classes), dtype=dtype)
    out[np.arange(len(tags)), [int(t) for t in tags]] = 1.0
    return out


def predict_corpus(model: Model, words: list[str], batch_size: int = 128) -> list[Tag]:
    """Batched argmax predictions; ties go to the lowest tag index."""
    preds: list[Tag] = []
    for start in range(0, len(words), batch_size):
        probs = model.predict_proba(words[start : start + batch_size])
        preds.extend(Tag(int(i)) for i in np.argmax(probs, axis=1))
    return preds


def evaluate_model(model: Model, corpus: Corpus, batch_size: int = 128) -> EvalReport:
    words = corpus.words()
    gold = corpus.tags()
    return evaluate_predictions(gold, predict_corpus(model, words, batch_size))


def _check_embeddings_cover(model: Model, words: list[str], role: str) -> None:
    table = model.embeddings
    if table is None or table.fallback != "error":
        return
    for word in words:
        if word not in table:
            raise MissingEmbedding(
                f"{role} word {word!r} has no embedding vector; provide one or "
                "load the table with fallback='zero'"
            )


def train(
    model: Model,
    train_corpus: Corpus,
    dev_corpus: Corpus,
    cfg: TrainingConfig,
    stop_at_dev_f1: float | None = None,
) -> TrainHistory:
    """Run Adam over shuffled minibatches for cfg.epochs epochs.

    After every epoch the model is scored on the dev corpus; the weights
    of the best dev macro-F1 epoch are restored before returning, so the
    caller never keeps an overfit tail.  With ``stop_at_dev_f1`` the
    loop exits as soon as the threshold is met and the history only
    covers the epochs that actually ran.

    A non-finite loss aborts with the epoch and batch index in the
    error message rather than training onward from poisoned weights.
    """
    if len(train_corpus) == 0:
        raise EmptyCorpus("training corpus is empty")
    if len(dev_corpus) == 0:
        raise EmptyCorpus("dev corpus is empty")

    train_words = train_corpus.words()
    train_tags = train_corpus.tags()
    _check_embeddings_cover(model, train_words, "training")
    _check_embeddings_cover(model, dev_corpus.words(), "dev")

    n = len(train_words)
    onehot = _onehot(train_tags, model.config.classes, model.dtype)
    rng = np.random.default_rng(cfg.seed)
    opt = Adam(model.params(), lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)

    records: list[EpochRecord] = []
    best_f1 = -1.0
    best_epoch = 0
    best_state: list[np.ndarray] = []
    stopped = False

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n) if cfg.shuffle_each_epoch else np.arange(n)
        loss_sum = 0.0
        for batch_no, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            words = [train_words[i] for i in idx]
            encoded = model.encode(words)
            loss = model.loss(encoded, onehot[idx], training=True)
            value = loss.item()
            if not np.isfinite(value):
                raise NonFiniteValue(
                    f"non-finite training loss at epoch {epoch}, batch {batch_no}"
                )
            loss.backward()
            opt.step()
            loss_sum += value * len(idx)

        dev_f1 = evaluate_model(model, dev_corpus, cfg.batch_size).macro_f1
        records.append(EpochRecord(epoch, loss_sum / n, dev_f1))
        if dev_f1 > best_f1:
            best_f1 = dev_f1
            best_epoch = epoch
            best_state = [arr.copy() for _, arr in model.state_arrays()]
        if stop_at_dev_f1 is not None and dev_f1 >= stop_at_dev_f1:
            stopped = True
            break

    for (_, arr), saved in zip(model.state_arrays(), best_state):
        np.copyto(arr, saved)
    return TrainHistory(records, best_epoch, best_f1, stopped)
