"""Checkpoints: a JSON manifest next to a raw little-endian float32 blob.

`save_checkpoint(model, "run/cnn")` writes run/cnn.json and run/cnn.bin.
The manifest records the engine version, architecture, array names and
shapes, dtype and the build seed; the blob holds every persistent array
in manifest order.  For float32 models the round trip is bitwise exact.
Models built in float64 are stored as float32, so they reload with
reduced precision.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import CheckpointError
from ..nn import ENGINE_VERSION
from .architectures import Model, build_model
from .config import ModelConfig, ModelKind
from .embeddings import EmbeddingTable
from .vocab import CharVocab

__all__ = ["save_checkpoint", "load_checkpoint"]

_BLOB_DTYPE = "<f4"


def _stem(path: str | Path) -> Path:
    path = Path(path)
    if path.suffix in (".json", ".bin"):
        return path.with_suffix("")
    return path


def save_checkpoint(model: Model, path: str | Path) -> tuple[Path, Path]:
    """Write `<path>.json` and `<path>.bin`; returns both paths."""
    stem = _stem(path)
    stem.parent.mkdir(parents=True, exist_ok=True)
    arrays = model.state_arrays()
    config = asdict(model.config)
    config["kind"] = str(model.config.kind)
    config["cnn_kernels"] = list(model.config.cnn_kernels)
    manifest = {
        "engine": ENGINE_VERSION,
        "kind": str(model.kind),
        "dtype": model.dtype.name,
        "seed": model.seed,
        "config": config,
        "vocab": model.vocab.to_dict() if model.vocab is not None else None,
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
    }
    manifest_path = stem.with_suffix(".json")
    blob_path = stem.with_suffix(".bin")
    with manifest_path.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    with blob_path.open("wb") as fh:
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype=_BLOB_DTYPE).tobytes())
    return manifest_path, blob_path


def load_checkpoint(
    path: str | Path,
    embeddings: EmbeddingTable | None = None,
) -> Model:
    """Rebuild a model from `<path>.json` + `<path>.bin`.

    ext-emb-lstm checkpoints need the embedding table passed in; the
    table itself is not part of the checkpoint.
    """
    stem = _stem(path)
    manifest_path = stem.with_suffix(".json")
    blob_path = stem.with_suffix(".bin")
    if not manifest_path.exists():
        raise CheckpointError(f"missing checkpoint manifest {manifest_path}")
    if not blob_path.exists():
        raise CheckpointError(f"missing checkpoint blob {blob_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{manifest_path}: not valid JSON: {exc}") from None

    engine = manifest.get("engine")
    if engine != ENGINE_VERSION:
        raise CheckpointError(
            f"{manifest_path}: engine {engine!r} does not match {ENGINE_VERSION!r}"
        )
    config_data = dict(manifest["config"])
    config_data["kind"] = ModelKind.parse(config_data["kind"])
    config_data["cnn_kernels"] = tuple(config_data["cnn_kernels"])
    config = ModelConfig(**config_data)
    vocab = CharVocab.from_dict(manifest["vocab"]) if manifest.get("vocab") else None
    dtype = np.dtype(manifest["dtype"])

    model = build_model(config, seed=int(manifest["seed"]), vocab=vocab,
                        embeddings=embeddings, dtype=dtype)

    arrays = model.state_arrays()
    expected = [{"name": name, "shape": list(arr.shape)} for name, arr in arrays]
    if expected != manifest["arrays"]:
        raise CheckpointError(
            f"{manifest_path}: array layout does not match the rebuilt model; "
            "the checkpoint was written by an incompatible configuration"
        )

    blob = np.frombuffer(blob_path.read_bytes(), dtype=_BLOB_DTYPE)
    total = sum(int(np.prod(arr.shape)) for _, arr in arrays)
    if blob.size != total:
        raise CheckpointError(
            f"{blob_path}: expected {total} float32 values, found {blob.size}"
        )
    offset = 0
    for _, arr in arrays:
        count = int(np.prod(arr.shape))
        chunk = blob[offset : offset + count].reshape(arr.shape)
        np.copyto(arr, chunk.astype(arr.dtype))
        offset += count
    return model
