"""Single pipeline executable.

Subcommands cover the whole workflow: raw text cleanup (preprocess),
shared-vocabulary extraction (common), the annotation service (serve),
vote merging (merge), model building (train/eval/predict), corpus
statistics (stats) and synthetic data (gen-synthetic).

Every training and evaluation run writes one JSON manifest recording
the command, the resolved configuration, the seed, SHA-256 digests of
the inputs and the produced output paths, so a run can be reproduced
from its artifacts alone.

Errors print to stderr as `blid: E:<code>: <detail>` and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .annotation import AnnotationStore
from .corpus import (
    Corpus,
    Tag,
    clean_text,
    dedupe_common,
    load_corpus,
    load_wordlist,
    save_corpus,
    save_wordlist,
    shuffle_split,
    tokenize,
)
from .errors import BlidError, ConfigError
from .evaluation import format_report, report_to_dict
from .models import (
    CharVocab,
    EmbeddingTable,
    ModelConfig,
    ModelKind,
    TrainingConfig,
    build_model,
    evaluate_model,
    load_checkpoint,
    load_embedding_table,
    predict,
    save_checkpoint,
    train,
)
from .synthetic import gen_synthetic, write_random_embeddings

__all__ = ["main", "parse_config_file", "make_configs"]


class _UsageError(Exception):
    """Bad command-line arguments; exits 2 like argparse's own errors."""


_KINDS = [k.value for k in ModelKind]

_INT_KEYS = {
    "char_embed_dim", "hidden", "dense", "cnn_filters", "classes",
    "ext_embed_dim", "hash_dim", "epochs", "batch_size", "seed",
}
_FLOAT_KEYS = {"dropout", "leaky_alpha", "lr", "beta1", "beta2", "eps"}
_BOOL_KEYS = {"shuffle_each_epoch"}
_TUPLE_KEYS = {"cnn_kernels"}


# -- configuration plumbing --------------------------------------------------

def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat `key = value` lines; `#` starts a comment."""
    data: dict[str, str] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {raw.strip()!r}")
            data[key.strip()] = value.strip()
    return data


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            if value.lower() in ("true", "yes", "1"):
                return True
            if value.lower() in ("false", "no", "0"):
                return False
            raise ValueError(value)
        if key in _TUPLE_KEYS:
            return tuple(int(part) for part in value.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"config key {key!r} has malformed value {value!r}") from None
    return value


def make_configs(
    kind: ModelKind,
    file_values: dict[str, str] | None = None,
    overrides: dict[str, object] | None = None,
) -> tuple[ModelConfig, TrainingConfig]:
    """Layer defaults, then config-file values, then CLI overrides."""
    merged: dict[str, object] = dict(file_values or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    model_fields = {f.name for f in dataclasses.fields(ModelConfig)} - {"kind"}
    train_fields = {f.name for f in dataclasses.fields(TrainingConfig)}
    model_kwargs: dict[str, object] = {}
    train_kwargs: dict[str, object] = {}
    for key, value in merged.items():
        if key == "kind":
            kind = ModelKind.parse(str(value))
        elif key in model_fields:
            model_kwargs[key] = _coerce(key, value)
        elif key in train_fields:
            train_kwargs[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return ModelConfig(kind=kind, **model_kwargs), TrainingConfig(**train_kwargs)


def _config_snapshot(mcfg: ModelConfig, tcfg: TrainingConfig) -> dict:
    model = dataclasses.asdict(mcfg)
    model["kind"] = str(mcfg.kind)
    model["cnn_kernels"] = list(mcfg.cnn_kernels)
    return {"model": model, "training": dataclasses.asdict(tcfg)}


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    path: Path,
    command: str,
    config: dict,
    seed: int,
    inputs: list[str | Path],
    outputs: list[str | Path],
    started: str,
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "started": started,
        "finished": _now(),
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _load_embeddings(path: str | None, fallback: str) -> EmbeddingTable | None:
    if path is None:
        return None
    return load_embedding_table(path, fallback=fallback)


# -- subcommand handlers ------------------------------------------------------

def _cmd_preprocess(args) -> int:
    lines = 0
    tokens: list[str] = []
    with Path(args.input).open("r", encoding="utf-8") as fh:
        for raw in fh:
            lines += 1
            tokens.extend(tokenize(clean_text(raw)))
    unique = list(dict.fromkeys(tokens))
    out_tokens = unique if args.unique else tokens
    save_wordlist(out_tokens, args.output)
    print(f"lines={lines} tokens={len(tokens)} unique={len(unique)} written={len(out_tokens)}")
    return 0


def _cmd_common(args) -> int:
    a_words = load_wordlist(args.list_a)
    b_words = load_wordlist(args.list_b)
    a_only, b_only, common = dedupe_common(a_words, b_words)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_wordlist(sorted(a_only), out_dir / "a_only.txt")
    save_wordlist(sorted(b_only), out_dir / "b_only.txt")
    save_wordlist(sorted(common), out_dir / "common.txt")
    print(f"a_only={len(a_only)} b_only={len(b_only)} common={len(common)}")
    return 0


def _cmd_serve(args) -> int:
    store_path = Path(args.store)
    if store_path.exists():
        store = AnnotationStore.open(store_path)
    else:
        if not args.annotators:
            raise ConfigError(
                f"store {store_path} does not exist; pass --annotators a,b,c to create it"
            )
        names = [n.strip() for n in args.annotators.split(",") if n.strip()]
        store = AnnotationStore.create(store_path, names)
    if args.import_words:
        words = load_wordlist(args.import_words)
        added = store.add_items(words)
        print(f"imported {len(added)} items from {args.import_words}")

    from .service import create_app
    import uvicorn

    app = create_app(store, static_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_merge(args) -> int:
    store = AnnotationStore.open(args.store)
    corpus, queue = store.merge()
    save_corpus(corpus, args.output)
    queue_path = Path(args.queue) if args.queue else Path(args.output).with_suffix(".adjudication.json")
    queue_path.write_text(json.dumps(queue, indent=2) + "\n", encoding="utf-8")
    print(f"decided={len(corpus)} pending_adjudication={len(queue)}")
    print(f"corpus={args.output} queue={queue_path}")
    return 0


def _split_ratios(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise ConfigError(f"--split needs three ratios, got {text!r}")
    return (parts[0], parts[1], parts[2])


def _cmd_train(args) -> int:
    started = _now()
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "lr": args.lr,
        "seed": args.seed,
    }
    mcfg, tcfg = make_configs(ModelKind.parse(args.model), file_values, overrides)

    corpus = load_corpus(args.corpus)
    inputs: list[str | Path] = [args.corpus]
    outputs: list[str | Path] = []
    if args.dev:
        train_set, dev_set = corpus, load_corpus(args.dev)
        inputs.append(args.dev)
    else:
        train_set, dev_set, test_set = shuffle_split(corpus, seed=tcfg.seed,
                                                     ratios=_split_ratios(args.split))
        test_path = Path(args.out + ".test.tsv")
        test_path.parent.mkdir(parents=True, exist_ok=True)
        save_corpus(test_set, test_path)
        outputs.append(test_path)

    embeddings = _load_embeddings(args.embeddings, args.embedding_fallback)
    if embeddings is not None:
        inputs.append(args.embeddings)
    vocab = None
    if mcfg.kind.uses_chars:
        vocab = CharVocab.build(train_set.words(), max_word_len=args.max_word_len)

    model = build_model(mcfg, seed=tcfg.seed, vocab=vocab, embeddings=embeddings)
    history = train(model, train_set, dev_set, tcfg, stop_at_dev_f1=args.stop_at_dev_f1)

    manifest_path, blob_path = save_checkpoint(model, args.out)
    history_path = Path(args.out + ".history.csv")
    with history_path.open("w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,dev_macro_f1\n")
        for rec in history.records:
            fh.write(f"{rec.epoch},{rec.train_loss!r},{rec.dev_macro_f1!r}\n")
    outputs = [manifest_path, blob_path, history_path] + outputs

    run_manifest = Path(args.out + ".manifest.json")
    _write_manifest(run_manifest, "train", _config_snapshot(mcfg, tcfg), tcfg.seed,
                    inputs, outputs, started)
    print(f"trained {mcfg.kind} for {len(history.records)} epochs "
          f"(best epoch {history.best_epoch}, dev macro-F1 {history.best_dev_f1:.4f})")
    print(f"checkpoint={manifest_path} history={history_path} manifest={run_manifest}")
    return 0


def _cmd_eval(args) -> int:
    started = _now()
    embeddings = _load_embeddings(args.embeddings, args.embedding_fallback)
    model = load_checkpoint(args.checkpoint, embeddings=embeddings)
    corpus = load_corpus(args.corpus)
    report = evaluate_model(model, corpus)

    if args.format == "json":
        text = json.dumps(report_to_dict(report, model=str(model.kind)), indent=2)
    else:
        text = format_report(report, style="text-table")
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"report={args.out}")
    else:
        print(text)

    stem = Path(args.checkpoint)
    if stem.suffix in (".json", ".bin"):
        stem = stem.with_suffix("")
    manifest_path = Path(args.out + ".manifest.json") if args.out \
        else stem.with_name(stem.name + ".eval-manifest.json")
    inputs = [stem.with_suffix(".json"), stem.with_suffix(".bin"), args.corpus]
    if args.embeddings:
        inputs.append(args.embeddings)
    _write_manifest(manifest_path, "eval", {"format": args.format}, args.seed,
                    inputs, [args.out] if args.out else [], started)
    return 0


def _cmd_predict(args) -> int:
    embeddings = _load_embeddings(args.embeddings, args.embedding_fallback)
    model = load_checkpoint(args.checkpoint, embeddings=embeddings)
    results = []
    for raw in args.words:
        cleaned = tokenize(clean_text(raw))
        if len(cleaned) != 1:
            raise _UsageError(f"argument {raw!r} does not clean to a single word")
        tag, probs = predict(model, cleaned[0])
        results.append((cleaned[0], tag, probs))
    if args.format == "json":
        payload = [
            {"word": w, "tag": str(t), "probs": {str(tag): float(p[int(tag)]) for tag in Tag}}
            for w, t, p in results
        ]
        print(json.dumps(payload, indent=2))
    else:
        for w, t, p in results:
            probs = " ".join(f"{v:.4f}" for v in p)
            print(f"{w}\t{t}\t{probs}")
    return 0


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus)
    dist = corpus.stats()
    if args.format == "json":
        print(json.dumps({
            "total": dist.total,
            "counts": {str(t): dist.counts[t] for t in Tag},
            "fractions": {str(t): dist.fractions[t] for t in Tag},
        }, indent=2))
    else:
        print(f"{'tag':<10}{'count':>8}{'fraction':>10}")
        for t in Tag:
            print(f"{str(t):<10}{dist.counts[t]:>8}{dist.fractions[t]:>10.4f}")
        print(f"{'total':<10}{dist.total:>8}")
    return 0


def _cmd_gen_synthetic(args) -> int:
    corpus = gen_synthetic(args.size, args.overlap, seed=args.seed,
                           wal_frac=args.wal_frac)
    save_corpus(corpus, args.output)
    line = f"size={len(corpus)} overlap={args.overlap} seed={args.seed} out={args.output}"
    if args.embeddings_out:
        write_random_embeddings(corpus.words(), args.embed_dim, args.seed,
                                args.embeddings_out)
        line += f" embeddings={args.embeddings_out}"
    print(line)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    shared.add_argument("--config", default=None, help="flat key = value config file")
    shared.add_argument("--format", choices=["text", "json"], default="text")

    parser = argparse.ArgumentParser(
        prog="blid",
        description="Word-level bilingual language identification pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[shared],
                       help="clean and tokenize raw text into a word list")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--unique", action="store_true", help="drop duplicate tokens")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("common", parents=[shared],
                       help="split two word lists into exclusive and shared files")
    p.add_argument("list_a")
    p.add_argument("list_b")
    p.add_argument("out_dir")
    p.set_defaults(func=_cmd_common)

    p = sub.add_parser("serve", parents=[shared], help="run the annotation HTTP service")
    p.add_argument("store", help="append-only JSONL store path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--annotators", default=None,
                   help="comma-separated trio used when creating a new store")
    p.add_argument("--import-words", default=None,
                   help="word-list file to add as annotation items")
    p.add_argument("--ui", default=None, help="static directory to serve at /")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("merge", parents=[shared],
                       help="merge annotator votes into a gold corpus")
    p.add_argument("store")
    p.add_argument("output", help="gold corpus TSV path")
    p.add_argument("--queue", default=None, help="adjudication queue JSON path")
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("train", parents=[shared], help="train a classifier")
    p.add_argument("corpus", help="labeled corpus TSV")
    p.add_argument("--model", required=True, choices=_KINDS)
    p.add_argument("--out", required=True, help="checkpoint stem (writes .json/.bin)")
    p.add_argument("--dev", default=None, help="labeled dev corpus TSV")
    p.add_argument("--split", default="0.8,0.1,0.1",
                   help="train/dev/test ratios when --dev is absent")
    p.add_argument("--embeddings", default=None, help="embedding table file")
    p.add_argument("--embedding-fallback", choices=["error", "zero"], default="error")
    p.add_argument("--max-word-len", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--stop-at-dev-f1", type=float, default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", parents=[shared], help="evaluate a checkpoint on a corpus")
    p.add_argument("checkpoint")
    p.add_argument("corpus")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--embedding-fallback", choices=["error", "zero"], default="zero")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("predict", parents=[shared], help="tag words with a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("words", nargs="+")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--embedding-fallback", choices=["error", "zero"], default="zero")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("stats", parents=[shared], help="tag distribution of a corpus")
    p.add_argument("corpus")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("gen-synthetic", parents=[shared],
                       help="generate a seeded synthetic corpus")
    p.add_argument("output")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--overlap", type=float, required=True,
                   help="fraction of shared (wal-gof) words")
    p.add_argument("--wal-frac", type=float, default=0.5)
    p.add_argument("--embeddings-out", default=None,
                   help="also write random embeddings for the generated words")
    p.add_argument("--embed-dim", type=int, default=768)
    p.set_defaults(func=_cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"blid: E:usage: {exc}", file=sys.stderr)
        return 2
    except BlidError as exc:
        print(f"blid: E:{exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"blid: E:io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
