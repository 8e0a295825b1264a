"""End-to-end command-line pipeline: every subcommand, exit codes, manifests."""

import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from blid.annotation import AnnotationStore
from blid.cli import main, make_configs, parse_config_file
from blid.corpus import load_corpus
from blid.errors import ConfigError
from blid.models import ModelKind


def run_cli(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def corpus_tsv(tmp_path):
    path = tmp_path / "corpus.tsv"
    assert run_cli("gen-synthetic", path, "--size", 60, "--overlap", 0.2, "--seed", 3) == 0
    return path


class TestConfigPlumbing:
    def test_parse_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nepochs = 4\nlr=0.01  # inline\n\nkind = cnn\n")
        assert parse_config_file(cfg) == {"epochs": "4", "lr": "0.01", "kind": "cnn"}

    def test_malformed_line_reports_line_number(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epochs = 4\njust-some-words\n")
        with pytest.raises(ConfigError, match=r":2:"):
            parse_config_file(cfg)

    def test_make_configs_layers_file_then_cli(self):
        mcfg, tcfg = make_configs(
            ModelKind.LOGREG,
            file_values={"epochs": "2", "lr": "0.01", "hidden": "32"},
            overrides={"epochs": 5, "lr": None},
        )
        assert tcfg.epochs == 5 and tcfg.lr == 0.01
        assert mcfg.hidden == 32

    def test_kind_key_in_file_switches_model(self):
        mcfg, _ = make_configs(ModelKind.LOGREG, file_values={"kind": "cnn"})
        assert mcfg.kind is ModelKind.CNN

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="momentum"):
            make_configs(ModelKind.LOGREG, file_values={"momentum": "0.9"})

    def test_bad_value_type_rejected(self):
        with pytest.raises(ConfigError, match="epochs"):
            make_configs(ModelKind.LOGREG, file_values={"epochs": "many"})


class TestPreprocess:
    def test_ten_line_fixture(self, tmp_path, capsys):
        raw = tmp_path / "raw.txt"
        raw.write_text(
            "Kaallidi, 7 biis.\n"
            "<b>Hintte</b> bolla!\n"
            "Asa https://example.com asa\n"
            "\n"
            "hara\n"
            "DOONAN doonan\n"
            "giddiis.\n"
            "  ekkide  \n"
            "123 456\n"
            "ba'issi\n"
        )
        out = tmp_path / "words.txt"
        assert run_cli("preprocess", raw, out) == 0
        line = capsys.readouterr().out.strip()
        assert line == "lines=10 tokens=12 unique=10 written=12"
        words = out.read_text().split()
        assert words[:2] == ["kaallidi", "biis"]
        assert "hintte" in words and "ba'issi" in words
        assert not any(ch.isdigit() for w in words for ch in w)

    def test_unique_flag_deduplicates(self, tmp_path, capsys):
        raw = tmp_path / "raw.txt"
        raw.write_text("asa asa hara\nasa\n")
        out = tmp_path / "words.txt"
        assert run_cli("preprocess", raw, out, "--unique") == 0
        assert "written=2" in capsys.readouterr().out
        assert out.read_text().split() == ["asa", "hara"]


class TestCommon:
    def test_shared_vocabulary_lands_in_common(self, tmp_path, capsys):
        a = tmp_path / "wal.txt"
        b = tmp_path / "gof.txt"
        a.write_text("kaallidi\nbiittaa\niita\ndaro\ngiddiis\nasa\n")
        b.write_text("kaallidi\nbiittaa\niita\ndaro\nhintte\n")
        out_dir = tmp_path / "out"
        assert run_cli("common", a, b, out_dir) == 0
        assert capsys.readouterr().out.strip() == "a_only=2 b_only=1 common=4"
        common = (out_dir / "common.txt").read_text().split()
        assert common == ["biittaa", "daro", "iita", "kaallidi"]
        assert (out_dir / "a_only.txt").read_text().split() == ["asa", "giddiis"]
        assert (out_dir / "b_only.txt").read_text().split() == ["hintte"]


class TestGenAndStats:
    def test_stats_json(self, corpus_tsv, capsys):
        assert run_cli("stats", corpus_tsv, "--format", "json") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["total"] == 60
        assert payload["counts"]["wal-gof"] == 12
        assert abs(sum(payload["fractions"].values()) - 1.0) < 1e-9

    def test_stats_text_table(self, corpus_tsv, capsys):
        assert run_cli("stats", corpus_tsv) == 0
        out = capsys.readouterr().out
        assert "tag" in out and "total" in out and "wal-gof" in out

    def test_gen_is_seed_stable(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        for path in (a, b):
            assert run_cli("gen-synthetic", path, "--size", 30, "--overlap", 0.5,
                           "--seed", 8) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_gen_can_write_embeddings(self, tmp_path, capsys):
        path = tmp_path / "c.tsv"
        vecs = tmp_path / "c.vec"
        assert run_cli("gen-synthetic", path, "--size", 10, "--overlap", 0.0,
                       "--seed", 1, "--embeddings-out", vecs, "--embed-dim", 16) == 0
        lines = vecs.read_text().splitlines()
        assert lines[0] == "dim 16"
        assert len(lines) == 11


class TestTrainEvalPredict:
    @pytest.fixture()
    def trained(self, corpus_tsv, tmp_path, capsys):
        stem = tmp_path / "model"
        code = run_cli("train", corpus_tsv, "--model", "logreg", "--out", stem,
                       "--epochs", 4, "--seed", 3)
        capsys.readouterr()
        assert code == 0
        return stem

    def test_train_writes_all_artifacts(self, trained, corpus_tsv):
        for suffix in (".json", ".bin", ".history.csv", ".manifest.json", ".test.tsv"):
            assert Path(str(trained) + suffix).exists(), suffix
        manifest = json.loads(Path(str(trained) + ".manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["seed"] == 3
        digest = hashlib.sha256(corpus_tsv.read_bytes()).hexdigest()
        assert manifest["inputs"][str(corpus_tsv)] == digest
        assert str(trained) + ".bin" in manifest["outputs"]
        assert manifest["config"]["model"]["kind"] == "logreg"
        assert manifest["config"]["training"]["epochs"] == 4

    def test_history_has_header_and_one_row_per_epoch(self, trained):
        lines = Path(str(trained) + ".history.csv").read_text().splitlines()
        assert lines[0] == "epoch,train_loss,dev_macro_f1"
        assert len(lines) == 5
        assert lines[1].split(",")[0] == "1"

    def test_rerun_reproduces_history_and_weights(self, corpus_tsv, tmp_path, capsys):
        stems = [tmp_path / "run-a", tmp_path / "run-b"]
        for stem in stems:
            assert run_cli("train", corpus_tsv, "--model", "logreg", "--out", stem,
                           "--epochs", 3, "--seed", 5) == 0
        capsys.readouterr()
        a, b = stems
        assert Path(str(a) + ".history.csv").read_bytes() == \
            Path(str(b) + ".history.csv").read_bytes()
        assert Path(str(a) + ".bin").read_bytes() == Path(str(b) + ".bin").read_bytes()

    def test_eval_text_report_and_manifest(self, trained, tmp_path, capsys):
        test_tsv = Path(str(trained) + ".test.tsv")
        report = tmp_path / "report.txt"
        assert run_cli("eval", str(trained) + ".json", test_tsv, "--out", report) == 0
        capsys.readouterr()
        assert "accuracy" in report.read_text()
        manifest = json.loads((tmp_path / "report.txt.manifest.json").read_text())
        assert manifest["command"] == "eval"
        assert str(test_tsv) in manifest["inputs"]

    def test_eval_json_to_stdout(self, trained, capsys):
        test_tsv = Path(str(trained) + ".test.tsv")
        assert run_cli("eval", str(trained) + ".json", test_tsv, "--format", "json") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["model"] == "logreg"
        assert set(payload["per_class"]) == {"wal", "gof", "wal-gof"}

    def test_predict_cleans_input_and_prints_rows(self, trained, capsys):
        assert run_cli("predict", trained, "KAALLIDI,", "hintte") == 0
        rows = capsys.readouterr().out.strip().splitlines()
        word, tag, probs = rows[0].split("\t")
        assert word == "kaallidi"
        assert tag in ("wal", "gof", "wal-gof")
        assert len(probs.split()) == 3

    def test_predict_json(self, trained, capsys):
        assert run_cli("predict", trained, "asa", "--format", "json") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload[0]["word"] == "asa"
        assert abs(sum(payload[0]["probs"].values()) - 1.0) < 1e-6

    def test_predict_rejects_empty_word(self, trained, capsys):
        assert run_cli("predict", trained, ",") == 2
        assert capsys.readouterr().err.startswith("blid: E:usage:")

    def test_memorized_corpus_predicts_its_own_labels(self, tiny_corpus, tmp_path, capsys):
        from blid.corpus import save_corpus

        path = tmp_path / "tiny.tsv"
        save_corpus(tiny_corpus, path)
        stem = tmp_path / "memorized"
        assert run_cli("train", path, "--model", "logreg", "--out", stem,
                       "--dev", path, "--epochs", 300, "--lr", 0.01,
                       "--stop-at-dev-f1", 1.0, "--seed", 1) == 0
        capsys.readouterr()
        assert run_cli("predict", stem, "hintte", "asa") == 0
        rows = [line.split("\t") for line in capsys.readouterr().out.strip().splitlines()]
        assert rows[0][:2] == ["hintte", "gof"]
        assert rows[1][:2] == ["asa", "wal"]

    def test_config_file_with_cli_override(self, corpus_tsv, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epochs = 2\nlr = 0.01\n")
        stem = tmp_path / "cfg-model"
        assert run_cli("train", corpus_tsv, "--model", "logreg", "--out", stem,
                       "--config", cfg, "--epochs", 3, "--seed", 1) == 0
        capsys.readouterr()
        lines = Path(str(stem) + ".history.csv").read_text().splitlines()
        assert len(lines) == 4
        manifest = json.loads(Path(str(stem) + ".manifest.json").read_text())
        assert manifest["config"]["training"]["lr"] == 0.01
        assert manifest["config"]["training"]["epochs"] == 3

    def test_explicit_dev_corpus_skips_test_split(self, corpus_tsv, tmp_path, capsys):
        stem = tmp_path / "dev-model"
        assert run_cli("train", corpus_tsv, "--model", "logreg", "--out", stem,
                       "--dev", corpus_tsv, "--epochs", 2, "--seed", 1) == 0
        capsys.readouterr()
        assert not Path(str(stem) + ".test.tsv").exists()


class TestMerge:
    def test_votes_merge_into_gold_and_queue(self, tmp_path, capsys):
        store_path = tmp_path / "store.jsonl"
        store = AnnotationStore.create(store_path, ["ann-a", "ann-b", "ann-c"])
        first, second = [item.item_id for item in store.add_items(["asa", "kaallidi"])]
        for annotator in ("ann-a", "ann-b", "ann-c"):
            store.record_label(first, annotator, "wal")
        store.record_label(second, "ann-a", "wal")
        store.record_label(second, "ann-b", "gof")
        store.record_label(second, "ann-c", "wal-gof")

        gold = tmp_path / "gold.tsv"
        assert run_cli("merge", store_path, gold) == 0
        out = capsys.readouterr().out
        assert "decided=1 pending_adjudication=1" in out
        corpus = load_corpus(gold)
        assert corpus.words() == ["asa"]
        queue = json.loads((tmp_path / "gold.adjudication.json").read_text())
        assert queue[0]["word"] == "kaallidi"
        assert len(queue[0]["votes"]) == 3


class TestExitCodes:
    def test_missing_subcommand_is_usage_error(self, capsys):
        assert run_cli() == 2
        capsys.readouterr()

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert run_cli("frobnicate") == 2
        capsys.readouterr()

    def test_missing_checkpoint_is_runtime_error(self, tmp_path, capsys):
        assert run_cli("predict", tmp_path / "missing", "asa") == 1
        assert capsys.readouterr().err.startswith("blid: E:checkpoint:")

    def test_missing_corpus_is_io_error(self, tmp_path, capsys):
        assert run_cli("stats", tmp_path / "missing.tsv") == 1
        assert capsys.readouterr().err.startswith("blid: E:io:")

    def test_bad_config_key_is_config_error(self, corpus_tsv, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("momentum = 0.9\n")
        assert run_cli("train", corpus_tsv, "--model", "logreg",
                       "--out", tmp_path / "m", "--config", cfg) == 1
        assert capsys.readouterr().err.startswith("blid: E:config:")

    def test_version_exits_zero(self, capsys):
        assert run_cli("--version") == 0
        capsys.readouterr()


class TestConsoleEntry:
    def test_module_invocation_version(self):
        proc = subprocess.run([sys.executable, "-m", "blid.cli", "--version"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.startswith("blid ")

    def test_module_invocation_usage_error(self):
        proc = subprocess.run([sys.executable, "-m", "blid.cli"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
