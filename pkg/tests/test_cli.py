import csv
import json

import pytest

from cli.middleware import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, exit_code_for
from main import main
from utils.exceptions import GradientCheckError, ShapeMismatchError

TRAIN_FLAGS = ["--epochs", "2", "--batch-size", "8", "--d-out", "4", "--hidden", "8,8", "--restarts", "2"]


def read_rows(path):
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def synth_manifest(tmp_path):
    out = tmp_path / "data"
    code = main(["synth", "--n", "24", "--clusters", "3", "--dims", "5,4", "--seed", "1", "--out", str(out)])
    assert code == EXIT_OK
    return out / "manifest.json"


def test_synth_is_reproducible(tmp_path, synth_manifest, capsys):
    other = tmp_path / "again"
    main(["synth", "--n", "24", "--clusters", "3", "--dims", "5,4", "--seed", "1", "--out", str(other)])
    assert str(other / "manifest.json") in capsys.readouterr().out
    for name in ["view_0.csv", "view_1.csv", "labels.csv", "manifest.json"]:
        assert (other / name).read_bytes() == (synth_manifest.parent / name).read_bytes()


def test_synth_binary_format(tmp_path):
    out = tmp_path / "bin"
    args = ["synth", "--n", "12", "--clusters", "2", "--dims", "3,3", "--format", "binary", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert (out / "view_0.bin").is_file()


@pytest.mark.parametrize("argv", [
    ["synth", "--n", "10", "--clusters", "1", "--dims", "3,3", "--out", "{out}"],
    ["synth", "--n", "10", "--clusters", "2", "--dims", "3,x", "--out", "{out}"],
    ["train"],
    ["unknown"],
])
def test_invalid_usage_exits_with_validation_code(tmp_path, argv):
    assert main([token.format(out=tmp_path) for token in argv]) == EXIT_VALIDATION


def test_train_eval_pipeline(tmp_path, synth_manifest, capsys):
    run = tmp_path / "run"
    assert main(["train", "--data", str(synth_manifest), "--seed", "3", "--out", str(run), *TRAIN_FLAGS]) == EXIT_OK
    assert "epochs=2 steps=6" in capsys.readouterr().out

    history = read_rows(run / "history.csv")
    assert len(history) == 6
    assert list(history[0]) == ["epoch", "step", "rec", "cls", "code", "glb", "total"]
    assert len(read_rows(run / "epochs.csv")) == 2
    config = json.loads((run / "config.json").read_text())
    assert config["hidden_widths"] == [8, 8] and config["seed"] == 3

    evaluation = tmp_path / "eval"
    argv = ["eval", "--checkpoint", str(run / "checkpoint.hcn"), "--data", str(synth_manifest),
            "--seeds", "2", "--restarts", "2", "--raw-baseline", "--out", str(evaluation)]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert "hcn: acc=" in out and "raw: acc=" in out

    rows = read_rows(evaluation / "eval.csv")
    assert [(row["mode"], row["seed"]) for row in rows] == [("hcn", "0"), ("hcn", "1"), ("raw", "0"), ("raw", "1")]
    assert len(read_rows(evaluation / "eval_summary.csv")) == 2
    report = json.loads((evaluation / "report.json").read_text())
    assert report["k"] == 3
    assert len(report["reports"]) == 4


def test_eval_rejects_mismatched_checkpoint(tmp_path, synth_manifest):
    run = tmp_path / "run"
    main(["train", "--data", str(synth_manifest), "--out", str(run), *TRAIN_FLAGS])
    other = tmp_path / "other"
    main(["synth", "--n", "24", "--clusters", "3", "--dims", "6,4", "--out", str(other)])
    argv = ["eval", "--checkpoint", str(run / "checkpoint.hcn"), "--data", str(other / "manifest.json"),
            "--out", str(tmp_path / "eval")]
    assert main(argv) == EXIT_VALIDATION


def test_train_rejects_unknown_preset(tmp_path, synth_manifest):
    argv = ["train", "--data", str(synth_manifest), "--preset", "imagenet", "--out", str(tmp_path)]
    assert main(argv) == EXIT_VALIDATION


def test_metrics(tmp_path, capsys):
    pred, truth = tmp_path / "pred.csv", tmp_path / "truth.csv"
    pred.write_text("0\n0\n1\n1\n")
    truth.write_text("0\n1\n0\n1\n")
    assert main(["metrics", "--pred", str(pred), "--truth", str(truth)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "acc=0.500000" in out and "ari=-0.500000" in out

    truth.write_text("0\n1\n0\n")
    assert main(["metrics", "--pred", str(pred), "--truth", str(truth)]) == EXIT_VALIDATION
    assert main(["metrics", "--pred", str(tmp_path / "none.csv"), "--truth", str(truth)]) == EXIT_VALIDATION


def test_gradcheck(capsys):
    assert main(["gradcheck", "--term", "rec", "--activation", "tanh"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert main(["gradcheck", "--term", "rec", "--activation", "tanh", "--inject-wrong-sign"]) == EXIT_RUNTIME
    assert "FAIL" in capsys.readouterr().out
    assert main(["gradcheck", "--views", "3", "--seed", "1"]) == EXIT_OK


def test_exit_codes():
    assert exit_code_for(ShapeMismatchError("x")) == EXIT_VALIDATION
    assert exit_code_for(GradientCheckError("x")) == EXIT_RUNTIME
    assert exit_code_for(FileNotFoundError("x")) == EXIT_VALIDATION
    assert exit_code_for(RuntimeError("x")) == EXIT_RUNTIME
