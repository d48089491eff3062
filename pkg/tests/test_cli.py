"""Command-line flow: generate, train, eval, and their failure exit codes."""

import json

import pytest

from tacgest.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from tacgest.datafiles import load_dataset
from tacgest.manifest import file_sha256


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run_cli(workdir, *argv) -> int:
    return main(["--runs-dir", str(workdir / "runs"), *argv])


def test_usage_errors(workdir, capsys):
    assert main([]) == EXIT_USAGE
    assert main(["train", "--data", "x.jsonl"]) == EXIT_USAGE  # missing method/out
    assert main(["train", "--data", "x.jsonl", "--method", "nope",
                 "--out", "m.npz"]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK
    capsys.readouterr()


def test_generate_writes_dataset_and_manifest(workdir, capsys):
    out = workdir / "corpus.jsonl"
    code = run_cli(workdir, "generate", "--out", str(out),
                   "--participants", "1", "--seed", "5")
    assert code == EXIT_OK
    assert "wrote 90 recordings" in capsys.readouterr().out
    recs = load_dataset(out)
    assert len(recs) == 90
    manifests = list((workdir / "runs").glob("generate-*/manifest.json"))
    assert len(manifests) == 1
    payload = json.loads(manifests[0].read_text())
    assert payload["seeds"] == {"corpus": 5}
    assert payload["outputs"]["dataset"]["sha256"] == file_sha256(out)


def test_generate_is_reproducible(workdir):
    a = workdir / "a.jsonl"
    b = workdir / "b.jsonl"
    run_cli(workdir, "generate", "--out", str(a), "--participants", "1")
    run_cli(workdir, "generate", "--out", str(b), "--participants", "1")
    assert file_sha256(a) == file_sha256(b)


def test_train_then_eval_flow(workdir, capsys):
    data = workdir / "corpus.jsonl"
    model = workdir / "model.npz"
    run_cli(workdir, "generate", "--out", str(data), "--participants", "1")
    capsys.readouterr()

    code = run_cli(workdir, "train", "--data", str(data),
                   "--method", "tp-knn", "--out", str(model))
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "accuracy:" in out
    assert model.exists()

    run_dirs = list((workdir / "runs").glob("train-*"))
    assert len(run_dirs) == 1
    results = json.loads((run_dirs[0] / "results.json").read_text())
    assert results["method"] == "tp-knn"
    assert results["n_train"] + results["n_test"] == 90
    assert (run_dirs[0] / "confusion.csv").exists()
    assert (run_dirs[0] / "confusion.png").exists()
    assert (run_dirs[0] / "manifest.json").exists()

    code = run_cli(workdir, "eval", "--model", str(model), "--data", str(data))
    assert code == EXIT_OK
    assert "accuracy:" in capsys.readouterr().out
    eval_dirs = list((workdir / "runs").glob("eval-*"))
    assert len(eval_dirs) == 1
    eval_results = json.loads((eval_dirs[0] / "results.json").read_text())
    # eval re-derives the same held-out split from the stored seed
    assert eval_results["accuracy"] == results["accuracy"]
    assert eval_results["confusion"] == results["confusion"]


def test_train_missing_data_file(workdir, capsys):
    code = run_cli(workdir, "train", "--data", str(workdir / "absent.jsonl"),
                   "--method", "tp-knn", "--out", str(workdir / "m.npz"))
    assert code == EXIT_DATA
    assert "error:" in capsys.readouterr().err


def test_train_corrupt_data_file(workdir, capsys):
    bad = workdir / "bad.jsonl"
    bad.write_text('{"not": "a recording"}\n')
    code = run_cli(workdir, "train", "--data", str(bad),
                   "--method", "tp-knn", "--out", str(workdir / "m.npz"))
    assert code == EXIT_DATA
    assert "error:" in capsys.readouterr().err


def test_eval_on_wrong_model_path(workdir, capsys):
    data = workdir / "corpus.jsonl"
    run_cli(workdir, "generate", "--out", str(data), "--participants", "1")
    capsys.readouterr()
    code = run_cli(workdir, "eval", "--model", str(workdir / "absent.npz"),
                   "--data", str(data))
    assert code == EXIT_DATA
    assert "error:" in capsys.readouterr().err
