import json
import subprocess
import sys
from relatekit.cli import main


def run_cli(*args) -> int:
    return main(list(args))


def test_help_exits_zero():
    result = subprocess.run(
        [sys.executable, "-m", "relatekit.cli", "--help"], capture_output=True, text=True
    )
    assert result.returncode == 0
    assert "usage" in result.stdout.lower()


def test_subcommand_help_exits_zero():
    for cmd in ("ingest", "screen", "train", "run-all", "fixture"):
        result = subprocess.run(
            [sys.executable, "-m", "relatekit.cli", cmd, "--help"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, cmd


def test_unknown_flag_exits_one():
    result = subprocess.run(
        [sys.executable, "-m", "relatekit.cli", "ingest", "--nope"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 1
    assert "usage" in result.stderr.lower()


def test_missing_subcommand_exits_one():
    result = subprocess.run(
        [sys.executable, "-m", "relatekit.cli"], capture_output=True, text=True
    )
    assert result.returncode == 1


def test_ingest_on_fixture(fx_dir, tmp_path, capsys):
    out = tmp_path / "stats.json"
    assert run_cli("ingest", "--root", str(fx_dir / "dataset"), "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    assert payload["stats"]["REL"]["train"]["evaluations"] > 0


def test_ingest_missing_dir_exits_two(tmp_path):
    assert run_cli("ingest", "--root", str(tmp_path / "nope")) == 2


def test_screen_subcommand(fx_dir, tmp_path):
    out = tmp_path / "screened"
    code = run_cli(
        "screen", "--root", str(fx_dir / "dataset"), "--metric", "REL",
        "--policy", "analysis", "--out", str(out),
    )
    assert code == 0
    assert (out / "pairs.jsonl").is_file()
    exclusions = [json.loads(l) for l in (out / "exclusions.jsonl").read_text().splitlines()]
    assert {e["reason"] for e in exclusions} == {"anchor_mean", "original_mean", "low_entropy"}
    for e in exclusions:
        assert set(e) == {"listener_id", "reason", "value"}


def test_textfeat_subcommand(fx_dir, fx_dataset, tmp_path):
    out = tmp_path / "text_features.jsonl"
    assert run_cli("textfeat", "--root", str(fx_dir / "dataset"), "--out", str(out)) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == len(fx_dataset.pairs)
    for row in rows[:20]:
        assert set(row) == {"pair_id", "word_count", "temporal", "flesch"}


def test_analyze_subcommand(small_fx_dir, tmp_path):
    out = tmp_path / "analysis"
    code = run_cli(
        "analyze", "--root", str(small_fx_dir / "dataset"),
        "--factors", "temporal,category:animal", "--out", str(out),
    )
    assert code == 0
    report = json.loads((out / "factor_report.json").read_text())
    assert set(report["factors"]) == {"temporal", "category:animal"}
    boxes = json.loads((out / "boxplots.json").read_text())
    assert "temporal" in boxes["factors"]


def test_clapscore_and_evaluate(small_fx_dir, tmp_path):
    preds = tmp_path / "predictions.jsonl"
    code = run_cli(
        "clapscore",
        "--audio-emb-dir", str(small_fx_dir / "embeddings" / "audio"),
        "--text-emb-dir", str(small_fx_dir / "embeddings" / "text"),
        "--out", str(preds),
    )
    assert code == 0
    rows = [json.loads(l) for l in preds.read_text().splitlines()]
    assert all(-1.0 <= r["score"] <= 1.0 for r in rows)

    report_path = tmp_path / "report.json"
    code = run_cli(
        "evaluate", "--root", str(small_fx_dir / "dataset"),
        "--predictions", str(preds), "--out", str(report_path),
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    assert set(report["metrics"]) == {"mse", "lcc", "srcc", "ktau", "n"}
    assert report["per_category_srcc"].keys() >= {"animal", "music"}


def test_numeric_failure_exits_three(tmp_path):
    import numpy as np

    from relatekit.features import write_feature

    (tmp_path / "audio").mkdir()
    (tmp_path / "text").mkdir()
    write_feature(tmp_path / "audio" / "p0.rfb", np.array([0.0, 0.0], np.float32))
    write_feature(tmp_path / "text" / "p0.rfb", np.array([1.0, 0.0], np.float32))
    # an all-zero embedding has no direction -> numeric failure
    code = run_cli(
        "clapscore", "--audio-emb-dir", str(tmp_path / "audio"),
        "--text-emb-dir", str(tmp_path / "text"), "--out", str(tmp_path / "p.jsonl"),
    )
    assert code == 3


def test_fixture_subcommand_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        code = run_cli(
            "fixture", "--out", str(out), "--seed", "3",
            "--train-captions", "8", "--test-captions", "6", "--listeners", "10",
        )
        assert code == 0
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    assert (a / "dataset" / "evaluations.jsonl").read_bytes() == (
        b / "dataset" / "evaluations.jsonl"
    ).read_bytes()


def test_train_predict_cli_round_trip(small_fx_dir, tmp_path):
    # split the small fixture's screened test data into val/test dirs first
    from relatekit.dataset import MetricKind, Split, load_dataset, save_dataset, split_validation_test
    from relatekit.screening import POLICIES, screen

    d = load_dataset(small_fx_dir / "dataset")
    kept_train, _ = screen(d.restrict(split=Split.TRAIN), MetricKind.REL, POLICIES["train"])
    kept_test, _ = screen(d.restrict(split=Split.TEST), MetricKind.REL, POLICIES["test"])
    val, _ = split_validation_test(kept_test.restrict(metric=MetricKind.REL), seed=0)
    save_dataset(kept_train.restrict(metric=MetricKind.REL), tmp_path / "train_ds")
    save_dataset(val, tmp_path / "val_ds")

    ckpt = tmp_path / "model.rkpt"
    code = run_cli(
        "train",
        "--train-root", str(tmp_path / "train_ds"),
        "--val-root", str(tmp_path / "val_ds"),
        "--features-dir", str(small_fx_dir / "features"),
        "--seed", "5",
        "--override", "total_steps=40", "--override", "warmup_steps=10",
        "--override", "eval_every=20", "--override", "lr0=0.0005",
        "--override", "C=2", "--override", "H=4", "--override", "H2=4",
        "--out", str(ckpt),
    )
    assert code == 0
    assert ckpt.is_file()

    preds = tmp_path / "preds.jsonl"
    code = run_cli(
        "predict", "--checkpoint", str(ckpt),
        "--features-dir", str(small_fx_dir / "features"), "--out", str(preds),
    )
    assert code == 0
    rows = [json.loads(l) for l in preds.read_text().splitlines()]
    assert rows and all(-1.0 <= r["score"] <= 1.0 for r in rows)
