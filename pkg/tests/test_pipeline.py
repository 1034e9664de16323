import json

import pytest

from relatekit.errors import DataError
from relatekit.pipeline import PipelineConfig, run_all

FAST_OVERRIDES = {
    "C": "2", "H": "6", "H2": "6",
    "lr0": "0.0008", "total_steps": "200", "warmup_steps": "50", "eval_every": "50",
}


def make_config(fx_dir, out_dir, with_embeddings=True, seed=3) -> PipelineConfig:
    cfg = PipelineConfig(
        root=str(fx_dir / "dataset"),
        features_dir=str(fx_dir / "features"),
        out_dir=str(out_dir),
        seed=seed,
        model_overrides=dict(FAST_OVERRIDES),
        train_overrides=dict(FAST_OVERRIDES),
    )
    if with_embeddings:
        cfg.emb_audio_dir = str(fx_dir / "embeddings" / "audio")
        cfg.emb_text_dir = str(fx_dir / "embeddings" / "text")
    return cfg


@pytest.fixture(scope="module")
def bundle(small_fx_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    report = run_all(make_config(small_fx_dir, out))
    return out, report


def test_report_written_and_finite(bundle):
    out, report = bundle
    on_disk = json.loads((out / "report.json").read_text())
    assert on_disk["schema_version"] == 1
    metrics = on_disk["model"]["metrics"]
    for key in ("mse", "lcc", "srcc", "ktau"):
        assert metrics[key] is not None
        assert abs(metrics[key]) <= 4.0
    assert on_disk["baseline"]["metrics"]["srcc"] is not None


def test_bundle_contents(bundle):
    out, _ = bundle
    for name in (
        "report.json",
        "checkpoint.rkpt",
        "predictions.jsonl",
        "baseline_predictions.jsonl",
        "factor_report.json",
        "boxplots.json",
        "text_features.jsonl",
        "history.json",
        "screened/train/pairs.jsonl",
        "screened/train/exclusions.jsonl",
        "screened/test/exclusions.jsonl",
    ):
        assert (out / name).is_file(), name


def test_split_counts_disjoint(bundle):
    _, report = bundle
    val = report["split"]["validation"]
    test = report["split"]["test"]
    assert val["evaluations"] > 0 and test["evaluations"] > 0
    assert val["pairs"] > 0 and test["pairs"] > 0


def test_missing_features_names_train_stage(small_fx_dir, tmp_path):
    cfg = make_config(small_fx_dir, tmp_path / "out", with_embeddings=False)
    cfg.features_dir = str(tmp_path / "missing")
    with pytest.raises(DataError, match=r"\[stage train\]"):
        run_all(cfg)


def test_bad_root_names_ingest_stage(small_fx_dir, tmp_path):
    cfg = make_config(small_fx_dir, tmp_path / "out")
    cfg.root = str(tmp_path / "missing")
    with pytest.raises(DataError, match=r"\[stage ingest\]"):
        run_all(cfg)


def test_optional_baseline_skipped_without_embeddings(small_fx_dir, tmp_path):
    out = tmp_path / "nobase"
    report = run_all(make_config(small_fx_dir, out, with_embeddings=False, seed=5))
    assert "baseline" not in report
    assert not (out / "baseline_predictions.jsonl").exists()
