"""End-to-end benchmark pipeline: ingest through evaluation in one call.

Every stage writes its artifacts under the output directory and contributes
to a single ``report.json``. All randomness flows from one seed, so two runs
with identical inputs produce byte-identical reports and checkpoints.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import clapscore
from .config import build_model_config, build_train_config
from .dataset import (
    Dataset,
    MetricKind,
    Split,
    dataset_stats,
    load_dataset,
    mean_score_per_pair,
    save_dataset,
    split_validation_test,
)
from .errors import DataError, RelateKitError
from .factors import ALL_FACTORS, factor_analysis, factor_boxplots
from .metrics import evaluate, per_category_srcc
from .model.checkpoint import load_checkpoint, save_checkpoint
from .model.config import ModelConfig, TrainConfig
from .model.training import (
    check_feature_dims,
    load_features,
    normalize_score,
    predict_pairs,
    train,
)
from .screening import POLICIES, screen
from .text import text_features


@dataclass
class PipelineConfig:
    root: str = ""
    features_dir: str = ""
    out_dir: str = ""
    emb_audio_dir: str = ""
    emb_text_dir: str = ""
    metric: str = "REL"
    seed: int = 0
    alpha: float = 0.05
    bins: int = 3
    model_config: str = ""  # path to flat key=value file
    train_config: str = ""
    model_overrides: dict = field(default_factory=dict)
    train_overrides: dict = field(default_factory=dict)


def _stage(name: str):
    """Decorator-ish wrapper that prefixes stage names onto failures."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, RelateKitError):
                raise type(exc)(f"[stage {name}] {exc}") from exc
            return False

    return _Ctx()


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": 1, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_predictions(path: Path, scores: dict[str, float]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pid in sorted(scores):
            fh.write(json.dumps({"pair_id": pid, "score": scores[pid]}, sort_keys=True) + "\n")


def read_predictions(path: str | Path) -> dict[str, float]:
    out: dict[str, float] = {}
    path = Path(path)
    if not path.is_file():
        raise DataError(f"predictions file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                out[str(obj["pair_id"])] = float(obj["score"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise DataError(f"{path.name}:{lineno}: malformed prediction line") from None
    return out


def normalized_pair_truth(d: Dataset, metric: MetricKind) -> dict[str, float]:
    return {pid: normalize_score(m) for pid, m in mean_score_per_pair(d, metric).items()}


def evaluate_predictions(d: Dataset, metric: MetricKind, scores: dict[str, float]) -> dict:
    """Global metrics plus the per-category correlation map, as JSON-ready dict."""
    truth = normalized_pair_truth(d, metric)
    common = sorted(set(truth) & set(scores))
    if len(common) < 2:
        raise DataError("fewer than two pairs have both a prediction and a truth value")
    pred = [scores[p] for p in common]
    target = [truth[p] for p in common]
    cats = [d.pairs[p].top_categories for p in common]
    report = evaluate(pred, target)
    per_cat = per_category_srcc(pred, target, cats)
    return {
        "metrics": report.as_dict(),
        "per_category_srcc": {c.value: v for c, v in per_cat.items()},
        "pairs_evaluated": len(common),
        "pairs_missing_prediction": len(set(truth) - set(scores)),
    }


def analyze_factors(
    d: Dataset, metric: MetricKind, factors, alpha: float, bins: int
) -> tuple[dict, dict]:
    """Factor reports plus boxplot summaries; broken factors are reported, not fatal."""
    grid = {}
    boxes = {}
    for factor in factors:
        try:
            rep = factor_analysis(d, metric, factor, alpha=alpha, bins=bins)
            grid[factor] = rep.as_dict()
            boxes[factor] = {
                level: {
                    kind: {
                        "median": b.median,
                        "q1": b.q1,
                        "q3": b.q3,
                        "whisker_low": b.whisker_low,
                        "whisker_high": b.whisker_high,
                        "outliers": list(b.outliers),
                        "n": b.n,
                    }
                    for kind, b in entry.items()
                }
                for level, entry in factor_boxplots(d, metric, factor, bins=bins).items()
            }
        except RelateKitError as exc:
            grid[factor] = {"factor": factor, "error": str(exc)}
    return grid, boxes


def run_all(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metric = MetricKind(cfg.metric)
    report: dict = {"seed": cfg.seed, "metric": metric.value}

    with _stage("ingest"):
        d = load_dataset(cfg.root)
        report["dataset"] = {
            m.value: {
                s.value: vars(dataset_stats(d, m, s)) for s in Split
            }
            for m in MetricKind
        }

    with _stage("screen"):
        train_part = d.restrict(metric=None, split=Split.TRAIN)
        test_part = d.restrict(metric=None, split=Split.TEST)
        kept_train, excl_train = screen(train_part, metric, POLICIES["train"])
        kept_test, excl_test = screen(test_part, metric, POLICIES["test"])
        screen_dir = out / "screened"
        save_dataset(kept_train, screen_dir / "train")
        save_dataset(kept_test, screen_dir / "test")
        for name, excl in (("train", excl_train), ("test", excl_test)):
            with open(screen_dir / name / "exclusions.jsonl", "w", encoding="utf-8") as fh:
                for e in excl:
                    fh.write(
                        json.dumps(
                            {"listener_id": e.listener_id, "reason": e.reason, "value": e.value},
                            sort_keys=True,
                        )
                        + "\n"
                    )
        report["screening"] = {
            "train_excluded": len(excl_train),
            "test_excluded": len(excl_test),
        }

    with _stage("textfeat"):
        with open(out / "text_features.jsonl", "w", encoding="utf-8") as fh:
            for pid in sorted(d.pairs):
                feats = text_features(d.pairs[pid].text)
                fh.write(
                    json.dumps(
                        {
                            "pair_id": pid,
                            "word_count": feats.word_count,
                            "temporal": feats.has_temporal_preposition,
                            "flesch": feats.flesch_reading_ease,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )

    with _stage("analyze"):
        kept_analysis, _ = screen(d, metric, POLICIES["analysis"])
        grid, boxes = analyze_factors(kept_analysis, metric, ALL_FACTORS, cfg.alpha, cfg.bins)
        _write_json(out / "factor_report.json", {"alpha": cfg.alpha, "factors": grid})
        _write_json(out / "boxplots.json", {"factors": boxes})
        report["factors_significant"] = {
            f: {
                "among_items": rep.get("among_items_significant"),
                "interaction": rep.get("interaction_significant"),
            }
            for f, rep in grid.items()
            if "error" not in rep
        }

    with _stage("split"):
        validation, test = split_validation_test(kept_test.restrict(metric=metric), cfg.seed)
        report["split"] = {
            "validation": vars(dataset_stats(validation, metric, Split.TEST)),
            "test": vars(dataset_stats(test, metric, Split.TEST)),
        }

    with _stage("train"):
        if not cfg.features_dir or not Path(cfg.features_dir).is_dir():
            raise DataError(f"features directory not found: {cfg.features_dir!r}")
        model_cfg = ModelConfig(F=1, D=1)
        train_cfg = TrainConfig()
        build_model_config(model_cfg, cfg.model_config or None, cfg.model_overrides)
        build_train_config(train_cfg, cfg.train_config or None, cfg.train_overrides)
        model_cfg.seed = cfg.seed  # the pipeline seed governs every stochastic stage

        train_records = kept_train.restrict(metric=metric)
        needed = {r.pair_id for r in train_records.records}
        needed |= {r.pair_id for r in validation.records}
        needed |= {r.pair_id for r in test.records}
        features = load_features(cfg.features_dir, needed)
        model_cfg.F, model_cfg.D = check_feature_dims(features)
        best_params, history = train(
            train_records, validation, features, model_cfg, train_cfg, metric
        )
        save_checkpoint(out / "checkpoint.rkpt", model_cfg, best_params)
        _write_json(out / "history.json", {"history": history})
        best = max(
            (h["val_srcc"] for h in history if h["val_srcc"] is not None), default=None
        )
        report["training"] = {
            "opt_steps": history[-1]["opt_step"] if history else 0,
            "best_val_srcc": best,
        }

    with _stage("predict"):
        ck_cfg, ck_params = load_checkpoint(out / "checkpoint.rkpt")
        test_pairs = sorted({r.pair_id for r in test.records})
        scores = predict_pairs(ck_params, ck_cfg, features, test_pairs)
        write_predictions(out / "predictions.jsonl", scores)

    with _stage("evaluate"):
        model_eval = evaluate_predictions(test, metric, scores)
        _write_json(out / "report_model.json", model_eval)
        report["model"] = model_eval

    if cfg.emb_audio_dir and cfg.emb_text_dir:
        with _stage("clapscore"):
            truth = normalized_pair_truth(test, metric)
            base_scores, missing = clapscore.score_pairs(
                cfg.emb_audio_dir, cfg.emb_text_dir, sorted(truth)
            )
            write_predictions(out / "baseline_predictions.jsonl", base_scores)
            baseline_eval = evaluate_predictions(test, metric, base_scores)
            baseline_eval["pairs_missing_embedding"] = len(missing)
            report["baseline"] = baseline_eval

    _write_json(out / "report.json", report)
    return report
