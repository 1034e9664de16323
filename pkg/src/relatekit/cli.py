"""Unified command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .clapscore import score_pairs
from .config import build_model_config, build_train_config
from .dataset import MetricKind, Split, dataset_stats, load_dataset
from .errors import DataError, NumericError, RelateKitError
from .factors import ALL_FACTORS
from .fixture import FixtureSpec, generate_fixture
from .model.checkpoint import load_checkpoint, save_checkpoint
from .model.config import ModelConfig, TrainConfig
from .model.training import check_feature_dims, load_features, predict_pairs, train
from .pipeline import (
    PipelineConfig,
    analyze_factors,
    evaluate_predictions,
    read_predictions,
    run_all,
    write_predictions,
)
from .screening import POLICIES, screen
from .text import text_features


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _kv_pairs(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DataError(f"override must look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": 1, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_ingest(args) -> int:
    d = load_dataset(args.root)
    stats = {
        m.value: {s.value: vars(dataset_stats(d, m, s)) for s in Split} for m in MetricKind
    }
    payload = {
        "pairs": len(d.pairs),
        "listeners": len(d.listeners),
        "records": len(d.records),
        "stats": stats,
    }
    if args.out:
        _write_json(Path(args.out), payload)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def _cmd_screen(args) -> int:
    from .dataset import save_dataset

    d = load_dataset(args.root)
    kept, excluded = screen(d, MetricKind(args.metric), POLICIES[args.policy])
    out = Path(args.out)
    save_dataset(kept, out)
    with open(out / "exclusions.jsonl", "w", encoding="utf-8") as fh:
        for e in excluded:
            fh.write(
                json.dumps(
                    {"listener_id": e.listener_id, "reason": e.reason, "value": e.value},
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"kept {len(kept.records)} records; excluded {len(excluded)} listeners")
    return 0


def _cmd_textfeat(args) -> int:
    d = load_dataset(args.root)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
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
    return 0


def _cmd_analyze(args) -> int:
    d = load_dataset(args.root)
    metric = MetricKind(args.metric)
    if args.policy != "none":
        d, _ = screen(d, metric, POLICIES[args.policy])
    factors = ALL_FACTORS if args.factors == "all" else tuple(args.factors.split(","))
    grid, boxes = analyze_factors(d, metric, factors, args.alpha, args.bins)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "factor_report.json", {"alpha": args.alpha, "factors": grid})
    _write_json(out / "boxplots.json", {"factors": boxes})
    return 0


def _cmd_evaluate(args) -> int:
    d = load_dataset(args.root)
    scores = read_predictions(args.predictions)
    payload = evaluate_predictions(d, MetricKind(args.metric), scores)
    _write_json(Path(args.out), payload)
    return 0


def _cmd_clapscore(args) -> int:
    audio_dir = Path(args.audio_emb_dir)
    text_dir = Path(args.text_emb_dir)
    if not audio_dir.is_dir() or not text_dir.is_dir():
        raise DataError("embedding directories must exist")
    pair_ids = sorted(
        {p.stem for p in audio_dir.glob("*.rfb")} & {p.stem for p in text_dir.glob("*.rfb")}
    )
    if not pair_ids:
        raise DataError("no pair has embeddings in both directories")
    scores, _ = score_pairs(audio_dir, text_dir, pair_ids)
    write_predictions(Path(args.out), scores)
    return 0


def _cmd_train(args) -> int:
    overrides = _kv_pairs(args.override)
    model_cfg = build_model_config(ModelConfig(F=1, D=1), args.model_config, overrides)
    train_cfg = build_train_config(TrainConfig(), args.train_config, overrides)
    if args.seed is not None:
        model_cfg.seed = args.seed
    train_ds = load_dataset(args.train_root)
    val_ds = load_dataset(args.val_root)
    metric = MetricKind.REL  # the predictor targets relevance scores only
    needed = {r.pair_id for r in train_ds.records if r.metric is metric}
    needed |= {r.pair_id for r in val_ds.records if r.metric is metric}
    features = load_features(args.features_dir, needed)
    model_cfg.F, model_cfg.D = check_feature_dims(features)
    best_params, history = train(
        train_ds.restrict(metric=metric), val_ds.restrict(metric=metric),
        features, model_cfg, train_cfg, metric,
    )
    save_checkpoint(Path(args.out), model_cfg, best_params)
    best = max((h["val_srcc"] for h in history if h["val_srcc"] is not None), default=None)
    print(f"trained {history[-1]['opt_step']} optimizer steps; best validation SRCC {best}")
    return 0


def _cmd_predict(args) -> int:
    cfg, params = load_checkpoint(args.checkpoint)
    audio_dir = Path(args.features_dir) / "audio"
    text_dir = Path(args.features_dir) / "text"
    pair_ids = sorted(
        {p.stem for p in audio_dir.glob("*.rfb")} & {p.stem for p in text_dir.glob("*.rfb")}
    )
    if args.pairs:
        wanted = {line.strip() for line in Path(args.pairs).read_text().splitlines() if line.strip()}
        pair_ids = sorted(set(pair_ids) & wanted)
    if not pair_ids:
        raise DataError("no pairs to predict")
    features = load_features(args.features_dir, pair_ids)
    scores = predict_pairs(params, cfg, features, pair_ids)
    write_predictions(Path(args.out), scores)
    return 0


def _cmd_fixture(args) -> int:
    spec = FixtureSpec(
        seed=args.seed,
        train_captions=args.train_captions,
        test_captions=args.test_captions,
        listeners=args.listeners,
    )
    manifest = generate_fixture(spec, args.out)
    print(
        f"fixture: {manifest['counts']['pairs']} pairs, "
        f"{manifest['counts']['listeners']} listeners -> {args.out}"
    )
    return 0


def _cmd_run_all(args) -> int:
    overrides = _kv_pairs(args.override)
    cfg = PipelineConfig()
    if args.config:
        from .config import apply_fields, parse_kv_file

        apply_fields(cfg, parse_kv_file(args.config), context=args.config)
    cli_values = {
        "root": args.root,
        "features_dir": args.features_dir,
        "out_dir": args.out,
        "emb_audio_dir": args.emb_audio_dir,
        "emb_text_dir": args.emb_text_dir,
    }
    for key, val in cli_values.items():
        if val:
            setattr(cfg, key, val)
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.model_overrides = overrides
    cfg.train_overrides = overrides
    if not cfg.root or not cfg.out_dir:
        raise DataError("run-all needs a dataset root and an output directory")
    report = run_all(cfg)
    srcc = report.get("model", {}).get("metrics", {}).get("srcc")
    print(f"run-all complete; model SRCC on held-out test: {srcc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relatekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a dataset, print statistics")
    p.add_argument("--root", required=True)
    p.add_argument("--out", default="")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("screen", help="apply a listener screening policy")
    p.add_argument("--root", required=True)
    p.add_argument("--metric", default="REL", choices=[m.value for m in MetricKind])
    p.add_argument("--policy", default="train", choices=sorted(POLICIES))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("textfeat", help="emit text-complexity features per pair")
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_textfeat)

    p = sub.add_parser("analyze", help="run the factor-analysis battery")
    p.add_argument("--root", required=True)
    p.add_argument("--metric", default="REL", choices=[m.value for m in MetricKind])
    p.add_argument("--policy", default="analysis", choices=[*sorted(POLICIES), "none"])
    p.add_argument("--factors", default="all")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--bins", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("evaluate", help="score predictions against the dataset")
    p.add_argument("--root", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--metric", default="REL", choices=[m.value for m in MetricKind])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("clapscore", help="cosine-similarity baseline from embeddings")
    p.add_argument("--audio-emb-dir", required=True)
    p.add_argument("--text-emb-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_clapscore)

    p = sub.add_parser("train", help="train the relevance score predictor")
    p.add_argument("--train-root", required=True)
    p.add_argument("--val-root", required=True)
    p.add_argument("--features-dir", required=True)
    p.add_argument("--model-config", default=None)
    p.add_argument("--train-config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict scores with a trained checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--features-dir", required=True)
    p.add_argument("--pairs", default=None, help="optional file of pair ids, one per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("fixture", help="generate the synthetic benchmark fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--train-captions", type=int, default=130)
    p.add_argument("--test-captions", type=int, default=70)
    p.add_argument("--listeners", type=int, default=48)
    p.set_defaults(func=_cmd_fixture)

    p = sub.add_parser("run-all", help="execute the full pipeline")
    p.add_argument("--config", default=None)
    p.add_argument("--root", default="")
    p.add_argument("--features-dir", default="")
    p.add_argument("--emb-audio-dir", default="")
    p.add_argument("--emb-text-dir", default="")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default="")
    p.set_defaults(func=_cmd_run_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except RelateKitError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
