"""Deterministic training loop: length-bucketed batches, gradient
accumulation, warmup/decay Adam, and checkpoint selection by validation
rank correlation.

Raw 0..10 scores map to the normalized [-1, 1] training scale via y/5 - 1.
Besides one example per individual rating, every pair contributes an
average-listener example (embedding row 0) whose target is the pair's mean
score; inference always predicts as the average listener.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dataset import Dataset, MetricKind, mean_score_per_pair
from ..errors import DataError
from ..features import read_bundle
from ..metrics import spearman
from .config import ModelConfig, TrainConfig
from .losses import cbl_weight, class_of
from .network import batch_loss_and_grads, forward, init_params, zero_grads
from .optim import adam_step, init_adam, lr_at

AVERAGE_LISTENER = 0


def normalize_score(y: float) -> float:
    return y / 5.0 - 1.0


def denormalize_score(v: float) -> float:
    return 5.0 * (v + 1.0)


@dataclass(frozen=True)
class TrainingExample:
    pair_id: str
    listener_idx: int
    y_raw: float
    y_norm: float
    weight: float
    t_len: int


FeatureMap = dict[str, tuple[np.ndarray, np.ndarray]]


def load_features(features_dir: str | Path, pair_ids) -> FeatureMap:
    """Load (audio, text) arrays for each pair, widened to float64."""
    out: FeatureMap = {}
    for pid in sorted(set(pair_ids)):
        try:
            bundle = read_bundle(features_dir, pid)
        except FileNotFoundError:
            raise DataError(f"missing feature files for pair '{pid}'") from None
        out[pid] = (bundle.audio.astype(float), bundle.text.astype(float))
    return out


def check_feature_dims(features: FeatureMap) -> tuple[int, int]:
    """All audio matrices must share F and all text vectors share D."""
    dims_f = {v.shape[0] for v, _ in features.values()}
    dims_d = {o.shape[0] for _, o in features.values()}
    if len(dims_f) != 1 or len(dims_d) != 1:
        raise DataError(f"inconsistent feature dims: F={sorted(dims_f)}, D={sorted(dims_d)}")
    return dims_f.pop(), dims_d.pop()


def build_training_examples(
    d: Dataset, metric: MetricKind, features: FeatureMap, beta_cbl: float
) -> tuple[list[TrainingExample], dict[str, int]]:
    """Per-rating examples plus one average-listener example per pair.

    Returns the examples (with class-balance weights already attached) and
    the listener-id -> embedding-row map (rows 1..L; row 0 is reserved).
    """
    records = [r for r in d.records if r.metric is metric]
    if not records:
        raise DataError(f"no {metric.value} records to train on")
    listener_ids = sorted({r.listener_id for r in records})
    listener_index = {lid: i + 1 for i, lid in enumerate(listener_ids)}

    raw: list[tuple[str, int, float]] = []
    for r in records:
        raw.append((r.pair_id, listener_index[r.listener_id], float(r.score)))
    for pid, mean in sorted(mean_score_per_pair(d, metric).items()):
        raw.append((pid, AVERAGE_LISTENER, mean))

    counts: dict[int, int] = {}
    for _, _, y in raw:
        cls = class_of(y)
        counts[cls] = counts.get(cls, 0) + 1

    examples = []
    for pid, idx, y in raw:
        if pid not in features:
            raise DataError(f"missing features for pair '{pid}'")
        examples.append(
            TrainingExample(
                pair_id=pid,
                listener_idx=idx,
                y_raw=y,
                y_norm=normalize_score(y),
                weight=cbl_weight(counts[class_of(y)], beta_cbl),
                t_len=features[pid][0].shape[1],
            )
        )
    return examples, listener_index


def _batch_stream(rng: np.random.Generator, examples: list[TrainingExample], batch_size: int):
    """Endless deterministic stream of length-homogeneous batches."""
    buckets: dict[int, list[int]] = {}
    for i, ex in enumerate(examples):
        buckets.setdefault(ex.t_len, []).append(i)
    while True:
        epoch: list[np.ndarray] = []
        for t_len in sorted(buckets):
            idxs = np.array(buckets[t_len])
            rng.shuffle(idxs)
            for s in range(0, len(idxs), batch_size):
                epoch.append(idxs[s : s + batch_size])
        for bi in rng.permutation(len(epoch)):
            yield epoch[bi]


def predict(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    audio: np.ndarray,
    text: np.ndarray,
    listener_idx: int = AVERAGE_LISTENER,
) -> float:
    """Normalized score for one pair, clamped to [-1, 1] for reporting."""
    y_hat, _ = forward(params, cfg, audio, text, listener_idx)
    return float(np.clip(y_hat, -1.0, 1.0))


def predict_pairs(
    params: dict[str, np.ndarray], cfg: ModelConfig, features: FeatureMap, pair_ids
) -> dict[str, float]:
    out = {}
    for pid in sorted(pair_ids):
        if pid not in features:
            raise DataError(f"missing features for pair '{pid}'")
        v, o = features[pid]
        out[pid] = predict(params, cfg, v, o)
    return out


def _validation_srcc(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    features: FeatureMap,
    val_truth: dict[str, float],
) -> float | None:
    pids = sorted(val_truth)
    preds = [predict(params, cfg, *features[pid]) for pid in pids]
    return spearman(np.array(preds), np.array([val_truth[p] for p in pids]))


def train(
    train_set: Dataset,
    validation_set: Dataset,
    features: FeatureMap,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    metric: MetricKind = MetricKind.REL,
) -> tuple[dict[str, np.ndarray], list[dict]]:
    """Optimize the predictor; returns the best-validation checkpoint and history.

    Fully deterministic for a fixed seed: batch order, initialization, and all
    reductions are fixed-order numpy operations.
    """
    train_cfg.validate()
    examples, listener_index = build_training_examples(
        train_set, metric, features, train_cfg.beta_cbl
    )
    if model_cfg.num_listeners is None:
        model_cfg.num_listeners = len(listener_index)
    elif model_cfg.num_listeners != len(listener_index):
        raise DataError(
            f"model expects {model_cfg.num_listeners} listeners, "
            f"training data has {len(listener_index)}"
        )
    model_cfg.validate()

    val_means = mean_score_per_pair(validation_set, metric)
    if not val_means:
        raise DataError("validation set has no records for the metric")
    val_truth = {pid: normalize_score(m) for pid, m in val_means.items()}
    for pid in val_truth:
        if pid not in features:
            raise DataError(f"missing features for validation pair '{pid}'")

    params = init_params(model_cfg)
    adam = init_adam(params)
    rng = np.random.default_rng(model_cfg.seed)
    batches = _batch_stream(rng, examples, train_cfg.batch_size)

    acc = zero_grads(params)
    acc_count = 0
    opt_step = 0
    best_srcc: float | None = None
    best_params = {k: v.copy() for k, v in params.items()}
    history: list[dict] = []

    def run_validation():
        nonlocal best_srcc, best_params
        srcc = _validation_srcc(params, model_cfg, features, val_truth)
        history.append({"opt_step": opt_step, "val_srcc": srcc})
        if srcc is not None and (best_srcc is None or srcc > best_srcc):
            best_srcc = srcc
            best_params = {k: v.copy() for k, v in params.items()}

    def apply_pending(step: int):
        nonlocal acc, acc_count, opt_step
        for name in acc:
            acc[name] /= acc_count
        adam_step(params, acc, adam, lr_at(step, train_cfg), train_cfg)
        acc = zero_grads(params)
        acc_count = 0
        opt_step += 1
        if opt_step % train_cfg.eval_every == 0:
            run_validation()

    for micro_step in range(1, train_cfg.total_steps + 1):
        idxs = next(batches)
        batch = [examples[i] for i in idxs]
        _, grads, _ = batch_loss_and_grads(
            params,
            model_cfg,
            train_cfg,
            [features[ex.pair_id][0] for ex in batch],
            [features[ex.pair_id][1] for ex in batch],
            np.array([ex.listener_idx for ex in batch]),
            np.array([ex.y_norm for ex in batch]),
            np.array([ex.weight for ex in batch]),
        )
        for name in acc:
            acc[name] += grads[name]
        acc_count += 1
        if acc_count == train_cfg.accum_every:
            apply_pending(micro_step)

    if acc_count:
        apply_pending(train_cfg.total_steps)
    if not history or history[-1]["opt_step"] != opt_step:
        run_validation()

    return best_params, history
