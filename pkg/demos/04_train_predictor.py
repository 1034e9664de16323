"""Train the listener-aware score predictor on the synthetic fixture and
compare against the cosine-similarity baseline.

Takes about half a minute on a laptop CPU.
"""

import tempfile
from pathlib import Path

from relatekit.clapscore import score_pairs
from relatekit.dataset import MetricKind, Split, load_dataset, mean_score_per_pair, split_validation_test
from relatekit.fixture import FixtureSpec, generate_fixture
from relatekit.metrics import evaluate
from relatekit.model import ModelConfig, TrainConfig, train
from relatekit.model.training import load_features, normalize_score, predict_pairs
from relatekit.screening import POLICIES, screen

REL = MetricKind.REL
work = Path(tempfile.mkdtemp(prefix="relatekit_demo_"))
print(f"fixture -> {work}")
generate_fixture(FixtureSpec(seed=7, train_captions=80, test_captions=40), work)

d = load_dataset(work / "dataset")
kept_train, _ = screen(d.restrict(split=Split.TRAIN), REL, POLICIES["train"])
kept_test, _ = screen(d.restrict(split=Split.TEST), REL, POLICIES["test"])
validation, test = split_validation_test(kept_test.restrict(metric=REL), seed=7)
train_ds = kept_train.restrict(metric=REL)

needed = {r.pair_id for r in train_ds.records}
needed |= {r.pair_id for r in validation.records}
needed |= {r.pair_id for r in test.records}
features = load_features(work / "features", needed)

model_cfg = ModelConfig(F=8, D=6, C=4, H=16, H2=16, seed=7)
train_cfg = TrainConfig(lr0=1e-3, total_steps=1500, warmup_steps=400, eval_every=150)
print("training...")
best, history = train(train_ds, validation, features, model_cfg, train_cfg, REL)
for h in history:
    print(f"  opt step {h['opt_step']:5d}: validation SRCC = {h['val_srcc']:.3f}")

truth = {pid: normalize_score(m) for pid, m in mean_score_per_pair(test, REL).items()}
pids = sorted(truth)
preds = predict_pairs(best, model_cfg, features, pids)
model_report = evaluate([preds[p] for p in pids], [truth[p] for p in pids])

base_scores, _ = score_pairs(work / "embeddings" / "audio", work / "embeddings" / "text", pids)
base_report = evaluate([base_scores[p] for p in pids], [truth[p] for p in pids])

print(f"\nheld-out test ({len(pids)} pairs):")
print(f"  {'':<10} {'MSE':>7} {'LCC':>7} {'SRCC':>7} {'KTAU':>7}")
for name, rep in (("model", model_report), ("baseline", base_report)):
    print(f"  {name:<10} {rep.mse:7.3f} {rep.lcc:7.3f} {rep.srcc:7.3f} {rep.ktau:7.3f}")
