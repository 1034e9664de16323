"""The whole benchmark in one call: ingest, screen, analyze, train, evaluate.

Equivalent to `relatekit run-all` with a config file; this script drives the
same pipeline from Python and pulls highlights out of the report.
"""

import tempfile
from pathlib import Path

from relatekit.fixture import FixtureSpec, generate_fixture
from relatekit.pipeline import PipelineConfig, run_all

work = Path(tempfile.mkdtemp(prefix="relatekit_demo_"))
fx = work / "fixture"
generate_fixture(FixtureSpec(seed=11, train_captions=50, test_captions=30), fx)

fast = {
    "C": "4", "H": "12", "H2": "12",
    "lr0": "0.001", "total_steps": "800", "warmup_steps": "200", "eval_every": "100",
}
report = run_all(
    PipelineConfig(
        root=str(fx / "dataset"),
        features_dir=str(fx / "features"),
        emb_audio_dir=str(fx / "embeddings" / "audio"),
        emb_text_dir=str(fx / "embeddings" / "text"),
        out_dir=str(work / "bundle"),
        seed=11,
        model_overrides=fast,
        train_overrides=fast,
    )
)

print(f"bundle written to {work / 'bundle'}\n")
print("significant factors (among items / interaction with origin):")
for factor, flags in report["factors_significant"].items():
    marks = f"{'x' if flags['among_items'] else '.'} / {'x' if flags['interaction'] else '.'}"
    print(f"  {factor:<45} {marks}")

print(f"\nbest validation SRCC: {report['training']['best_val_srcc']:.3f}")
print("held-out metrics:")
for side in ("model", "baseline"):
    if side in report:
        m = report[side]["metrics"]
        print(f"  {side:<9} MSE {m['mse']:.3f}  LCC {m['lcc']:.3f}  "
              f"SRCC {m['srcc']:.3f}  KTAU {m['ktau']:.3f}")

print("\nper-category SRCC (model):")
for cat, val in report["model"]["per_category_srcc"].items():
    shown = "n/a" if val is None else f"{val:.3f}"
    print(f"  {cat:<32} {shown}")
