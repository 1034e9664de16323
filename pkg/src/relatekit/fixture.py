"""Deterministic synthetic fixture: a desk-scale dataset with planted effects.

The generator fabricates caption groups (one genuine recording plus two
synthesized versions sharing the caption), anchor pairs with mismatched
labels, listeners with known biases (including deliberately bad raters for
the screening stages), 0..10 ratings driven by a declared ground-truth
relevance function, and RFB1 feature/embedding files whose contents carry a
recoverable signal about that relevance. A manifest records every planted
effect so tests can assert against it.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .dataset import TopCategory
from .features import write_feature
from .text import has_temporal_preposition, word_count
from .util import worker_count

# (event label, caption phrase, top category)
ATOMS = [
    ("dog_bark", "a dog barking", TopCategory.ANIMAL),
    ("cat_meow", "a cat meowing", TopCategory.ANIMAL),
    ("bird_chirp", "birds chirping", TopCategory.ANIMAL),
    ("horse_trot", "a horse trotting", TopCategory.ANIMAL),
    ("speech_man", "a man speaking", TopCategory.SPEECH),
    ("speech_woman", "a woman talking calmly", TopCategory.SPEECH),
    ("crowd_cheer", "a crowd cheering", TopCategory.HUMAN_SOUNDS),
    ("laughter", "people laughing", TopCategory.HUMAN_SOUNDS),
    ("footsteps", "footsteps on a wooden floor", TopCategory.HUMAN_SOUNDS),
    ("thunder", "thunder rumbling", TopCategory.NATURAL_SOUNDS),
    ("rain", "rain falling steadily", TopCategory.NATURAL_SOUNDS),
    ("wind", "wind blowing through trees", TopCategory.NATURAL_SOUNDS),
    ("guitar", "a guitar strumming", TopCategory.MUSIC),
    ("piano", "a piano melody playing", TopCategory.MUSIC),
    ("drums", "drums beating fast", TopCategory.MUSIC),
    ("engine", "an engine idling", TopCategory.SOUNDS_OF_THINGS),
    ("door_creak", "a door creaking open", TopCategory.SOUNDS_OF_THINGS),
    ("siren", "a siren wailing", TopCategory.SOUNDS_OF_THINGS),
    ("hum", "a low hum droning", TopCategory.SOURCE_AMBIGUOUS_SOUNDS),
    ("buzz", "something buzzing faintly", TopCategory.SOURCE_AMBIGUOUS_SOUNDS),
    ("static", "static noise hissing", TopCategory.CHANNEL_ENVIRONMENT_BACKGROUND),
    ("room_tone", "a quiet room recording", TopCategory.CHANNEL_ENVIRONMENT_BACKGROUND),
]

TEMPORAL_JOINERS = ("{0} then {1}", "{0} followed by {1}", "{0} before {1}", "{1} after {0}")
PLAIN_JOINERS = ("{0} and {1}", "{0} with {1} in the background", "{0} while {1}")
SYNTH_ORIGINS = ("audioldm", "audioldm2", "tango", "tango2")

ANIMAL_SYNTH_SHIFT = -3.0
TEMPORAL_SYNTH_SHIFT = -1.5
WORDS_SYNTH_SLOPE = -0.12


@dataclass
class FixtureSpec:
    seed: int = 7
    train_captions: int = 130
    test_captions: int = 70
    listeners: int = 48
    bad_anchor_listeners: int = 4
    grumpy_listeners: int = 2
    flat_listeners: int = 2
    anchor_pairs_per_split: int = 12
    ratings_per_pair: int = 5
    anchor_ratings_per_listener: int = 2
    audio_dim: int = 8
    text_dim: int = 6
    embedding_dim: int = 8
    embedding_noise_sd: float = 3.2
    score_noise_sd: float = 0.7


def _make_caption(rng: np.random.Generator):
    """One caption with 1-3 atoms, optionally joined by a temporal marker."""
    n_atoms = int(rng.integers(1, 4))
    picks = rng.choice(len(ATOMS), size=n_atoms, replace=False)
    atoms = [ATOMS[i] for i in picks]
    if n_atoms == 1:
        text = atoms[0][1]
    else:
        joiners = TEMPORAL_JOINERS if rng.random() < 0.5 else PLAIN_JOINERS
        text = joiners[rng.integers(0, len(joiners))].format(atoms[0][1], atoms[1][1])
        for extra in atoms[2:]:
            text = f"{text} and {extra[1]}"
    labels = tuple(a[0] for a in atoms)
    cats = sorted({a[2].value for a in atoms})
    return text, labels, cats


def _true_relevance(rng, origin: str, cats: list[str], text: str) -> float:
    temporal = has_temporal_preposition(text)
    if origin == "original":
        r = 8.0 + 1.5 * rng.random()
    else:
        r = 2.0 + 7.0 * rng.random()
        if TopCategory.ANIMAL.value in cats:
            r += ANIMAL_SYNTH_SHIFT
        if temporal:
            r += TEMPORAL_SYNTH_SHIFT
        r += WORDS_SYNTH_SLOPE * (word_count(text) - 6)
    return float(np.clip(r, 0.0, 10.0))


def generate_fixture(spec: FixtureSpec, out_dir: str | Path) -> dict:
    """Write dataset, features, embeddings, and manifest; returns the manifest."""
    out = Path(out_dir)
    rng = np.random.default_rng(spec.seed)

    # --- listeners -------------------------------------------------------
    n_total = (
        spec.listeners + spec.bad_anchor_listeners + spec.grumpy_listeners + spec.flat_listeners
    )
    listener_ids = [f"L{i:03d}" for i in range(n_total)]
    bad_anchor = set(listener_ids[spec.listeners : spec.listeners + spec.bad_anchor_listeners])
    grumpy_start = spec.listeners + spec.bad_anchor_listeners
    grumpy = set(listener_ids[grumpy_start : grumpy_start + spec.grumpy_listeners])
    flat = set(listener_ids[grumpy_start + spec.grumpy_listeners :])
    bias = {}
    for lid in listener_ids:
        if lid in grumpy:
            bias[lid] = -4.5
        else:
            bias[lid] = float(np.clip(rng.normal(0.0, 0.9), -2.0, 2.0))

    def profile(lid: str) -> dict:
        row = {"listener_id": lid}
        row.update(
            {
                "q01": ("le20", "21-30", "31-40", "41-50")[rng.integers(0, 4)],
                "q02": ("m", "f", "nbi")[rng.integers(0, 3)],
                "q03": str(rng.integers(0, 5)),
                "q04": ("never", "le1m", "le6m")[rng.integers(0, 3)],
                "q05": str(rng.integers(1, 5)),
                "q06": ("headphone", "earphone")[rng.integers(0, 2)],
                "q07": ("quiet", "mostly_quiet")[rng.integers(0, 2)],
                "q08": ("easy", "moderate", "difficult")[rng.integers(0, 3)],
                "q09": ("yes", "no")[rng.integers(0, 2)],
                "q10": "eu",
                "q11": "eu",
                "q12": ("eu", "na", "as")[rng.integers(0, 3)],
            }
        )
        return row

    profiles = [profile(lid) for lid in listener_ids]

    # --- pairs -----------------------------------------------------------
    pairs: list[dict] = []
    relevance: dict[str, float] = {}

    def add_caption_group(split: str, idx: int) -> None:
        text, labels, cats = _make_caption(rng)
        duration = round(8.0 + 4.0 * rng.random(), 1)
        synths = rng.choice(len(SYNTH_ORIGINS), size=2, replace=False)
        origins = ["original"] + [SYNTH_ORIGINS[i] for i in synths]
        for k, origin in enumerate(origins):
            pid = f"{split}_{idx:04d}_{k}"
            audio = (
                f"audio/{split}_{idx:04d}_orig.wav"
                if origin == "original"
                else f"audio/{split}_{idx:04d}_{origin}.wav"
            )
            pairs.append(
                {
                    "pair_id": pid,
                    "text": text,
                    "audio_ref": audio,
                    "origin": origin,
                    "event_labels": list(labels),
                    "top_categories": cats,
                    "is_anchor": False,
                    "duration_s": duration,
                    "split": split,
                }
            )
            relevance[pid] = _true_relevance(rng, origin, cats, text)

    for i in range(spec.train_captions):
        add_caption_group("train", i)
    for i in range(spec.test_captions):
        add_caption_group("test", i)

    def add_anchor(split: str, idx: int) -> None:
        a, b = rng.choice(len(ATOMS), size=2, replace=False)
        pid = f"{split}_anchor_{idx:03d}"
        pairs.append(
            {
                "pair_id": pid,
                "text": ATOMS[a][1],
                "audio_ref": f"audio/{pid}.wav",
                "origin": "original",
                "event_labels": [ATOMS[b][0]],
                "top_categories": [ATOMS[b][2].value],
                "is_anchor": True,
                "duration_s": round(8.0 + 4.0 * rng.random(), 1),
                "split": split,
            }
        )
        relevance[pid] = 0.5

    for i in range(spec.anchor_pairs_per_split):
        add_anchor("train", i)
        add_anchor("test", i)

    # --- ratings ---------------------------------------------------------
    records: list[dict] = []

    def rate(lid: str, pair: dict) -> int:
        if pair["is_anchor"]:
            if lid in bad_anchor:
                return int(rng.integers(5, 11))
            if lid in flat:
                return 0
            return int(rng.choice([0, 1], p=[0.85, 0.15]))
        if lid in flat:
            # Passes the anchor and original-mean screens but rates with almost
            # no variety, so the entropy cut is what catches them.
            return 8 if pair["origin"] == "original" else 5
        raw = relevance[pair["pair_id"]] + bias[lid] + rng.normal(0.0, spec.score_noise_sd)
        return int(np.clip(round(raw), 0, 10))

    lid_arr = np.array(listener_ids)
    for pair in pairs:
        if pair["is_anchor"]:
            continue
        raters = rng.choice(lid_arr, size=spec.ratings_per_pair, replace=False)
        for lid in raters:
            records.append(
                {
                    "listener_id": str(lid),
                    "pair_id": pair["pair_id"],
                    "metric": "REL",
                    "score": rate(str(lid), pair),
                    "split": pair["split"],
                }
            )

    anchors_by_split = {
        s: [p for p in pairs if p["is_anchor"] and p["split"] == s] for s in ("train", "test")
    }
    for lid in listener_ids:
        for split in ("train", "test"):
            picks = rng.choice(
                len(anchors_by_split[split]), size=spec.anchor_ratings_per_listener, replace=False
            )
            for k in picks:
                pair = anchors_by_split[split][int(k)]
                records.append(
                    {
                        "listener_id": lid,
                        "pair_id": pair["pair_id"],
                        "metric": "REL",
                        "score": rate(lid, pair),
                        "split": split,
                    }
                )

    # Secondary metrics on subsets, so multi-metric code paths have data.
    for pair in pairs:
        if pair["is_anchor"]:
            continue
        temporal = has_temporal_preposition(pair["text"])
        gen_is = rng.random() < 0.3
        if not (gen_is or temporal):
            continue
        raters = rng.choice(lid_arr, size=3, replace=False)
        for lid in raters:
            for metric, wanted in (("IS", gen_is), ("OS", temporal)):
                if wanted:
                    records.append(
                        {
                            "listener_id": str(lid),
                            "pair_id": pair["pair_id"],
                            "metric": metric,
                            "score": rate(str(lid), pair),
                            "split": pair["split"],
                        }
                    )

    # --- features and embeddings ------------------------------------------
    feature_arrays: dict[Path, np.ndarray] = {}
    for pair in pairs:
        pid = pair["pair_id"]
        r = relevance[pid]
        t_len = int(rng.integers(8, 15))
        v = rng.normal(0.0, 1.0, (spec.audio_dim, t_len))
        v[0, :] = r / 10.0 + rng.normal(0.0, 0.05, t_len)
        v[1, :] = (1.0 if pair["origin"] == "original" else 0.0) + rng.normal(0.0, 0.05, t_len)
        o = rng.normal(0.0, 1.0, spec.text_dim)
        o[0] = word_count(pair["text"]) / 12.0
        o[1] = 1.0 if has_temporal_preposition(pair["text"]) else 0.0
        feature_arrays[Path("features/audio") / f"{pid}.rfb"] = v.astype(np.float32)
        feature_arrays[Path("features/text") / f"{pid}.rfb"] = o.astype(np.float32)

        # Embeddings: text direction is a random unit vector, audio sits at a
        # controlled cosine so the baseline tracks relevance only noisily.
        u = rng.normal(0.0, 1.0, spec.embedding_dim)
        u /= np.linalg.norm(u)
        w = rng.normal(0.0, 1.0, spec.embedding_dim)
        w -= u * np.dot(u, w)
        w /= np.linalg.norm(w)
        c = float(
            np.clip((r + rng.normal(0.0, spec.embedding_noise_sd)) / 5.0 - 1.0, -0.999, 0.999)
        )
        audio_emb = c * u + np.sqrt(1.0 - c * c) * w
        feature_arrays[Path("embeddings/text") / f"{pid}.rfb"] = u.astype(np.float32)
        feature_arrays[Path("embeddings/audio") / f"{pid}.rfb"] = audio_emb.astype(np.float32)

    for sub in ("features/audio", "features/text", "embeddings/audio", "embeddings/text"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        list(pool.map(lambda kv: write_feature(out / kv[0], kv[1]), feature_arrays.items()))

    # --- dataset files -----------------------------------------------------
    ds_dir = out / "dataset"
    ds_dir.mkdir(parents=True, exist_ok=True)
    with open(ds_dir / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for pair in pairs:
            row = {k: v for k, v in pair.items() if k != "split"}
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(ds_dir / "listeners.jsonl", "w", encoding="utf-8") as fh:
        for row in profiles:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(ds_dir / "evaluations.jsonl", "w", encoding="utf-8") as fh:
        for row in records:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    per_metric = {}
    for metric in ("REL", "IS", "OS"):
        per_metric[metric] = {
            split: sum(1 for r in records if r["metric"] == metric and r["split"] == split)
            for split in ("train", "test")
        }
    manifest = {
        "schema_version": 1,
        "spec": asdict(spec),
        "counts": {
            "pairs": len(pairs),
            "anchor_pairs": 2 * spec.anchor_pairs_per_split,
            "listeners": n_total,
            "records": per_metric,
        },
        "planted": {
            "animal_synthetic_shift": ANIMAL_SYNTH_SHIFT,
            "temporal_synthetic_shift": TEMPORAL_SYNTH_SHIFT,
            "word_count_synthetic_slope": WORDS_SYNTH_SLOPE,
            "bad_anchor_listeners": sorted(bad_anchor),
            "grumpy_listeners": sorted(grumpy),
            "flat_listeners": sorted(flat),
        },
        "features": {
            "F": spec.audio_dim,
            "D": spec.text_dim,
            "signal": "audio row 0 tracks true_relevance/10; row 1 flags original origin",
        },
        "embeddings": {"E": spec.embedding_dim, "noise_sd": spec.embedding_noise_sd},
        "true_relevance": {pid: round(r, 6) for pid, r in sorted(relevance.items())},
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
