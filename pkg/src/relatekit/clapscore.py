"""Cosine-similarity baseline over precomputed audio/text embedding pairs.

The embedding models themselves run out of process; this module only consumes
rank-1 RFB1 files named ``<pair_id>.rfb`` under separate audio and text
directories, so the benchmark stays free of pretrained-model dependencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericError
from .features import read_feature
from .metrics import MetricReport, evaluate


@dataclass(frozen=True)
class EmbeddingPair:
    audio_emb: np.ndarray
    text_emb: np.ndarray


def clap_score(e: EmbeddingPair) -> float:
    """Cosine similarity between the audio and text embeddings, in [-1, 1]."""
    a = np.asarray(e.audio_emb, dtype=float)
    t = np.asarray(e.text_emb, dtype=float)
    if a.ndim != 1 or t.ndim != 1:
        raise NumericError("embeddings must be rank-1 vectors")
    if a.shape != t.shape:
        raise NumericError(f"embedding length mismatch: {a.shape[0]} vs {t.shape[0]}")
    na = float(np.linalg.norm(a))
    nt = float(np.linalg.norm(t))
    if na == 0.0 or nt == 0.0:
        raise NumericError("zero-norm embedding has no direction to compare")
    return float(np.dot(a, t) / (na * nt))


def load_embedding_pair(audio_dir: str | Path, text_dir: str | Path, pair_id: str) -> EmbeddingPair:
    audio = read_feature(Path(audio_dir) / f"{pair_id}.rfb")
    text = read_feature(Path(text_dir) / f"{pair_id}.rfb")
    return EmbeddingPair(audio_emb=audio.astype(float), text_emb=text.astype(float))


def score_pairs(
    audio_dir: str | Path, text_dir: str | Path, pair_ids: list[str]
) -> tuple[dict[str, float], list[str]]:
    """Cosine score per pair; pairs missing either embedding file are skipped."""
    scores: dict[str, float] = {}
    missing: list[str] = []
    for pid in sorted(pair_ids):
        audio_path = Path(audio_dir) / f"{pid}.rfb"
        text_path = Path(text_dir) / f"{pid}.rfb"
        if not audio_path.is_file() or not text_path.is_file():
            missing.append(pid)
            continue
        scores[pid] = clap_score(load_embedding_pair(audio_dir, text_dir, pid))
    return scores, missing


def baseline_report(
    audio_dir: str | Path, text_dir: str | Path, truth: dict[str, float]
) -> tuple[MetricReport, list[str]]:
    """Evaluate the cosine baseline against normalized per-pair mean scores.

    ``truth`` maps pair_id to the normalized target in [-1, 1]. Returns the
    metric report over scored pairs plus the list of pairs skipped for
    missing embeddings.
    """
    scores, missing = score_pairs(audio_dir, text_dir, sorted(truth))
    scored = sorted(scores)
    pred = [scores[pid] for pid in scored]
    target = [truth[pid] for pid in scored]
    return evaluate(pred, target), missing
