"""Listener exclusion pipelines.

Two screens exist in practice: the one applied while assembling train/test
data (anchor check only, with a stricter threshold on the test side), and the
analysis screen which additionally drops listeners who rated genuine
recordings low across the board and the least-varied 5% of raters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .dataset import Dataset, MetricKind, Origin
from .errors import DataError


@dataclass(frozen=True)
class ScreeningPolicy:
    """Thresholds for the up-to-three exclusion stages.

    anchor_mean_exclude_at: listeners whose mean anchor rating is at or above
        this are dropped (2.0 for training data, 1.0 for test data).
    original_mean_exclude_at_or_below: if set, listeners whose mean rating of
        genuine (non-anchor, original-origin) pairs is at or below this are
        dropped.
    entropy_drop_fraction: if set, the floor(fraction * L) remaining listeners
        with the lowest rating entropy are dropped.
    """

    anchor_mean_exclude_at: float
    original_mean_exclude_at_or_below: float | None = None
    entropy_drop_fraction: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.anchor_mean_exclude_at <= 10.0:
            raise ValueError("anchor threshold must be within the 0..10 scale")
        if self.original_mean_exclude_at_or_below is not None:
            if not 0.0 <= self.original_mean_exclude_at_or_below <= 10.0:
                raise ValueError("original-mean threshold must be within the 0..10 scale")
        if self.entropy_drop_fraction is not None:
            if not 0.0 <= self.entropy_drop_fraction < 1.0:
                raise ValueError("entropy drop fraction must be in [0, 1)")


TRAIN_POLICY = ScreeningPolicy(anchor_mean_exclude_at=2.0)
TEST_POLICY = ScreeningPolicy(anchor_mean_exclude_at=1.0)
ANALYSIS_POLICY = ScreeningPolicy(
    anchor_mean_exclude_at=2.0,
    original_mean_exclude_at_or_below=6.0,
    entropy_drop_fraction=0.05,
)

POLICIES = {"train": TRAIN_POLICY, "test": TEST_POLICY, "analysis": ANALYSIS_POLICY}


@dataclass(frozen=True)
class Exclusion:
    listener_id: str
    reason: str  # "anchor_mean" | "original_mean" | "low_entropy"
    value: float


def anchor_mean(d: Dataset, metric: MetricKind, listener_id: str) -> float | None:
    """Mean of a listener's ratings on anchor pairs, or None if they rated none."""
    scores = [
        r.score
        for r in d.records
        if r.listener_id == listener_id and r.metric is metric and d.pairs[r.pair_id].is_anchor
    ]
    if not scores:
        return None
    return sum(scores) / len(scores)


def rating_entropy(d: Dataset, metric: MetricKind, listener_id: str) -> float:
    """Shannon entropy (nats) of a listener's empirical score distribution.

    Ranges from 0 (always the same score) to ln 11 (uniform over the scale).
    """
    counts = [0] * 11
    total = 0
    for r in d.records:
        if r.listener_id == listener_id and r.metric is metric:
            counts[r.score] += 1
            total += 1
    if total == 0:
        raise DataError(f"listener '{listener_id}' has no {metric.value} ratings")
    ent = 0.0
    for c in counts:
        if c:
            p = c / total
            ent -= p * math.log(p)
    return max(ent, 0.0)


def _per_listener_scores(d: Dataset, metric: MetricKind):
    anchor: dict[str, list[int]] = {}
    original: dict[str, list[int]] = {}
    rated: set[str] = set()
    for r in d.records:
        if r.metric is not metric:
            continue
        rated.add(r.listener_id)
        pair = d.pairs[r.pair_id]
        if pair.is_anchor:
            anchor.setdefault(r.listener_id, []).append(r.score)
        elif pair.origin is Origin.ORIGINAL:
            original.setdefault(r.listener_id, []).append(r.score)
    return rated, anchor, original


def screen(
    d: Dataset, metric: MetricKind, policy: ScreeningPolicy
) -> tuple[Dataset, list[Exclusion]]:
    """Apply the staged listener screen for one metric.

    Stages run in order: anchor mean, original-pair mean, lowest-entropy cut.
    Every excluded listener loses all of their records (any metric), and anchor
    records are dropped from the kept dataset outright since anchors exist only
    to catch inattentive raters. Entropy ties break on listener id so the cut
    is deterministic.
    """
    rated, anchor_scores, original_scores = _per_listener_scores(d, metric)
    excluded: list[Exclusion] = []
    out: set[str] = set()

    for lid in sorted(rated):
        scores = anchor_scores.get(lid)
        if scores:
            m = sum(scores) / len(scores)
            if m >= policy.anchor_mean_exclude_at:
                excluded.append(Exclusion(lid, "anchor_mean", m))
                out.add(lid)

    if policy.original_mean_exclude_at_or_below is not None:
        for lid in sorted(rated - out):
            scores = original_scores.get(lid)
            if scores:
                m = sum(scores) / len(scores)
                if m <= policy.original_mean_exclude_at_or_below:
                    excluded.append(Exclusion(lid, "original_mean", m))
                    out.add(lid)

    if policy.entropy_drop_fraction is not None:
        survivors = sorted(rated - out)
        n_drop = math.floor(policy.entropy_drop_fraction * len(survivors))
        if n_drop:
            ranked = sorted(
                survivors, key=lambda lid: (rating_entropy(d, metric, lid), lid)
            )
            for lid in ranked[:n_drop]:
                excluded.append(Exclusion(lid, "low_entropy", rating_entropy(d, metric, lid)))
                out.add(lid)

    kept_records = tuple(
        r
        for r in d.records
        if r.listener_id not in out and not d.pairs[r.pair_id].is_anchor
    )
    kept_listeners = {lid: prof for lid, prof in d.listeners.items() if lid not in out}
    kept = replace(d, listeners=kept_listeners, records=kept_records)
    return kept, excluded
