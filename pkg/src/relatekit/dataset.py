"""Domain types, JSONL ingestion, statistics, and the audio/text-disjoint split.

A dataset directory holds three JSONL files (one JSON object per line):

* ``pairs.jsonl``       -- text-audio pairs with origin, labels, and duration
* ``listeners.jsonl``   -- listener profiles with questionnaire answers q01..q12
* ``evaluations.jsonl`` -- individual 0..10 ratings, one per (listener, pair, metric)

Datasets are immutable after load; every operation returns new objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DataError


class MetricKind(Enum):
    """The three rating scales a listener can answer on."""

    REL = "REL"
    IS = "IS"
    OS = "OS"


class Split(Enum):
    TRAIN = "train"
    TEST = "test"


class Origin(Enum):
    """Where a pair's audio came from: the source corpus or one of four synthesizers."""

    ORIGINAL = "original"
    AUDIOLDM = "audioldm"
    AUDIOLDM2 = "audioldm2"
    TANGO = "tango"
    TANGO2 = "tango2"


class TopCategory(Enum):
    """The eight coarse sound classes used for per-category breakdowns."""

    HUMAN_SOUNDS = "human_sounds"
    ANIMAL = "animal"
    NATURAL_SOUNDS = "natural_sounds"
    MUSIC = "music"
    SOUNDS_OF_THINGS = "sounds_of_things"
    SOURCE_AMBIGUOUS_SOUNDS = "source_ambiguous_sounds"
    CHANNEL_ENVIRONMENT_BACKGROUND = "channel_environment_background"
    SPEECH = "speech"


UNANSWERED = "unanswered"

# Declared option codes per questionnaire item. Free text is not accepted;
# every stored answer must be one of these codes or the explicit "unanswered".
QUESTIONNAIRE_OPTIONS: dict[str, tuple[str, ...]] = {
    "q01": ("le20", "21-30", "31-40", "41-50", "51-60", "ge61"),
    "q02": ("m", "f", "nbi"),
    "q03": ("0", "1", "2", "3", "4", "ge5"),
    "q04": ("never", "le1m", "le6m", "le1y", "gt1y"),
    "q05": ("1", "2", "3", "4", "ge5"),
    "q06": ("headphone", "earphone", "others"),
    "q07": ("quiet", "mostly_quiet", "moderate", "mostly_noisy", "noisy"),
    "q08": ("easy", "mostly_easy", "moderate", "mostly_difficult", "difficult"),
    "q09": ("yes", "no"),
    "q10": ("eu", "na", "sa", "as", "af", "oc"),
    "q11": ("eu", "na", "sa", "as", "af", "oc"),
    "q12": ("eu", "na", "sa", "as", "af", "oc"),
}

QUESTION_IDS = tuple(sorted(QUESTIONNAIRE_OPTIONS))


@dataclass(frozen=True)
class EvaluationRecord:
    """One listener's 0..10 rating of one pair under one metric."""

    listener_id: str
    pair_id: str
    metric: MetricKind
    score: int
    split: Split


@dataclass(frozen=True)
class AudioTextPair:
    pair_id: str
    text: str
    audio_ref: str
    origin: Origin
    event_labels: tuple[str, ...]
    top_categories: frozenset[TopCategory]
    is_anchor: bool
    duration_s: float


@dataclass(frozen=True)
class ListenerProfile:
    listener_id: str
    answers: dict[str, str] = field(default_factory=dict)  # q01..q12 -> option code


@dataclass(frozen=True)
class Dataset:
    pairs: dict[str, AudioTextPair]
    listeners: dict[str, ListenerProfile]
    records: tuple[EvaluationRecord, ...]

    def restrict(
        self,
        metric: MetricKind | None = None,
        split: Split | None = None,
        pair_ids: set[str] | None = None,
        listener_ids: set[str] | None = None,
        include_anchors: bool = True,
    ) -> "Dataset":
        """Return a dataset whose records satisfy every given filter.

        The pairs/listeners maps are kept whole so references always resolve.
        """
        kept = []
        for r in self.records:
            if metric is not None and r.metric is not metric:
                continue
            if split is not None and r.split is not split:
                continue
            if pair_ids is not None and r.pair_id not in pair_ids:
                continue
            if listener_ids is not None and r.listener_id not in listener_ids:
                continue
            if not include_anchors and self.pairs[r.pair_id].is_anchor:
                continue
            kept.append(r)
        return replace(self, records=tuple(kept))


@dataclass(frozen=True)
class StatsSummary:
    evaluations: int
    pairs: int
    duration_s: float
    listeners: int


def _parse_line(path: Path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path.name}:{lineno}: malformed JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise DataError(f"{path.name}:{lineno}: expected a JSON object")
    return obj


def _iter_jsonl(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            yield lineno, _parse_line(path, lineno, line)


def _require(obj: dict, key: str, path: Path, lineno: int):
    if key not in obj:
        raise DataError(f"{path.name}:{lineno}: missing field '{key}'")
    return obj[key]


def _parse_pair(obj: dict, path: Path, lineno: int) -> AudioTextPair:
    pair_id = str(_require(obj, "pair_id", path, lineno))
    text = str(_require(obj, "text", path, lineno))
    if not text.strip():
        raise DataError(f"{path.name}:{lineno}: pair '{pair_id}' has empty text")
    try:
        origin = Origin(_require(obj, "origin", path, lineno))
    except ValueError:
        raise DataError(f"{path.name}:{lineno}: unknown origin {obj.get('origin')!r}") from None
    cats = set()
    for name in _require(obj, "top_categories", path, lineno):
        try:
            cats.add(TopCategory(name))
        except ValueError:
            raise DataError(f"{path.name}:{lineno}: unknown top category {name!r}") from None
    duration = float(_require(obj, "duration_s", path, lineno))
    if duration < 0 or not np.isfinite(duration):
        raise DataError(f"{path.name}:{lineno}: duration_s must be a finite nonnegative number")
    return AudioTextPair(
        pair_id=pair_id,
        text=text,
        audio_ref=str(_require(obj, "audio_ref", path, lineno)),
        origin=origin,
        event_labels=tuple(str(x) for x in _require(obj, "event_labels", path, lineno)),
        top_categories=frozenset(cats),
        is_anchor=bool(_require(obj, "is_anchor", path, lineno)),
        duration_s=duration,
    )


def _parse_listener(obj: dict, path: Path, lineno: int) -> ListenerProfile:
    listener_id = str(_require(obj, "listener_id", path, lineno))
    answers = {}
    for q in QUESTION_IDS:
        code = str(obj.get(q, UNANSWERED))
        if code != UNANSWERED and code not in QUESTIONNAIRE_OPTIONS[q]:
            raise DataError(
                f"{path.name}:{lineno}: listener '{listener_id}' answer {q}={code!r} "
                f"is not a declared option"
            )
        answers[q] = code
    return ListenerProfile(listener_id=listener_id, answers=answers)


def _parse_record(obj: dict, path: Path, lineno: int) -> EvaluationRecord:
    score = _require(obj, "score", path, lineno)
    if not isinstance(score, int) or isinstance(score, bool) or not 0 <= score <= 10:
        raise DataError(f"{path.name}:{lineno}: score must be an integer in 0..10, got {score!r}")
    try:
        metric = MetricKind(_require(obj, "metric", path, lineno))
        split = Split(_require(obj, "split", path, lineno))
    except ValueError as exc:
        raise DataError(f"{path.name}:{lineno}: {exc}") from None
    return EvaluationRecord(
        listener_id=str(_require(obj, "listener_id", path, lineno)),
        pair_id=str(_require(obj, "pair_id", path, lineno)),
        metric=metric,
        score=score,
        split=split,
    )


def load_dataset(root_path: str | Path) -> Dataset:
    """Load and cross-validate a dataset directory.

    Rejects missing files, malformed lines (with line numbers), duplicate keys,
    out-of-range scores, and dangling pair/listener references.
    """
    root = Path(root_path)
    for name in ("pairs.jsonl", "listeners.jsonl", "evaluations.jsonl"):
        if not (root / name).is_file():
            raise DataError(f"dataset directory {root} is missing {name}")

    pairs: dict[str, AudioTextPair] = {}
    path = root / "pairs.jsonl"
    for lineno, obj in _iter_jsonl(path):
        pair = _parse_pair(obj, path, lineno)
        if pair.pair_id in pairs:
            raise DataError(f"{path.name}:{lineno}: duplicate pair_id '{pair.pair_id}'")
        pairs[pair.pair_id] = pair

    listeners: dict[str, ListenerProfile] = {}
    path = root / "listeners.jsonl"
    for lineno, obj in _iter_jsonl(path):
        prof = _parse_listener(obj, path, lineno)
        if prof.listener_id in listeners:
            raise DataError(f"{path.name}:{lineno}: duplicate listener_id '{prof.listener_id}'")
        listeners[prof.listener_id] = prof

    records: list[EvaluationRecord] = []
    seen: set[tuple[str, str, MetricKind]] = set()
    path = root / "evaluations.jsonl"
    for lineno, obj in _iter_jsonl(path):
        rec = _parse_record(obj, path, lineno)
        if rec.pair_id not in pairs:
            raise DataError(f"{path.name}:{lineno}: dangling pair reference '{rec.pair_id}'")
        if rec.listener_id not in listeners:
            raise DataError(f"{path.name}:{lineno}: dangling listener reference '{rec.listener_id}'")
        key = (rec.listener_id, rec.pair_id, rec.metric)
        if key in seen:
            raise DataError(
                f"{path.name}:{lineno}: duplicate rating for listener '{rec.listener_id}', "
                f"pair '{rec.pair_id}', metric {rec.metric.value}"
            )
        seen.add(key)
        records.append(rec)

    return Dataset(pairs=pairs, listeners=listeners, records=tuple(records))


def save_dataset(d: Dataset, root_path: str | Path) -> None:
    """Write a dataset back out in the same three-file JSONL layout."""
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for pid in sorted(d.pairs):
            p = d.pairs[pid]
            fh.write(json.dumps({
                "pair_id": p.pair_id,
                "text": p.text,
                "audio_ref": p.audio_ref,
                "origin": p.origin.value,
                "event_labels": list(p.event_labels),
                "top_categories": sorted(c.value for c in p.top_categories),
                "is_anchor": p.is_anchor,
                "duration_s": p.duration_s,
            }, sort_keys=True) + "\n")
    with open(root / "listeners.jsonl", "w", encoding="utf-8") as fh:
        for lid in sorted(d.listeners):
            prof = d.listeners[lid]
            row = {"listener_id": prof.listener_id}
            row.update({q: prof.answers.get(q, UNANSWERED) for q in QUESTION_IDS})
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(root / "evaluations.jsonl", "w", encoding="utf-8") as fh:
        for r in d.records:
            fh.write(json.dumps({
                "listener_id": r.listener_id,
                "pair_id": r.pair_id,
                "metric": r.metric.value,
                "score": r.score,
                "split": r.split.value,
            }, sort_keys=True) + "\n")


def dataset_stats(d: Dataset, metric: MetricKind, split: Split) -> StatsSummary:
    """Evaluation/pair/duration/listener counts for one (metric, split) slice.

    Duration sums each distinct rated pair once, not once per evaluation.
    """
    n_eval = 0
    pair_ids: set[str] = set()
    listener_ids: set[str] = set()
    for r in d.records:
        if r.metric is metric and r.split is split:
            n_eval += 1
            pair_ids.add(r.pair_id)
            listener_ids.add(r.listener_id)
    duration = sum(d.pairs[pid].duration_s for pid in pair_ids)
    return StatsSummary(
        evaluations=n_eval,
        pairs=len(pair_ids),
        duration_s=duration,
        listeners=len(listener_ids),
    )


def mean_score_per_pair(d: Dataset, metric: MetricKind) -> dict[str, float]:
    """Arithmetic mean rating per pair for one metric; unrated pairs are omitted."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for r in d.records:
        if r.metric is metric:
            sums[r.pair_id] = sums.get(r.pair_id, 0.0) + r.score
            counts[r.pair_id] = counts.get(r.pair_id, 0) + 1
    return {pid: sums[pid] / counts[pid] for pid in sums}


def _connected_components(d: Dataset, pair_ids: list[str]) -> list[list[str]]:
    """Group pairs that transitively share an audio file or a text string."""
    by_audio: dict[str, list[str]] = {}
    by_text: dict[str, list[str]] = {}
    for pid in pair_ids:
        p = d.pairs[pid]
        by_audio.setdefault(p.audio_ref, []).append(pid)
        by_text.setdefault(p.text, []).append(pid)

    parent = {pid: pid for pid in pair_ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for members in list(by_audio.values()) + list(by_text.values()):
        for other in members[1:]:
            union(members[0], other)

    groups: dict[str, list[str]] = {}
    for pid in pair_ids:
        groups.setdefault(find(pid), []).append(pid)
    return [sorted(g) for g in groups.values()]


def split_validation_test(d: Dataset, seed: int) -> tuple[Dataset, Dataset]:
    """Partition test-portion records into two datasets with no shared audio or text.

    Pairs that share an audio file or a caption always land on the same side, so
    the partition works on connected components of the sharing graph. Components
    are assigned greedily (largest evaluation count first) to the lighter side;
    the side that ends up with fewer evaluations is returned as validation.
    """
    pair_ids = sorted({r.pair_id for r in d.records})
    if not pair_ids:
        raise DataError("cannot split: dataset has no records")
    components = _connected_components(d, pair_ids)
    if len(components) < 2:
        raise DataError(
            "cannot split: all pairs share audio or text (single connected component)"
        )

    eval_count = {pid: 0 for pid in pair_ids}
    for r in d.records:
        eval_count[r.pair_id] += 1
    comp_weight = [sum(eval_count[pid] for pid in comp) for comp in components]

    # Heaviest components are placed first; the seeded shuffle only breaks
    # ties among equal-weight components (the sort is stable).
    rng = np.random.default_rng(seed)
    order = list(rng.permutation(len(components)))
    order.sort(key=lambda i: -comp_weight[i])

    side_pairs: tuple[set[str], set[str]] = (set(), set())
    side_weight = [0, 0]
    for i in order:
        target = 0 if side_weight[0] <= side_weight[1] else 1
        side_pairs[target].update(components[i])
        side_weight[target] += comp_weight[i]

    lighter = 0 if side_weight[0] <= side_weight[1] else 1
    validation = d.restrict(pair_ids=side_pairs[lighter])
    test = d.restrict(pair_ids=side_pairs[1 - lighter])
    return validation, test
