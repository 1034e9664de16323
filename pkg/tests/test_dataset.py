import json

import pytest

from relatekit.dataset import (
    MetricKind,
    Split,
    dataset_stats,
    load_dataset,
    mean_score_per_pair,
    save_dataset,
    split_validation_test,
)
from relatekit.errors import DataError


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def make_pair(pid, text="a dog barking", audio=None, origin="original", **kw):
    row = {
        "pair_id": pid,
        "text": text,
        "audio_ref": audio or f"audio/{pid}.wav",
        "origin": origin,
        "event_labels": ["dog_bark"],
        "top_categories": ["animal"],
        "is_anchor": False,
        "duration_s": 10.0,
    }
    row.update(kw)
    return row


def make_record(lid, pid, score=5, metric="REL", split="train"):
    return {"listener_id": lid, "pair_id": pid, "metric": metric, "score": score, "split": split}


def write_dataset(root, pairs, listeners, records):
    root.mkdir(parents=True, exist_ok=True)
    write_jsonl(root / "pairs.jsonl", pairs)
    write_jsonl(root / "listeners.jsonl", [{"listener_id": lid} for lid in listeners])
    write_jsonl(root / "evaluations.jsonl", records)


def test_load_round_trip(tmp_path):
    write_dataset(
        tmp_path,
        [make_pair("p1"), make_pair("p2", origin="tango")],
        ["l1", "l2"],
        [make_record("l1", "p1"), make_record("l2", "p1", score=7), make_record("l1", "p2")],
    )
    d = load_dataset(tmp_path)
    assert len(d.pairs) == 2 and len(d.listeners) == 2 and len(d.records) == 3
    out = tmp_path / "copy"
    save_dataset(d, out)
    d2 = load_dataset(out)
    assert d2.pairs == d.pairs
    assert sorted(d2.records, key=str) == sorted(d.records, key=str)


def test_load_fixture_counts(fx_dir, fx_manifest, fx_dataset):
    counts = fx_manifest["counts"]
    assert len(fx_dataset.pairs) == counts["pairs"]
    assert len(fx_dataset.listeners) == counts["listeners"]
    for metric in ("REL", "IS", "OS"):
        for split in ("train", "test"):
            got = sum(
                1
                for r in fx_dataset.records
                if r.metric is MetricKind(metric) and r.split is Split(split)
            )
            assert got == counts["records"][metric][split]


def test_empty_evaluations_ok(tmp_path):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [])
    d = load_dataset(tmp_path)
    assert d.records == ()
    stats = dataset_stats(d, MetricKind.REL, Split.TRAIN)
    assert (stats.evaluations, stats.pairs, stats.duration_s, stats.listeners) == (0, 0, 0.0, 0)


def test_dangling_pair_reference(tmp_path):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [make_record("l1", "ghost")])
    with pytest.raises(DataError, match="dangling pair reference"):
        load_dataset(tmp_path)


def test_dangling_listener_reference(tmp_path):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [make_record("ghost", "p1")])
    with pytest.raises(DataError, match="dangling listener"):
        load_dataset(tmp_path)


def test_malformed_line_reports_line_number(tmp_path):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [])
    with open(tmp_path / "evaluations.jsonl", "w") as fh:
        fh.write(json.dumps(make_record("l1", "p1")) + "\n")
        fh.write("{not json\n")
    with pytest.raises(DataError, match="evaluations.jsonl:2"):
        load_dataset(tmp_path)


def test_duplicate_keys_rejected(tmp_path):
    write_dataset(tmp_path, [make_pair("p1"), make_pair("p1")], ["l1"], [])
    with pytest.raises(DataError, match="duplicate pair_id"):
        load_dataset(tmp_path)
    write_dataset(
        tmp_path, [make_pair("p1")], ["l1"],
        [make_record("l1", "p1"), make_record("l1", "p1", score=3)],
    )
    with pytest.raises(DataError, match="duplicate rating"):
        load_dataset(tmp_path)


@pytest.mark.parametrize("score", [-1, 11, 3.5, "7"])
def test_score_out_of_range(tmp_path, score):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [make_record("l1", "p1", score=score)])
    with pytest.raises(DataError, match="score"):
        load_dataset(tmp_path)


def test_missing_file(tmp_path):
    write_dataset(tmp_path, [make_pair("p1")], ["l1"], [])
    (tmp_path / "listeners.jsonl").unlink()
    with pytest.raises(DataError, match="missing listeners.jsonl"):
        load_dataset(tmp_path)


def test_referential_integrity_on_fixture(fx_dataset):
    for r in fx_dataset.records:
        assert r.pair_id in fx_dataset.pairs
        assert r.listener_id in fx_dataset.listeners


def test_stats_additivity(fx_dataset):
    for metric in MetricKind:
        both = sum(1 for r in fx_dataset.records if r.metric is metric)
        tr = dataset_stats(fx_dataset, metric, Split.TRAIN).evaluations
        te = dataset_stats(fx_dataset, metric, Split.TEST).evaluations
        assert tr + te == both


def test_mean_score_per_pair(tmp_path):
    write_dataset(
        tmp_path,
        [make_pair("p1"), make_pair("p2"), make_pair("p3")],
        ["l1", "l2", "l3", "l4", "l5"],
        [
            make_record("l1", "p1", score=4),
            make_record("l2", "p1", score=6),
            make_record("l1", "p2", score=7),
            *[make_record(f"l{i+1}", "p3", score=s) for i, s in enumerate([0, 2, 5, 8, 10])],
        ],
    )
    d = load_dataset(tmp_path)
    means = mean_score_per_pair(d, MetricKind.REL)
    assert means["p1"] == pytest.approx(5.0)
    assert means["p2"] == pytest.approx(7.0)
    assert means["p3"] == pytest.approx(5.0)
    assert "p4" not in means


class TestSplit:
    def test_two_disjoint_pairs(self, tmp_path):
        write_dataset(
            tmp_path,
            [make_pair("p1", text="t one"), make_pair("p2", text="t two")],
            ["l1"],
            [make_record("l1", "p1", split="test"), make_record("l1", "p2", split="test")],
        )
        d = load_dataset(tmp_path)
        val, test = split_validation_test(d, seed=0)
        assert {r.pair_id for r in val.records} != {r.pair_id for r in test.records}
        assert len(val.records) == len(test.records) == 1

    def test_no_overlap_property(self, fx_dataset):
        test_part = fx_dataset.restrict(metric=MetricKind.REL, split=Split.TEST)
        val, test = split_validation_test(test_part, seed=3)
        val_pairs = {r.pair_id for r in val.records}
        test_pairs = {r.pair_id for r in test.records}
        assert not (val_pairs & test_pairs)
        assert val_pairs | test_pairs == {r.pair_id for r in test_part.records}
        val_audio = {fx_dataset.pairs[p].audio_ref for p in val_pairs}
        test_audio = {fx_dataset.pairs[p].audio_ref for p in test_pairs}
        assert not (val_audio & test_audio)
        val_text = {fx_dataset.pairs[p].text for p in val_pairs}
        test_text = {fx_dataset.pairs[p].text for p in test_pairs}
        assert not (val_text & test_text)

    def test_determinism(self, fx_dataset):
        test_part = fx_dataset.restrict(metric=MetricKind.REL, split=Split.TEST)
        a1 = split_validation_test(test_part, seed=5)
        a2 = split_validation_test(test_part, seed=5)
        assert {r.pair_id for r in a1[0].records} == {r.pair_id for r in a2[0].records}
        assert a1[0].records == a2[0].records

    def test_single_component_errors(self, tmp_path):
        write_dataset(
            tmp_path,
            [make_pair("p1", text="same text"), make_pair("p2", text="same text")],
            ["l1"],
            [make_record("l1", "p1", split="test"), make_record("l1", "p2", split="test")],
        )
        d = load_dataset(tmp_path)
        with pytest.raises(DataError, match="single connected component"):
            split_validation_test(d, seed=0)
