import math

import pytest

from relatekit.dataset import MetricKind, load_dataset
from relatekit.errors import DataError
from relatekit.screening import (
    ANALYSIS_POLICY,
    TEST_POLICY,
    TRAIN_POLICY,
    ScreeningPolicy,
    anchor_mean,
    rating_entropy,
    screen,
)
from test_dataset import make_pair, make_record, write_dataset

REL = MetricKind.REL


def build(tmp_path, listener_scores, anchor_scores=None, origin="original"):
    """Dataset with one listener, generic pairs, and optional anchor ratings."""
    anchor_scores = anchor_scores or []
    pairs = [make_pair(f"p{i}", text=f"text {i}", origin=origin) for i in range(len(listener_scores))]
    pairs += [
        make_pair(f"anchor{i}", text=f"anchor text {i}", is_anchor=True)
        for i in range(len(anchor_scores))
    ]
    records = [make_record("l1", f"p{i}", score=s) for i, s in enumerate(listener_scores)]
    records += [make_record("l1", f"anchor{i}", score=s) for i, s in enumerate(anchor_scores)]
    write_dataset(tmp_path, pairs, ["l1"], records)
    return load_dataset(tmp_path)


class TestAnchorMean:
    def test_simple_means(self, tmp_path):
        d = build(tmp_path, [5], anchor_scores=[0, 1])
        assert anchor_mean(d, REL, "l1") == pytest.approx(0.5)

    def test_threshold_value(self, tmp_path):
        d = build(tmp_path, [5], anchor_scores=[2, 2, 2])
        assert anchor_mean(d, REL, "l1") == pytest.approx(2.0)

    def test_fixture_value(self, tmp_path):
        d = build(tmp_path, [5], anchor_scores=[0, 3, 0, 1])
        assert anchor_mean(d, REL, "l1") == pytest.approx(1.0)

    def test_no_anchor_ratings(self, tmp_path):
        d = build(tmp_path, [5])
        assert anchor_mean(d, REL, "l1") is None


class TestRatingEntropy:
    def test_constant_rater(self, tmp_path):
        d = build(tmp_path, [5, 5, 5, 5])
        assert rating_entropy(d, REL, "l1") == pytest.approx(0.0)

    def test_uniform_rater(self, tmp_path):
        d = build(tmp_path, list(range(11)))
        assert rating_entropy(d, REL, "l1") == pytest.approx(math.log(11), abs=1e-12)

    def test_two_equal_masses(self, tmp_path):
        d = build(tmp_path, [3, 3, 7, 7])
        assert rating_entropy(d, REL, "l1") == pytest.approx(math.log(2), abs=1e-12)

    def test_no_ratings_error(self, tmp_path):
        d = build(tmp_path, [5])
        with pytest.raises(DataError, match="no REL ratings"):
            rating_entropy(d, REL, "ghost")


class TestScreen:
    def test_anchor_mean_at_threshold_excluded(self, tmp_path):
        d = build(tmp_path, [5, 6], anchor_scores=[2, 2])
        kept, excluded = screen(d, REL, TRAIN_POLICY)
        assert [e.listener_id for e in excluded] == ["l1"]
        assert excluded[0].reason == "anchor_mean"
        assert kept.records == ()

    def test_below_test_threshold_kept(self, tmp_path):
        d = build(tmp_path, [5, 6], anchor_scores=[1, 1, 1, 1, 1, 1, 1, 1, 1, 0])
        assert anchor_mean(d, REL, "l1") == pytest.approx(0.9)
        kept, excluded = screen(d, REL, TEST_POLICY)
        assert not excluded
        assert {r.pair_id for r in kept.records} == {"p0", "p1"}

    def test_anchor_records_dropped_from_kept(self, tmp_path):
        d = build(tmp_path, [5], anchor_scores=[0])
        kept, _ = screen(d, REL, TRAIN_POLICY)
        assert all(not kept.pairs[r.pair_id].is_anchor for r in kept.records)

    def test_no_anchor_raters_survive_stage1(self, tmp_path):
        d = build(tmp_path, [5, 6])
        kept, excluded = screen(d, REL, TRAIN_POLICY)
        assert not excluded
        assert len(kept.records) == 2

    def test_original_mean_stage(self, tmp_path):
        # listener rates originals at mean 6.0 -> excluded under analysis policy
        d = build(tmp_path, [6, 6, 6], anchor_scores=[0])
        policy = ScreeningPolicy(anchor_mean_exclude_at=2.0, original_mean_exclude_at_or_below=6.0)
        kept, excluded = screen(d, REL, policy)
        assert [e.reason for e in excluded] == ["original_mean"]
        assert excluded[0].value == pytest.approx(6.0)

    def test_entropy_cut_count(self, fx_dataset, fx_manifest):
        kept, excluded = screen(fx_dataset, REL, ANALYSIS_POLICY)
        rated = {r.listener_id for r in fx_dataset.records if r.metric is REL}
        out_12 = {e.listener_id for e in excluded if e.reason != "low_entropy"}
        survivors = len(rated - out_12)
        dropped = [e for e in excluded if e.reason == "low_entropy"]
        assert len(dropped) == math.floor(0.05 * survivors)
        assert sorted(e.listener_id for e in dropped) == fx_manifest["planted"]["flat_listeners"]

    def test_planted_listeners_each_stage(self, fx_dataset, fx_manifest):
        _, excluded = screen(fx_dataset, REL, ANALYSIS_POLICY)
        by_reason = {}
        for e in excluded:
            by_reason.setdefault(e.reason, []).append(e.listener_id)
        planted = fx_manifest["planted"]
        assert sorted(by_reason["anchor_mean"]) == planted["bad_anchor_listeners"]
        assert sorted(by_reason["original_mean"]) == planted["grumpy_listeners"]

    def test_forty_listener_entropy_floor(self, tmp_path):
        # 40 surviving listeners, 5% cut -> exactly 2 lowest-entropy removals
        pairs = [make_pair(f"p{i}", text=f"t{i}") for i in range(12)]
        listeners = [f"l{i:02d}" for i in range(40)]
        records = []
        for j, lid in enumerate(listeners):
            # two flat raters, everyone else varied
            scores = [7] * 12 if j < 2 else [(j + k * 3) % 11 for k in range(12)]
            records += [make_record(lid, f"p{i}", score=s) for i, s in enumerate(scores)]
        write_dataset(tmp_path, pairs, listeners, records)
        d = load_dataset(tmp_path)
        policy = ScreeningPolicy(anchor_mean_exclude_at=2.0, entropy_drop_fraction=0.05)
        _, excluded = screen(d, REL, policy)
        dropped = [e.listener_id for e in excluded if e.reason == "low_entropy"]
        assert len(dropped) == 2
        assert dropped == ["l00", "l01"]

    def test_stage12_idempotent(self, fx_dataset):
        policy = ScreeningPolicy(anchor_mean_exclude_at=2.0, original_mean_exclude_at_or_below=6.0)
        kept1, excl1 = screen(fx_dataset, REL, policy)
        kept2, excl2 = screen(kept1, REL, policy)
        assert not excl2
        assert kept2.records == kept1.records

    def test_entropy_cut_fixed_fraction_each_pass(self, fx_dataset):
        kept1, excl1 = screen(fx_dataset, REL, ANALYSIS_POLICY)
        survivors1 = {r.listener_id for r in kept1.records if r.metric is REL}
        _, excl2 = screen(kept1, REL, ANALYSIS_POLICY)
        second_drop = [e for e in excl2 if e.reason == "low_entropy"]
        assert len(second_drop) == math.floor(0.05 * len(survivors1))

    def test_monotone_in_anchor_threshold(self, fx_dataset):
        keep_sets = []
        for thresh in (1.0, 2.0, 4.0):
            kept, _ = screen(fx_dataset, REL, ScreeningPolicy(anchor_mean_exclude_at=thresh))
            keep_sets.append({r.listener_id for r in kept.records})
        assert keep_sets[0] <= keep_sets[1] <= keep_sets[2]

    def test_post_screen_no_violations(self, fx_dataset):
        kept, _ = screen(fx_dataset, REL, ANALYSIS_POLICY)
        retained = {r.listener_id for r in kept.records if r.metric is REL}
        # re-audit against the original dataset (kept drops anchor records)
        for lid in retained:
            am = anchor_mean(fx_dataset, REL, lid)
            assert am is None or am < ANALYSIS_POLICY.anchor_mean_exclude_at
