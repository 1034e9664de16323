"""Factor analysis of relevance ratings: which audio/text attributes shift
scores, and which interact with original-vs-synthetic origin.

Each factor groups per-evaluation scores by level. Two-level factors use the
Mann-Whitney U test for the among-items question, three or more use
Kruskal-Wallis (with all-pairs Steel-Dwass attached); the interaction with
origin comes from the aligned-rank-transform two-way ANOVA. Continuous
factors (word count, readability) are binned into quantile bins, terciles by
default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, MetricKind, Origin, TopCategory
from .errors import NumericError
from .stats import (
    BoxplotSummary,
    TestResult,
    art_anova_2x,
    boxplot_summary,
    kruskal_wallis,
    mann_whitney_u,
    quantile_nearest_rank,
    steel_dwass,
)
from .text import flesch_reading_ease, has_temporal_preposition, word_count

CATEGORY_FACTORS = tuple(f"category:{cat.value}" for cat in TopCategory)
ALL_FACTORS = (
    "event_label_count",
    "top_category_count",
    *CATEGORY_FACTORS,
    "word_count",
    "temporal",
    "flesch",
)


@dataclass(frozen=True)
class FactorReport:
    factor: str
    among_items_significant: bool
    interaction_significant: bool
    among: TestResult
    interaction: TestResult
    art: dict[str, TestResult]
    pairwise: tuple[TestResult, ...] = ()

    def as_dict(self) -> dict:
        def tr(t: TestResult) -> dict:
            return {
                "method": t.method,
                "statistic": t.statistic,
                "p_value": t.p_value,
                "group_labels": list(t.group_labels),
                "n_per_group": list(t.n_per_group),
            }

        return {
            "factor": self.factor,
            "among_items_significant": self.among_items_significant,
            "interaction_significant": self.interaction_significant,
            "among": tr(self.among),
            "interaction": tr(self.interaction),
            "art": {k: tr(v) for k, v in self.art.items()},
            "pairwise": [tr(t) for t in self.pairwise],
        }


def _quantile_bins(values: dict[str, float], bins: int) -> dict[str, str]:
    """Per-pair bin labels from quantile edges over the distinct pairs."""
    pool = np.sort(np.array(list(values.values()), dtype=float))
    edges = [quantile_nearest_rank(pool, (i + 1) / bins) for i in range(bins - 1)]
    labels = {}
    for pid, v in values.items():
        bin_idx = 0
        for e in edges:
            if v > e:
                bin_idx += 1
        labels[pid] = f"q{bin_idx + 1}"
    return labels


def _pair_level(d: Dataset, factor: str, bins: int) -> dict[str, str]:
    """Map every non-anchor rated pair to its factor level label."""
    pairs = {pid: p for pid, p in d.pairs.items() if not p.is_anchor}
    if factor == "event_label_count":
        return {pid: str(len(p.event_labels)) for pid, p in pairs.items()}
    if factor == "top_category_count":
        return {pid: str(len(p.top_categories)) for pid, p in pairs.items()}
    if factor.startswith("category:"):
        cat = TopCategory(factor.split(":", 1)[1])
        return {
            pid: ("in" if cat in p.top_categories else "out") for pid, p in pairs.items()
        }
    if factor == "temporal":
        return {
            pid: ("with" if has_temporal_preposition(p.text) else "without")
            for pid, p in pairs.items()
        }
    if factor == "word_count":
        return _quantile_bins({pid: float(word_count(p.text)) for pid, p in pairs.items()}, bins)
    if factor == "flesch":
        return _quantile_bins(
            {pid: flesch_reading_ease(p.text) for pid, p in pairs.items()}, bins
        )
    raise NumericError(f"unknown factor '{factor}'")


def _observations(d: Dataset, metric: MetricKind, factor: str, bins: int):
    levels_by_pair = _pair_level(d, factor, bins)
    scores, levels, origins = [], [], []
    for r in d.records:
        if r.metric is not metric:
            continue
        pair = d.pairs[r.pair_id]
        if pair.is_anchor:
            continue
        scores.append(float(r.score))
        levels.append(levels_by_pair[r.pair_id])
        origins.append("original" if pair.origin is Origin.ORIGINAL else "synthetic")
    if not scores:
        raise NumericError(f"no {metric.value} observations for factor '{factor}'")
    return np.array(scores), levels, origins


def factor_analysis(
    d: Dataset, metric: MetricKind, factor: str, alpha: float = 0.05, bins: int = 3
) -> FactorReport:
    """Test one factor for among-level differences and origin interaction."""
    scores, levels, origins = _observations(d, metric, factor, bins)
    level_names = sorted(set(levels))
    if len(level_names) < 2:
        raise NumericError(f"factor '{factor}' has a single level; nothing to compare")
    groups = [scores[[lv == name for lv in levels]] for name in level_names]
    if any(len(g) == 0 for g in groups):
        raise NumericError(f"factor '{factor}' has an empty level")

    pairwise: tuple[TestResult, ...] = ()
    if len(level_names) == 2:
        among = mann_whitney_u(groups[0], groups[1])
        among = TestResult(
            method=among.method,
            statistic=among.statistic,
            p_value=among.p_value,
            group_labels=tuple(level_names),
            n_per_group=among.n_per_group,
        )
    else:
        among = kruskal_wallis(groups, labels=tuple(level_names))
        pairwise = tuple(steel_dwass(groups, labels=tuple(level_names)))

    art = art_anova_2x(scores, levels, origins)
    interaction = art["interaction"]
    return FactorReport(
        factor=factor,
        among_items_significant=bool(among.p_value < alpha),
        interaction_significant=bool(interaction.p_value < alpha),
        among=among,
        interaction=interaction,
        art=art,
        pairwise=pairwise,
    )


def factor_boxplots(
    d: Dataset, metric: MetricKind, factor: str, bins: int = 3
) -> dict[str, dict[str, BoxplotSummary]]:
    """Per-level score summaries, overall and split by origin."""
    scores, levels, origins = _observations(d, metric, factor, bins)
    out: dict[str, dict[str, BoxplotSummary]] = {}
    for name in sorted(set(levels)):
        mask = np.array([lv == name for lv in levels])
        entry = {"all": boxplot_summary(scores[mask])}
        for origin in ("original", "synthetic"):
            sub = scores[mask & np.array([o == origin for o in origins])]
            if len(sub):
                entry[origin] = boxplot_summary(sub)
        out[name] = entry
    return out
