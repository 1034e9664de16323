"""Tour of the nonparametric test battery on synthetic rating-like data."""

import numpy as np

from relatekit.stats import (
    art_anova_2x,
    boxplot_summary,
    kruskal_wallis,
    mann_whitney_u,
    steel_dwass,
)

rng = np.random.default_rng(0)

# Two groups of 0..10 ratings with a real location shift.
a = np.clip(np.round(rng.normal(6.5, 1.8, 40)), 0, 10)
b = np.clip(np.round(rng.normal(5.0, 1.8, 45)), 0, 10)
r = mann_whitney_u(a, b)
print(f"Mann-Whitney: U = {r.statistic:.1f}, p = {r.p_value:.4f}")

# Three groups: the omnibus test plus all-pairs comparison.
groups = [np.clip(np.round(rng.normal(m, 1.5, 35)), 0, 10) for m in (4.5, 5.5, 7.0)]
kw = kruskal_wallis(groups, labels=("short", "medium", "long"))
print(f"\nKruskal-Wallis: H = {kw.statistic:.3f}, p = {kw.p_value:.5f}")
print("Steel-Dwass pairwise:")
for pair in steel_dwass(groups, labels=("short", "medium", "long")):
    print(f"  {pair.group_labels[0]:>6} vs {pair.group_labels[1]:<6}"
          f" t = {pair.statistic:+.3f}, p = {pair.p_value:.4f}")

# Interaction: does a factor hit synthesized audio harder than genuine audio?
# Build responses where the "hard" level only hurts the synthetic side.
values, level, origin = [], [], []
for lv in ("easy", "hard"):
    for og in ("original", "synthetic"):
        shift = -2.0 if (lv, og) == ("hard", "synthetic") else 0.0
        values.extend(rng.normal(7.0 + shift, 1.2, 30))
        level.extend([lv] * 30)
        origin.extend([og] * 30)
art = art_anova_2x(values, level, origin)
print("\nAligned-rank two-way ANOVA:")
for name, res in art.items():
    print(f"  {name:<12} F = {res.statistic:8.3f}, p = {res.p_value:.5f}")

print("\nBoxplot summary of the 'hard x synthetic' cell:")
cell = [v for v, lv, og in zip(values, level, origin) if lv == "hard" and og == "synthetic"]
box = boxplot_summary(cell)
print(f"  median {box.median:.2f}, IQR [{box.q1:.2f}, {box.q3:.2f}], "
      f"whiskers [{box.whisker_low:.2f}, {box.whisker_high:.2f}], "
      f"{len(box.outliers)} outlier(s)")
