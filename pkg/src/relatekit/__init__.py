"""relatekit: screening, nonparametric analysis, and score prediction for
subjective text-audio relevance ratings."""

from .clapscore import EmbeddingPair, baseline_report, clap_score
from .dataset import (
    AudioTextPair,
    Dataset,
    EvaluationRecord,
    ListenerProfile,
    MetricKind,
    Origin,
    Split,
    StatsSummary,
    TopCategory,
    dataset_stats,
    load_dataset,
    mean_score_per_pair,
    save_dataset,
    split_validation_test,
)
from .errors import DataError, FormatError, NumericError, RelateKitError
from .factors import ALL_FACTORS, FactorReport, factor_analysis
from .features import FeatureBundle, read_bundle, read_feature, write_feature
from .metrics import MetricReport, evaluate, kendall_tau_b, pearson, per_category_srcc, spearman
from .screening import (
    ANALYSIS_POLICY,
    TEST_POLICY,
    TRAIN_POLICY,
    ScreeningPolicy,
    anchor_mean,
    rating_entropy,
    screen,
)
from .stats import (
    BoxplotSummary,
    TestResult,
    art_anova_2x,
    boxplot_summary,
    kruskal_wallis,
    mann_whitney_u,
    steel_dwass,
)
from .text import TextFeatures, flesch_reading_ease, has_temporal_preposition, word_count

__version__ = "0.1.0"
