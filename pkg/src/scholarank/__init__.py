"""Coauthorship-graph ranking metrics and comparison analyses for publication corpora."""

__version__ = "0.1.0"

from scholarank.corpus import (
    Author,
    Corpus,
    CorpusError,
    Paper,
    Venue,
    coauthor_distribution,
    corpus_stats,
    filter_corpus,
    load_corpus,
    save_corpus,
)
from scholarank.graph import CoauthorGraph, build_coauthor_graph
from scholarank.metrics import (
    ConvergenceError,
    MetricConfig,
    Ranking,
    ScoreMap,
    compute_metric,
    frac_credit,
    h_index,
    harm_credit,
    infl_and_coa,
    pagerank,
    rank_authors,
    unit_harmonic_credit,
    weighted_pagerank,
)
from scholarank.stats import (
    StatsConfig,
    a12_effect,
    kendall_tau,
    median_cites_by_coauthors,
    overlap_matrix,
    partition_by_effect,
    rank_stability,
    theta_sweep,
    top_fraction_overlap,
)

__all__ = [
    "__version__",
    "Author",
    "Corpus",
    "CorpusError",
    "Paper",
    "Venue",
    "coauthor_distribution",
    "corpus_stats",
    "filter_corpus",
    "load_corpus",
    "save_corpus",
    "CoauthorGraph",
    "build_coauthor_graph",
    "ConvergenceError",
    "MetricConfig",
    "Ranking",
    "ScoreMap",
    "compute_metric",
    "frac_credit",
    "h_index",
    "harm_credit",
    "infl_and_coa",
    "pagerank",
    "rank_authors",
    "unit_harmonic_credit",
    "weighted_pagerank",
    "StatsConfig",
    "a12_effect",
    "kendall_tau",
    "median_cites_by_coauthors",
    "overlap_matrix",
    "partition_by_effect",
    "rank_stability",
    "theta_sweep",
    "top_fraction_overlap",
]
