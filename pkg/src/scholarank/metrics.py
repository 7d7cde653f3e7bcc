"""Author-ranking metrics over a corpus and its coauthorship graph.

Scalar metrics (h-index, total citations, article counts, fractional and
harmonic credit) read the corpus directly. The two propagation metrics
iterate over the coauthorship graph:

    pagerank:           score(i) = (1-theta)/N + theta * sum_k score(k)/degree(k)
    weighted_pagerank:  score(i) = (1-theta)*w(i)/sum(w) + theta * sum_k score(k)/degree(k)

with k ranging over i's collaborators. Both are solved by synchronous
iteration from the uniform vector, renormalizing to sum 1 each step, and
converge when the L1 change drops below the configured tolerance.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from scholarank._kernels import power_iterate
from scholarank.corpus import Corpus, papers_per_author
from scholarank.graph import CoauthorGraph

WEIGHT_SCHEMES = ("uniform", "publications", "citations")

# CLI-facing metric names, in the order comparison tables report them.
SCALAR_METRICS = ("h", "infl", "coa", "frac", "harm")
PAGERANK_METRICS = ("pr", "pr-publ", "pr-cite")
ALL_METRICS = SCALAR_METRICS + PAGERANK_METRICS
OVERLAP_METRICS = ("infl", "coa", "harm", "frac", "pr", "pr-publ", "pr-cite")


class ConvergenceError(RuntimeError):
    """The iteration did not reach the tolerance within the iteration cap."""

    def __init__(self, message: str, iterations: int, residual: float, theta: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.theta = theta


@dataclass(frozen=True)
class MetricConfig:
    """Knobs for the propagation metrics.

    theta mixes the teleport and collaboration terms (0 = teleport only);
    weight_scheme selects the teleport weights for weighted runs:
    publications = papers per author, citations = total citations per author.
    """

    theta: float = 0.5
    tolerance: float = 1e-10
    max_iterations: int = 200
    weight_scheme: str = "uniform"

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")
        if self.tolerance <= 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.weight_scheme not in WEIGHT_SCHEMES:
            raise ValueError(f"weight_scheme must be one of {WEIGHT_SCHEMES}")


@dataclass(frozen=True)
class ScoreMap:
    """Per-author scores for one metric."""

    metric: str
    scores: dict[str, float]

    def __getitem__(self, author_id: str) -> float:
        return self.scores[author_id]

    def __len__(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class Ranking:
    """Authors in descending score order with 1-based rank positions.

    Ties share the minimum position; the listing order breaks ties by
    ascending author key so reruns are byte-identical.
    """

    metric: str
    ordered: tuple[str, ...]
    positions: dict[str, int]
    scores: dict[str, float]

    def top(self, k: int) -> tuple[str, ...]:
        return self.ordered[:k]

    def author_set(self) -> frozenset[str]:
        return frozenset(self.ordered)


def h_index(citation_counts: Sequence[int]) -> int:
    """Largest h such that at least h of the counts are >= h."""
    ranked = sorted(citation_counts, reverse=True)
    h = 0
    for position, count in enumerate(ranked, start=1):
        if count >= position:
            h = position
        else:
            break
    return h


def infl_and_coa(corpus: Corpus, author_id: str) -> tuple[int, int]:
    """(total citations, article count) for one author; missing counts add 0."""
    papers = corpus.papers_of(author_id)
    return sum(p.citations or 0 for p in papers), len(papers)


def frac_credit(corpus: Corpus, author_id: str) -> float:
    """Citations of each of the author's papers split equally over its byline."""
    return sum((p.citations or 0) / len(p.author_ids) for p in corpus.papers_of(author_id))


def unit_harmonic_credit(position: int, n_authors: int) -> float:
    """Byline-position weight (1/position) / (1 + 1/2 + ... + 1/n_authors).

    Positions are 1-based; the weights over a full byline sum to 1.
    """
    if not 1 <= position <= n_authors:
        raise ValueError(f"position {position} out of range for {n_authors} authors")
    harmonic = sum(1.0 / k for k in range(1, n_authors + 1))
    return (1.0 / position) / harmonic


def harm_credit(corpus: Corpus, author_id: str) -> float:
    """Citations of each paper weighted by the author's byline-position credit."""
    total = 0.0
    for paper in corpus.papers_of(author_id):
        position = paper.author_ids.index(author_id) + 1
        total += (paper.citations or 0) * unit_harmonic_credit(position, len(paper.author_ids))
    return total


def author_weights(corpus: Corpus, scheme: str) -> dict[str, float]:
    """Teleport weights per author for the given scheme."""
    if scheme == "uniform":
        return {a: 1.0 for a in corpus.authors}
    if scheme == "publications":
        return {a: float(n) for a, n in papers_per_author(corpus).items()}
    if scheme == "citations":
        return {a: float(infl_and_coa(corpus, a)[0]) for a in corpus.authors}
    raise ValueError(f"weight_scheme must be one of {WEIGHT_SCHEMES}")


def _iterate(graph: CoauthorGraph, teleport: np.ndarray, config: MetricConfig, metric: str) -> ScoreMap:
    indptr, indices = graph.to_csr()
    scores, iterations, residual, converged = power_iterate(
        indptr, indices, teleport, config.theta, config.tolerance, config.max_iterations
    )
    if not converged:
        raise ConvergenceError(
            f"{metric} did not converge after {iterations} iterations "
            f"(residual {residual:.3e}, theta {config.theta})",
            iterations=iterations,
            residual=residual,
            theta=config.theta,
        )
    return ScoreMap(
        metric=metric,
        scores={node: float(scores[i]) for i, node in enumerate(graph.nodes)},
    )


def pagerank(graph: CoauthorGraph, config: MetricConfig, metric: str = "pr") -> ScoreMap:
    """Uniform-teleport propagation scores; converged vector sums to 1."""
    if graph.num_nodes == 0:
        raise ValueError("graph has no nodes")
    teleport = np.full(graph.num_nodes, 1.0 / graph.num_nodes)
    return _iterate(graph, teleport, config, metric)


def weighted_pagerank(
    graph: CoauthorGraph,
    weights: Mapping[str, float],
    config: MetricConfig,
    metric: str = "pr-w",
) -> ScoreMap:
    """Propagation scores with teleport mass proportional to per-author weights.

    Weights must cover every node, be non-negative, and not all be zero.
    Rescaling all weights by a positive constant leaves scores unchanged.
    """
    if graph.num_nodes == 0:
        raise ValueError("graph has no nodes")
    missing = [node for node in graph.nodes if node not in weights]
    if missing:
        raise ValueError(f"weights missing for {len(missing)} node(s), e.g. {missing[0]!r}")
    raw = np.array([float(weights[node]) for node in graph.nodes])
    if np.any(raw < 0):
        raise ValueError("weights must be non-negative")
    total = raw.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    return _iterate(graph, raw / total, config, metric)


def rank_authors(scores: ScoreMap) -> Ranking:
    """Order descending by score; tied scores share the minimum position."""
    if not scores.scores:
        raise ValueError("cannot rank an empty score map")
    for author_id, value in scores.scores.items():
        if not math.isfinite(value):
            raise ValueError(f"non-finite score {value!r} for {author_id!r}")
    ordered = tuple(sorted(scores.scores, key=lambda a: (-scores.scores[a], a)))
    positions: dict[str, int] = {}
    for index, author_id in enumerate(ordered):
        previous = ordered[index - 1] if index else None
        if previous is not None and scores.scores[previous] == scores.scores[author_id]:
            positions[author_id] = positions[previous]
        else:
            positions[author_id] = index + 1
    return Ranking(
        metric=scores.metric, ordered=ordered, positions=positions, scores=dict(scores.scores)
    )


def compute_metric(
    corpus: Corpus, graph: CoauthorGraph, metric: str, config: MetricConfig
) -> ScoreMap:
    """Score every corpus author under one of the named metrics."""
    if metric == "h":
        values = {
            a: float(h_index([p.citations or 0 for p in corpus.papers_of(a)]))
            for a in corpus.authors
        }
    elif metric == "infl":
        values = {a: float(infl_and_coa(corpus, a)[0]) for a in corpus.authors}
    elif metric == "coa":
        values = {a: float(infl_and_coa(corpus, a)[1]) for a in corpus.authors}
    elif metric == "frac":
        values = {a: frac_credit(corpus, a) for a in corpus.authors}
    elif metric == "harm":
        values = {a: harm_credit(corpus, a) for a in corpus.authors}
    elif metric == "pr":
        return pagerank(graph, config)
    elif metric == "pr-publ":
        return weighted_pagerank(graph, author_weights(corpus, "publications"), config, metric)
    elif metric == "pr-cite":
        return weighted_pagerank(graph, author_weights(corpus, "citations"), config, metric)
    else:
        raise ValueError(f"unknown metric {metric!r}; expected one of {ALL_METRICS}")
    return ScoreMap(metric=metric, scores=values)


def write_ranking_csv(ranking: Ranking, path: str | Path) -> None:
    """Write `author,score,rank` rows, scores at 10 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["author", "score", "rank"])
        for author_id in ranking.ordered:
            writer.writerow(
                [author_id, format(ranking.scores[author_id], ".10g"), ranking.positions[author_id]]
            )
