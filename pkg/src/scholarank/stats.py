"""Comparative analyses over rankings: effect sizes, overlap, and stability.

The building blocks are a Vargha-Delaney A12 effect size with a
triviality threshold, a median-ordered grouping of sample cells, ranking
overlap at a top fraction, and a theta sweep whose rank movements are
summarized with a Kendall-style concordance statistic.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import median

from scholarank.corpus import COAUTHOR_BUCKETS, Corpus, coauthor_bucket
from scholarank.graph import CoauthorGraph
from scholarank.metrics import (
    ConvergenceError,
    MetricConfig,
    Ranking,
    ScoreMap,
    pagerank,
    rank_authors,
    weighted_pagerank,
)

DEFAULT_THETA_GRID = tuple(round(0.05 * i, 2) for i in range(21))


@dataclass(frozen=True)
class StatsConfig:
    """Thresholds and grids for the comparison analyses.

    a12_threshold: two samples differ trivially when max(A, 1-A) stays
    below it. top_fraction: share of authors compared in overlap tables.
    theta_grid: strictly increasing theta values for sweeps.
    """

    a12_threshold: float = 0.56
    top_fraction: float = 0.01
    theta_grid: tuple[float, ...] = DEFAULT_THETA_GRID

    def __post_init__(self):
        if not 0.5 <= self.a12_threshold <= 1.0:
            raise ValueError(f"a12_threshold must be in [0.5, 1], got {self.a12_threshold}")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ValueError(f"top_fraction must be in (0, 1], got {self.top_fraction}")
        object.__setattr__(self, "theta_grid", tuple(self.theta_grid))
        if any(b <= a for a, b in zip(self.theta_grid, self.theta_grid[1:])):
            raise ValueError("theta_grid must be strictly increasing")
        if self.theta_grid and not (
            0.0 <= self.theta_grid[0] and self.theta_grid[-1] <= 1.0
        ):
            raise ValueError("theta_grid values must lie in [0, 1]")


@dataclass(frozen=True)
class EffectCell:
    """One labeled sample with its median and assigned group index."""

    label: str
    samples: tuple[float, ...]
    median: float
    group: int


@dataclass(frozen=True)
class EffectGroup:
    """Cells sorted by median with group indices (1 = lowest median group)."""

    key: object
    cells: tuple[EffectCell, ...]


def a12_effect(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Probability-of-superiority effect size (g + e/2) / (m*n).

    g counts pairs with x > y and e pairs with x == y over all pairs
    drawn one from each list. 0.5 means no separation.
    """
    if not xs or not ys:
        raise ValueError("a12_effect requires two non-empty samples")
    sorted_ys = sorted(ys)
    greater = 0
    equal = 0
    for x in xs:
        lo = bisect_left(sorted_ys, x)
        greater += lo
        equal += bisect_right(sorted_ys, x) - lo
    return (greater + 0.5 * equal) / (len(xs) * len(ys))


def is_trivial_effect(a12: float, threshold: float = 0.56) -> bool:
    """True when the scaled effect max(A, 1-A) stays under the threshold."""
    return max(a12, 1.0 - a12) < threshold


def partition_by_effect(
    cells: Sequence[tuple[str, Sequence[float]]],
    config: StatsConfig,
    key: object = None,
) -> EffectGroup:
    """Group cells whose samples are pairwise indistinguishable.

    Cells are sorted by median; a cell joins the current group only if its
    effect size against every member is trivially small, so group members
    are pairwise indistinguishable. Group indices follow median order.
    """
    for label, samples in cells:
        if not samples:
            raise ValueError(f"cell {label!r} has no samples")
    by_median = sorted(
        ((label, tuple(samples), median(samples)) for label, samples in cells),
        key=lambda item: (item[2], item[0]),
    )
    grouped: list[EffectCell] = []
    group_index = 0
    current_members: list[tuple[float, ...]] = []
    for label, samples, cell_median in by_median:
        joins = current_members and all(
            is_trivial_effect(a12_effect(samples, member), config.a12_threshold)
            for member in current_members
        )
        if not joins:
            group_index += 1
            current_members = []
        current_members.append(samples)
        grouped.append(EffectCell(label=label, samples=samples, median=cell_median, group=group_index))
    return EffectGroup(key=key, cells=tuple(grouped))


def median_cites_by_coauthors(corpus: Corpus, config: StatsConfig) -> dict[int, EffectGroup]:
    """Per-year grouping of average-cites-per-year by coauthor-count bucket.

    Each paper contributes citations / (reference_year - publication year
    + 1), with unknown counts contributing 0; empty buckets are absent.
    """
    samples: dict[int, dict[str, list[float]]] = {}
    for paper in corpus.papers:
        span = max(1, corpus.reference_year - paper.year + 1)
        value = (paper.citations or 0) / span
        samples.setdefault(paper.year, {}).setdefault(
            coauthor_bucket(len(paper.author_ids)), []
        ).append(value)
    return {
        year: partition_by_effect(
            [(bucket, buckets[bucket]) for bucket in COAUTHOR_BUCKETS if bucket in buckets],
            config,
            key=year,
        )
        for year, buckets in sorted(samples.items())
    }


def _check_same_authors(a: Ranking, b: Ranking) -> None:
    if a.author_set() != b.author_set():
        raise ValueError("rankings cover different author sets")


def top_fraction_overlap(a: Ranking, b: Ranking, fraction: float) -> float:
    """Percentage of shared authors in the top ceil(fraction * N) of both rankings."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    _check_same_authors(a, b)
    n = len(a.ordered)
    # the 1e-9 slack keeps float fuzz (0.01 * 200 -> 2.0000000000000004)
    # from bumping the cutoff past the intended ceil(fraction * n)
    k = max(1, min(n, math.ceil(fraction * n - 1e-9)))
    return 100.0 * len(set(a.top(k)) & set(b.top(k))) / k


@dataclass(frozen=True)
class OverlapMatrix:
    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # symmetric, diagonal 100


def overlap_matrix(rankings: Sequence[tuple[str, Ranking]], fraction: float) -> OverlapMatrix:
    """Pairwise top-fraction overlap between labeled rankings."""
    if len(rankings) < 2:
        raise ValueError("overlap_matrix requires at least two rankings")
    labels = tuple(label for label, _ in rankings)
    n = len(rankings)
    values = [[100.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            overlap = top_fraction_overlap(rankings[i][1], rankings[j][1], fraction)
            values[i][j] = overlap
            values[j][i] = overlap
    return OverlapMatrix(labels=labels, values=tuple(tuple(row) for row in values))


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    scores: ScoreMap


def theta_sweep(
    graph: CoauthorGraph,
    weights: dict[str, float] | None,
    config: StatsConfig,
    metric_config: MetricConfig,
) -> list[SweepPoint]:
    """One converged score map per grid theta, computed independently.

    ``weights=None`` runs the uniform-teleport variant. Non-convergence at
    any grid point raises with that theta attached.
    """
    points: list[SweepPoint] = []
    for theta in config.theta_grid:
        point_config = replace(metric_config, theta=theta)
        try:
            if weights is None:
                scores = pagerank(graph, point_config)
            else:
                scores = weighted_pagerank(graph, weights, point_config)
        except ConvergenceError as exc:
            hint = ""
            if theta >= 1.0:
                # bipartite components (e.g. 3-author collaboration
                # chains) oscillate forever once the restart term is gone
                hint = "; graphs with bipartite components oscillate at theta=1, end the grid at 0.95"
            raise ConvergenceError(
                f"sweep point theta={theta}: {exc}{hint}",
                iterations=exc.iterations,
                residual=exc.residual,
                theta=theta,
            ) from exc
        points.append(SweepPoint(theta=theta, scores=scores))
    return points


def kendall_tau(a: Ranking, b: Ranking) -> float:
    """Concordance between two rankings over the same authors, in [0, 1].

    Defined as 1 - 2*D/(n*(n-1)) where D counts author pairs ordered
    strictly oppositely by the two rankings; pairs tied in either ranking
    are not discordant. Identical rankings give 1.
    """
    _check_same_authors(a, b)
    authors = sorted(a.author_set())
    n = len(authors)
    if n < 2:
        return 1.0
    pairs = sorted((a.positions[x], b.positions[x]) for x in authors)
    discordant = _count_strict_inversions([b_pos for _, b_pos in pairs])
    return 1.0 - 2.0 * discordant / (n * (n - 1))


def _count_strict_inversions(values: list[int]) -> int:
    """Pairs i < j with values[i] > values[j], by merge sort.

    Items sorted by the primary key arrive here in (primary, secondary)
    ascending order, so equal-primary pairs are already non-decreasing and
    never counted.
    """
    if len(values) < 2:
        return 0
    buffer = list(values)
    scratch = [0] * len(values)

    def merge_count(lo: int, hi: int) -> int:
        if hi - lo < 2:
            return 0
        mid = (lo + hi) // 2
        count = merge_count(lo, mid) + merge_count(mid, hi)
        i, j, out = lo, mid, lo
        while i < mid and j < hi:
            if buffer[i] <= buffer[j]:
                scratch[out] = buffer[i]
                i += 1
            else:
                scratch[out] = buffer[j]
                count += mid - i
                j += 1
            out += 1
        scratch[out:hi] = buffer[i:mid] if i < mid else buffer[j:hi]
        buffer[lo:hi] = scratch[lo:hi]
        return count

    return merge_count(0, len(values))


@dataclass(frozen=True)
class StabilityStep:
    theta_from: float
    theta_to: float
    kendall_tau: float
    max_displacement: int


@dataclass(frozen=True)
class StabilityReport:
    top_k: int
    steps: tuple[StabilityStep, ...]


def rank_stability(sweep: Sequence[SweepPoint], top_k: int = 20) -> StabilityReport:
    """Rank movement between consecutive sweep points.

    For each step: the concordance statistic over the full rankings, and
    the largest rank displacement among the authors ranked in the top_k
    at the step's starting theta.
    """
    if len(sweep) < 2:
        raise ValueError("rank_stability requires a sweep with at least two points")
    rankings = [rank_authors(point.scores) for point in sweep]
    steps = []
    for previous, current, r_prev, r_curr in zip(sweep, sweep[1:], rankings, rankings[1:]):
        tau = kendall_tau(r_prev, r_curr)
        displacement = max(
            abs(r_prev.positions[author] - r_curr.positions[author])
            for author in r_prev.top(top_k)
        )
        steps.append(
            StabilityStep(
                theta_from=previous.theta,
                theta_to=current.theta,
                kendall_tau=tau,
                max_displacement=displacement,
            )
        )
    return StabilityReport(top_k=top_k, steps=tuple(steps))


def write_overlap_csv(matrix: OverlapMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", *matrix.labels])
        for label, row in zip(matrix.labels, matrix.values):
            writer.writerow([label, *(format(v, ".10g") for v in row)])


def write_sweep_csv(sweep: Sequence[SweepPoint], path: str | Path) -> None:
    """Per-theta trajectories as `theta,author,score,rank` rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "author", "score", "rank"])
        for point in sweep:
            ranking = rank_authors(point.scores)
            for author_id in ranking.ordered:
                writer.writerow(
                    [
                        format(point.theta, ".10g"),
                        author_id,
                        format(ranking.scores[author_id], ".10g"),
                        ranking.positions[author_id],
                    ]
                )


def write_stability_csv(report: StabilityReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta_from", "theta_to", "kendall_tau", "max_displacement"])
        for step in report.steps:
            writer.writerow(
                [
                    format(step.theta_from, ".10g"),
                    format(step.theta_to, ".10g"),
                    format(step.kendall_tau, ".10g"),
                    step.max_displacement,
                ]
            )
