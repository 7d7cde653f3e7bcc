"""Undirected weighted coauthorship graph.

Nodes are author keys; an edge joins two authors once they share a paper,
weighted by how many papers they share. Ranking iterations divide by the
unweighted degree (distinct collaborators), so edge multiplicities are
kept for reporting and export only.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations
from pathlib import Path

import numpy as np

from scholarank.corpus import Corpus


class CoauthorGraph:
    """Immutable adjacency structure over author keys.

    Nodes are held in sorted order so downstream array layouts (and
    therefore scores) are independent of input paper order.
    """

    def __init__(self, nodes, edge_weights: dict[tuple[str, str], int]):
        self.nodes: tuple[str, ...] = tuple(sorted(nodes))
        self._index = {node: i for i, node in enumerate(self.nodes)}
        self.edge_weights = dict(edge_weights)

        neighbor_sets: dict[str, set[str]] = {node: set() for node in self.nodes}
        for (a, b), weight in self.edge_weights.items():
            if a == b:
                raise ValueError(f"self-edge on {a!r}")
            if weight < 1:
                raise ValueError(f"edge ({a!r}, {b!r}) has weight {weight} < 1")
            neighbor_sets[a].add(b)
            neighbor_sets[b].add(a)
        self._neighbors = {node: tuple(sorted(ns)) for node, ns in neighbor_sets.items()}
        self._csr: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edge_weights)

    def neighbors(self, author_id: str) -> tuple[str, ...]:
        return self._neighbors[author_id]

    def degree(self, author_id: str) -> int:
        """Number of distinct collaborators; raises KeyError for unknown authors."""
        return len(self._neighbors[author_id])

    def edge_weight(self, a: str, b: str) -> int:
        """Papers coauthored by a and b (0 when not adjacent)."""
        if a not in self._index or b not in self._index:
            raise KeyError(a if a not in self._index else b)
        return self.edge_weights.get((min(a, b), max(a, b)), 0)

    def node_index(self, author_id: str) -> int:
        return self._index[author_id]

    def to_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency as (indptr, indices) int64 arrays over sorted node order."""
        if self._csr is None:
            indptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
            chunks = []
            for i, node in enumerate(self.nodes):
                row = np.fromiter(
                    (self._index[nb] for nb in self._neighbors[node]),
                    dtype=np.int64,
                    count=len(self._neighbors[node]),
                )
                chunks.append(row)
                indptr[i + 1] = indptr[i] + row.size
            indices = (
                np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
            )
            self._csr = (indptr, indices)
        return self._csr

    def write_edge_list(self, path: str | Path) -> None:
        """Export edges as tab-separated `a b weight` lines, sorted."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for (a, b) in sorted(self.edge_weights):
                fh.write(f"{a}\t{b}\t{self.edge_weights[(a, b)]}\n")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoauthorGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edge_weights == other.edge_weights

    def __repr__(self) -> str:
        return f"CoauthorGraph(nodes={self.num_nodes}, edges={self.num_edges})"


def build_coauthor_graph(corpus: Corpus) -> CoauthorGraph:
    """Pair up the byline of every paper; single-author-only authors stay as isolated nodes."""
    weights: Counter[tuple[str, str]] = Counter()
    for paper in corpus.papers:
        for a, b in combinations(paper.author_ids, 2):
            weights[(min(a, b), max(a, b))] += 1
    return CoauthorGraph(nodes=corpus.authors.keys(), edge_weights=dict(weights))
