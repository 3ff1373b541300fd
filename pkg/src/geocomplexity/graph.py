"""Graphs embedded in data space and the complexity measures defined on them."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, GraphError


def _norm_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class EmbeddedGraph:
    """Undirected graph whose nodes carry positions in R^d.

    Node ids are the dense integers ``0..n-1`` (row index into ``positions``).
    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``, kept in a
    sorted tuple so that iteration order is deterministic.
    """

    def __init__(self, positions, edges: Iterable[Sequence[int]] = ()):
        pos = np.array(positions, dtype=float)
        if pos.ndim == 1:
            pos = pos.reshape(1, -1) if pos.size else pos.reshape(0, 0)
        if pos.ndim != 2:
            raise DimensionMismatchError()
        n = pos.shape[0]
        es: set[tuple[int, int]] = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) references unknown node")
            key = _norm_edge(i, j)
            if key in es:
                raise GraphError(f"duplicate edge {key}")
            es.add(key)
        self.positions = pos
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(es))
        self._adj: list[list[int]] | None = None

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
            for i, j in self.edges:
                adj[i].append(j)
                adj[j].append(i)
            for a in adj:
                a.sort()
            self._adj = adj
        return self._adj

    def neighbours(self, node: int) -> list[int]:
        self._check_node(node)
        return self.adjacency()[node]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n_nodes == 0:
            return False
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_nodes

    def is_tree(self) -> bool:
        return self.is_connected() and self.n_edges == self.n_nodes - 1

    def copy(self) -> EmbeddedGraph:
        return EmbeddedGraph(self.positions.copy(), self.edges)

    def with_positions(self, positions) -> EmbeddedGraph:
        g = EmbeddedGraph.__new__(EmbeddedGraph)
        g.positions = np.array(positions, dtype=float)
        g.edges = self.edges
        g._adj = self._adj
        return g

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays ``(A, B)`` of all edges; isolated graphs give degenerate segments."""
        if self.edges:
            idx = np.array(self.edges, dtype=int)
            return self.positions[idx[:, 0]], self.positions[idx[:, 1]]
        return self.positions, self.positions

    def _check_node(self, node: int) -> None:
        if not (0 <= int(node) < self.n_nodes):
            raise GraphError(f"unknown node id {node}")

    def __repr__(self) -> str:
        return f"EmbeddedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges}, dimension={self.dimension})"

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "nodes": self.positions.tolist(),
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> EmbeddedGraph:
        nodes = obj["nodes"]
        d = int(obj["dimension"])
        pos = np.array(nodes, dtype=float).reshape(len(nodes), d) if nodes else np.zeros((0, d))
        return cls(pos, obj.get("edges", []))

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load_json(cls, path) -> EmbeddedGraph:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class Star:
    center: int
    leaves: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.leaves)


@dataclass(frozen=True)
class Barcode:
    """Star counts from the highest order down to 3, plus the node count."""

    star_counts: tuple[int, ...]
    node_count: int

    def __str__(self) -> str:
        return "|".join(str(c) for c in self.star_counts) + "||" + str(self.node_count)


def star_of(graph: EmbeddedGraph, node: int) -> Star:
    return Star(int(node), tuple(graph.neighbours(node)))


def node_count(graph: EmbeddedGraph) -> int:
    return graph.n_nodes


def graph_length(graph: EmbeddedGraph) -> float:
    """Sum of Euclidean edge lengths."""
    if not graph.edges:
        return 0.0
    a, b = graph.segments()
    return float(np.linalg.norm(a - b, axis=1).sum())


def star_nonharmonicity(graph: EmbeddedGraph, node: int) -> float:
    """Squared distance from a node to the centroid of its neighbours (0 for degree <= 1)."""
    leaves = graph.neighbours(node)
    if len(leaves) <= 1:
        return 0.0
    dev = graph.positions[node] - graph.positions[leaves].mean(axis=0)
    return float(dev @ dev)


def nonharmonicities(graph: EmbeddedGraph) -> np.ndarray:
    """Vector of :func:`star_nonharmonicity` over all nodes."""
    n = graph.n_nodes
    if n == 0:
        return np.zeros(0)
    sums = np.zeros_like(graph.positions)
    deg = graph.degrees()
    if graph.edges:
        idx = np.array(graph.edges, dtype=int)
        np.add.at(sums, idx[:, 0], graph.positions[idx[:, 1]])
        np.add.at(sums, idx[:, 1], graph.positions[idx[:, 0]])
    out = np.zeros(n)
    mask = deg >= 2
    if mask.any():
        dev = graph.positions[mask] - sums[mask] / deg[mask, None]
        out[mask] = np.einsum("ij,ij->i", dev, dev)
    return out


def geometrical_complexity(graph: EmbeddedGraph) -> float:
    """GC = n^2 * sum of star non-harmonicities, n being the number of nodes."""
    n = graph.n_nodes
    return float(n * n * nonharmonicities(graph).sum())


def structural_barcode(graph: EmbeddedGraph, min_max_order: int = 3) -> Barcode:
    """Count k-stars for k = max(min_max_order, max degree) down to 3.

    >>> str(structural_barcode(EmbeddedGraph([[0, 0], [1, 0], [0, 1], [-1, -1]], [(0, 1), (0, 2), (0, 3)]), 4))
    '0|1||4'
    """
    deg = graph.degrees()
    top = max(int(min_max_order), int(deg.max()) if deg.size else 0)
    counts = tuple(int((deg == k).sum()) for k in range(top, 2, -1))
    return Barcode(counts, graph.n_nodes)


def chain_graph(positions) -> EmbeddedGraph:
    """Path graph over ``positions`` in order."""
    pos = np.asarray(positions, dtype=float)
    return EmbeddedGraph(pos, [(i, i + 1) for i in range(len(pos) - 1)])
