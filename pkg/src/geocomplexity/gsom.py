"""Growing self-organizing polygonal line (linear GSOM).

The map is a 1-D grid of nodes trained with the batch SOM rule and a
triangular (linear B-spline) neighbourhood kernel. Growth only happens at
the two ends, by mirroring the end edge outward.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .accuracy import (
    Dataset,
    first_principal_component,
    squared_distances_to_graph,
    squared_distances_to_segments,
)
from .errors import GraphError
from .graph import EmbeddedGraph, chain_graph
from .report import CONVERGED, STALLED, FitReport


@dataclass
class SomConfig:
    neighbourhood_radius: float = 3.0
    fvu_threshold: float = 0.001
    max_batch_iterations: int = 100
    convergence_tol: float = 1e-4
    max_nodes: int = 1000
    min_relative_gain: float = 1e-3

    def __post_init__(self):
        if not self.neighbourhood_radius > 0:
            raise ValueError("neighbourhood_radius must be positive")
        if not 0 < self.fvu_threshold < 1:
            raise ValueError("fvu_threshold must lie in (0, 1)")
        if self.max_batch_iterations < 1 or self.max_nodes < 2:
            raise ValueError("max_batch_iterations must be >= 1 and max_nodes >= 2")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if not 0 <= self.min_relative_gain < 1:
            raise ValueError("min_relative_gain must lie in [0, 1)")


@dataclass
class Chain:
    """Polygonal line; row ``j`` of ``nodes`` sits at grid coordinate ``j``."""

    nodes: np.ndarray

    def __post_init__(self):
        self.nodes = np.array(self.nodes, dtype=float)
        if self.nodes.ndim != 2:
            raise ValueError("chain nodes must be a (k, d) array")

    def __len__(self) -> int:
        return self.nodes.shape[0]

    def to_graph(self) -> EmbeddedGraph:
        return chain_graph(self.nodes)

    @classmethod
    def from_graph(cls, graph: EmbeddedGraph) -> Chain:
        """Recover grid order from a path graph."""
        if graph.n_nodes == 1:
            return cls(graph.positions.copy())
        deg = graph.degrees()
        ends = np.flatnonzero(deg == 1)
        if not graph.is_tree() or len(ends) != 2 or deg.max() > 2:
            raise GraphError("graph is not a simple path")
        adj = graph.adjacency()
        order = [int(ends[0])]
        prev = -1
        while len(order) < graph.n_nodes:
            cur = order[-1]
            nxt = [w for w in adj[cur] if w != prev][0]
            prev = cur
            order.append(nxt)
        return cls(graph.positions[order])


def neighbourhood_weight(grid_distance, radius: float):
    """Triangular kernel ``max(0, 1 - d / r)``; vectorized over ``grid_distance``."""
    w = np.maximum(0.0, 1.0 - np.asarray(grid_distance, dtype=float) / radius)
    return float(w) if w.ndim == 0 else w


def best_matching_units(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Index of the nearest node for each point; ties go to the lowest index."""
    d2 = (
        np.einsum("ij,ij->i", points, points)[:, None]
        - 2.0 * points @ nodes.T
        + np.einsum("ij,ij->i", nodes, nodes)[None, :]
    )
    return np.argmin(d2, axis=1)


def _kernel_matrix(k: int, radius: float) -> np.ndarray:
    g = np.arange(k)
    return neighbourhood_weight(np.abs(g[:, None] - g[None, :]), radius)


def _batch_update(nodes: np.ndarray, points: np.ndarray, bmu: np.ndarray, radius: float) -> np.ndarray:
    k, d = nodes.shape
    counts = np.bincount(bmu, minlength=k).astype(float)
    sums = np.stack([np.bincount(bmu, weights=points[:, c], minlength=k) for c in range(d)], axis=1)
    h = _kernel_matrix(k, radius)
    num = h @ sums
    den = h @ counts
    out = nodes.copy()
    live = den > 0.0
    out[live] = num[live] / den[live, None]
    return out


def batch_som_step(chain: Chain, data: Dataset, cfg: SomConfig) -> Chain:
    """One batch SOM epoch: BMU assignment, then kernel-weighted means."""
    if len(chain) < 2:
        raise GraphError("chain must have at least 2 nodes")
    bmu = best_matching_units(chain.nodes, data.points)
    return Chain(_batch_update(chain.nodes, data.points, bmu, cfg.neighbourhood_radius))


def batch_som_optimize(chain: Chain, data: Dataset, cfg: SomConfig) -> Chain:
    """Repeat :func:`batch_som_step` until the largest node move is below
    ``convergence_tol * diameter`` or the iteration budget runs out."""
    tol = cfg.convergence_tol * data.diameter()
    current = chain
    for _ in range(cfg.max_batch_iterations):
        nxt = batch_som_step(current, data, cfg)
        shift = np.linalg.norm(nxt.nodes - current.nodes, axis=1).max()
        current = nxt
        if shift < tol:
            break
    return current


def front_extension(nodes: np.ndarray) -> np.ndarray:
    return 2.0 * nodes[0] - nodes[1]


def back_extension(nodes: np.ndarray) -> np.ndarray:
    return 2.0 * nodes[-1] - nodes[-2]


def _fvu_with_segment(d2: np.ndarray, data: Dataset, a: np.ndarray, b: np.ndarray) -> float:
    extra = squared_distances_to_segments(data.points, a[None, :], b[None, :])[:, 0]
    return float(np.minimum(d2, extra).sum() / data.total_variance)


def grow_candidates(chain: Chain, data: Dataset) -> tuple[float, float, float]:
    """FVU after gluing a mirrored edge at the front, at the back, and as is.

    Returns ``(bfvu, efvu, cfvu)``. Node positions are not re-optimized.
    """
    if len(chain) < 2:
        raise GraphError("chain must have at least 2 nodes")
    data.require_nondegenerate()
    y = chain.nodes
    d2 = squared_distances_to_graph(data, chain.to_graph())
    cfvu = float(d2.sum() / data.total_variance)
    bfvu = _fvu_with_segment(d2, data, front_extension(y), y[0])
    efvu = _fvu_with_segment(d2, data, y[-1], back_extension(y))
    return bfvu, efvu, cfvu


@dataclass
class GrowthEvent:
    n_nodes: int
    cfvu: float
    bfvu: float
    efvu: float
    action: str  # "front", "back", "stop" or "stall"


@dataclass
class GsomTrace:
    events: list[GrowthEvent] = field(default_factory=list)


def initial_chain(data: Dataset) -> Chain:
    """Two nodes at ``mean -/+ sigma_1 * e_1`` on the first principal component."""
    line, sigma = first_principal_component(data)
    return Chain(np.stack([line.base - sigma * line.direction, line.base + sigma * line.direction]))


def fit_gsom(data: Dataset, cfg: SomConfig | None = None, trace: GsomTrace | None = None) -> tuple[Chain, FitReport]:
    """Grow a SOM chain until its FVU reaches ``cfg.fvu_threshold``.

    A candidate end extension is accepted only if it lowers the FVU by more
    than ``min_relative_gain`` (relative to the current FVU). If neither end
    qualifies, or ``max_nodes`` is reached, the fit stops as ``stalled``.
    """
    cfg = cfg or SomConfig()
    t0 = time.perf_counter()
    keep = 1.0 - cfg.min_relative_gain
    data.require_nondegenerate()
    chain = initial_chain(data)
    while True:
        chain = batch_som_optimize(chain, data, cfg)
        bfvu, efvu, cfvu = grow_candidates(chain, data)
        if cfvu <= cfg.fvu_threshold:
            action, status = "stop", CONVERGED
        elif len(chain) >= cfg.max_nodes:
            action, status = "stall", STALLED
        elif bfvu < efvu and bfvu < keep * cfvu:
            action, status = "front", None
        elif efvu <= bfvu and efvu < keep * cfvu:
            action, status = "back", None
        else:
            action, status = "stall", STALLED
        if trace is not None:
            trace.events.append(GrowthEvent(len(chain), cfvu, bfvu, efvu, action))
        if status is not None:
            break
        y = chain.nodes
        if action == "front":
            chain = Chain(np.vstack([front_extension(y)[None, :], y]))
        else:
            chain = Chain(np.vstack([y, back_extension(y)[None, :]]))
    ms = int(round((time.perf_counter() - t0) * 1000))
    report = FitReport.measure(chain.to_graph(), cfvu, method="GSOM", status=status, wall_time_ms=ms)
    return chain, report
