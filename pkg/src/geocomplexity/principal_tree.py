"""Elastic principal trees grown by graph grammars.

Node positions minimize the elastic energy

    U = (1/N) sum_i ||x_i - v_K(i)||^2            (approximation)
      + lambda * sum_edges ||v_a - v_b||^2         (stretching)
      + mu * sum_stars(k>=2) ||sum_l v_l - k v_0||^2   (bending)

where ``K(i)`` is the node nearest to ``x_i``. For a fixed partition the
energy is quadratic in the node positions and is minimized by one linear
solve shared by all coordinates. The tree topology evolves by the schedule
grow, grow, grow, shrink; each step applies whichever grammar operation
gives the lowest energy.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .accuracy import Dataset, first_principal_component, fvu_graph
from .errors import GeoComplexityError, GraphError
from .graph import EmbeddedGraph
from .gsom import initial_chain
from .report import CONVERGED, STALLED, FitReport

ADD_LEAF = "add_leaf"
BISECT_EDGE = "bisect_edge"
REMOVE_LEAF = "remove_leaf"
CONTRACT_EDGE = "contract_edge"

GROWING = "growing"
SHRINKING = "shrinking"

# candidates whose energies agree to this relative precision count as tied
TIE_RTOL = 1e-12


@dataclass
class ElasticConfig:
    lambda_stretch: float = 0.01
    mu_bend: float = 0.001
    fvu_threshold: float = 0.001
    max_outer_iterations: int = 400
    optimize_tol: float = 1e-4
    max_optimize_iterations: int = 100

    def __post_init__(self):
        if not (self.lambda_stretch > 0 and self.mu_bend > 0):
            raise ValueError("elastic moduli must be positive")
        if not 0 < self.fvu_threshold < 1:
            raise ValueError("fvu_threshold must lie in (0, 1)")
        if self.max_outer_iterations < 1 or self.max_optimize_iterations < 1:
            raise ValueError("iteration limits must be positive")


@dataclass
class Partition:
    """Nearest-node assignment of data points (ties to the lowest node id)."""

    assignment: np.ndarray
    n_nodes: int

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_nodes)

    def members(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == node)


def _distance_table(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``||v_j||^2 - 2 x_i . v_j``: squared distance up to a per-point constant."""
    return np.einsum("ij,ij->i", v, v)[None, :] - 2.0 * x @ v.T


def partition(graph: EmbeddedGraph, data: Dataset) -> Partition:
    return Partition(np.argmin(_distance_table(data.points, graph.positions), axis=1), graph.n_nodes)


@dataclass(frozen=True)
class GrammarOp:
    kind: str
    site: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind}{self.site}"


@dataclass(frozen=True)
class Energy:
    total: float
    approx: float
    stretch: float
    bend: float


def _laplacian(graph: EmbeddedGraph) -> np.ndarray:
    n = graph.n_nodes
    lap = np.zeros((n, n))
    if graph.edges:
        idx = np.array(graph.edges)
        lap[idx[:, 0], idx[:, 1]] = -1.0
        lap[idx[:, 1], idx[:, 0]] = -1.0
        np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def _star_operator(graph: EmbeddedGraph) -> np.ndarray:
    """Rows ``sum_l e_l - k e_0`` for every star of degree >= 2."""
    lap = _laplacian(graph)
    deg = np.diag(lap)
    return -lap[deg >= 2]


def elastic_energy(graph: EmbeddedGraph, data: Dataset, part: Partition, cfg: ElasticConfig) -> Energy:
    if part.n_nodes != graph.n_nodes or part.assignment.shape != (data.n,):
        raise GeoComplexityError("partition is inconsistent with graph and data")
    if part.assignment.size and (part.assignment.min() < 0 or part.assignment.max() >= graph.n_nodes):
        raise GeoComplexityError("partition is inconsistent with graph and data")
    v = graph.positions
    r = data.points - v[part.assignment]
    approx = float(np.einsum("ij,ij->", r, r) / data.n)
    if graph.edges:
        idx = np.array(graph.edges)
        e = v[idx[:, 0]] - v[idx[:, 1]]
        stretch = cfg.lambda_stretch * float(np.einsum("ij,ij->", e, e))
    else:
        stretch = 0.0
    bv = _star_operator(graph) @ v
    bend = cfg.mu_bend * float(np.einsum("ij,ij->", bv, bv))
    return Energy(approx + stretch + bend, approx, stretch, bend)


def graph_energy(graph: EmbeddedGraph, data: Dataset, cfg: ElasticConfig) -> Energy:
    """Elastic energy with the nearest-node partition of ``graph``."""
    return elastic_energy(graph, data, partition(graph, data), cfg)


def system_matrix(graph: EmbeddedGraph, part: Partition, n_data: int, cfg: ElasticConfig) -> np.ndarray:
    b = _star_operator(graph)
    return (
        np.diag(part.counts / n_data)
        + cfg.lambda_stretch * _laplacian(graph)
        + cfg.mu_bend * (b.T @ b)
    )


def solve_positions(graph: EmbeddedGraph, data: Dataset, part: Partition, cfg: ElasticConfig) -> EmbeddedGraph:
    """Exact minimizer of the elastic energy over node positions for a fixed partition."""
    a = system_matrix(graph, part, data.n, cfg)
    k = graph.n_nodes
    rhs = np.stack(
        [np.bincount(part.assignment, weights=data.points[:, c], minlength=k) for c in range(data.dimension)],
        axis=1,
    ) / data.n
    try:
        factor = scipy.linalg.cho_factor(a)
    except np.linalg.LinAlgError as exc:
        raise GeoComplexityError("elastic system is singular") from exc
    return graph.with_positions(scipy.linalg.cho_solve(factor, rhs))


@dataclass
class OptimizeTrace:
    energies: list[float] = field(default_factory=list)


def optimize_graph(graph: EmbeddedGraph, data: Dataset, cfg: ElasticConfig,
                   trace: OptimizeTrace | None = None) -> EmbeddedGraph:
    """Alternate nearest-node partitioning and exact position solves.

    Stops once the relative energy decrease drops below ``cfg.optimize_tol``.
    """
    current = graph
    part = partition(current, data)
    energy = elastic_energy(current, data, part, cfg).total
    if trace is not None:
        trace.energies.append(energy)
    for _ in range(cfg.max_optimize_iterations):
        candidate = solve_positions(current, data, part, cfg)
        new_part = partition(candidate, data)
        new_energy = elastic_energy(candidate, data, new_part, cfg).total
        if new_energy > energy:
            # only rounding can get here; keep the better embedding
            break
        current, part = candidate, new_part
        if trace is not None:
            trace.energies.append(new_energy)
        done = energy - new_energy <= cfg.optimize_tol * abs(energy)
        energy = new_energy
        if done:
            break
    return current


def enumerate_grammar(graph: EmbeddedGraph, grammar: str) -> list[GrammarOp]:
    if grammar == GROWING:
        ops = [GrammarOp(ADD_LEAF, (v,)) for v in range(graph.n_nodes)]
        kind = BISECT_EDGE
    elif grammar == SHRINKING:
        deg = graph.degrees()
        ops = [GrammarOp(REMOVE_LEAF, (int(v),)) for v in np.flatnonzero(deg == 1)]
        kind = CONTRACT_EDGE
    else:
        raise ValueError(f"unknown grammar {grammar!r}")
    return ops + [GrammarOp(kind, e) for e in graph.edges]


def _drop_node(positions: np.ndarray, edges, gone: int) -> EmbeddedGraph:
    keep = np.arange(positions.shape[0]) != gone
    remap = lambda i: i - 1 if i > gone else i  # noqa: E731
    new_edges = [(remap(i), remap(j)) for i, j in edges if gone not in (i, j)]
    return EmbeddedGraph(positions[keep], new_edges)


def apply_grammar(graph: EmbeddedGraph, op: GrammarOp, fallback_offset=None) -> EmbeddedGraph:
    """Return a new graph with ``op`` applied; node ids are compacted after removals.

    ``fallback_offset`` is the displacement used by AddLeaf when the
    centroid mirror is degenerate (the node already sits at the centroid of
    its neighbours). It defaults to 1e-3 of the graph's bounding-box diagonal
    along the first axis.
    """
    pos = graph.positions
    n = graph.n_nodes
    if op.kind == ADD_LEAF:
        (v,) = op.site
        nb = graph.neighbours(v)
        if len(nb) == 1:
            new = 2.0 * pos[v] - pos[nb[0]]
        else:
            offset = pos[v] - pos[nb].mean(axis=0) if nb else np.zeros_like(pos[v])
            if not np.any(offset):
                offset = _default_fallback(graph) if fallback_offset is None else np.asarray(fallback_offset, float)
            new = pos[v] + offset
        return EmbeddedGraph(np.vstack([pos, new]), list(graph.edges) + [(v, n)])
    if op.kind == BISECT_EDGE:
        a, b = _check_edge(graph, op.site)
        edges = [e for e in graph.edges if e != (a, b)] + [(a, n), (n, b)]
        return EmbeddedGraph(np.vstack([pos, (pos[a] + pos[b]) / 2.0]), edges)
    if op.kind == REMOVE_LEAF:
        (v,) = op.site
        if len(graph.neighbours(v)) != 1:
            raise GraphError(f"node {v} is not a leaf")
        return _drop_node(pos, graph.edges, v)
    if op.kind == CONTRACT_EDGE:
        a, b = _check_edge(graph, op.site)
        merged = pos.copy()
        merged[a] = (pos[a] + pos[b]) / 2.0
        edges = set()
        for i, j in graph.edges:
            if (i, j) == (a, b):
                continue
            i, j = (a if i == b else i), (a if j == b else j)
            edges.add((min(i, j), max(i, j)))
        return _drop_node(merged, sorted(edges), b)
    raise GraphError(f"unknown grammar operation {op.kind!r}")


def _check_edge(graph: EmbeddedGraph, site) -> tuple[int, int]:
    a, b = sorted(int(s) for s in site)
    if (a, b) not in graph.edges:
        raise GraphError(f"no edge {(a, b)}")
    return a, b


def _default_fallback(graph: EmbeddedGraph) -> np.ndarray:
    pos = graph.positions
    scale = float(np.linalg.norm(pos.max(axis=0) - pos.min(axis=0))) or 1.0
    out = np.zeros(graph.dimension)
    out[0] = 1e-3 * scale
    return out


def score_candidate(graph: EmbeddedGraph, data: Dataset, cfg: ElasticConfig,
                    part: Partition | None = None) -> tuple[float, EmbeddedGraph]:
    """One partition-and-solve pass.

    Returns the energy of the solved positions under the partition used for
    the solve, and the solved graph.
    """
    part = partition(graph, data) if part is None else part
    solved = solve_positions(graph, data, part, cfg)
    return elastic_energy(solved, data, part, cfg).total, solved


def _candidate_partition(table: np.ndarray, nearest: np.ndarray, x: np.ndarray,
                         op: GrammarOp, cand: EmbeddedGraph) -> Partition:
    # same result as partition(cand, data), reusing the parent's distance table
    n = table.shape[1]
    if op.kind in (ADD_LEAF, BISECT_EDGE):
        v = cand.positions[n]
        col = v @ v - 2.0 * x @ v
        assign = np.where(col < table[np.arange(table.shape[0]), nearest], n, nearest)
        return Partition(assign, n + 1)
    if op.kind == REMOVE_LEAF:
        t = np.delete(table, op.site[0], axis=1)
    else:
        a, b = sorted(op.site)
        v = cand.positions[a]
        t = table.copy()
        t[:, a] = v @ v - 2.0 * x @ v
        t = np.delete(t, b, axis=1)
    return Partition(np.argmin(t, axis=1), n - 1)


def best_operation(graph: EmbeddedGraph, data: Dataset, cfg: ElasticConfig, grammar: str,
                   fallback_offset=None) -> tuple[GrammarOp, float] | None:
    """Lowest-energy operation of ``grammar``; ties keep the first in enumeration order.

    Different operations can yield the same tree (removing a leaf that owns no
    data, or contracting its edge), whose energies then differ only by
    rounding. Energies within ``TIE_RTOL`` of the best so far are treated as
    tied so that the choice does not hinge on the last bit.
    """
    table = _distance_table(data.points, graph.positions)
    nearest = np.argmin(table, axis=1)
    best = None
    for op in enumerate_grammar(graph, grammar):
        cand = apply_grammar(graph, op, fallback_offset)
        part = _candidate_partition(table, nearest, data.points, op, cand)
        energy, _ = score_candidate(cand, data, cfg, part)
        if best is None or energy < best[1] - TIE_RTOL * abs(best[1]):
            best = (op, energy)
    return best


@dataclass
class TreeStep:
    stage: int
    n_nodes: int
    fvu: float
    energy: float
    op: GrammarOp | None  # None when the loop stopped here


@dataclass
class TreeTrace:
    steps: list[TreeStep] = field(default_factory=list)


def fit_principal_tree(data: Dataset, cfg: ElasticConfig | None = None,
                       trace: TreeTrace | None = None) -> tuple[EmbeddedGraph, FitReport]:
    """Grow an elastic principal tree until its FVU reaches ``cfg.fvu_threshold``."""
    cfg = cfg or ElasticConfig()
    t0 = time.perf_counter()
    data.require_nondegenerate()
    line, _ = first_principal_component(data)
    fallback = 1e-3 * data.diameter() * line.direction
    graph = initial_chain(data).to_graph()
    stage = 1
    status = STALLED
    for _ in range(cfg.max_outer_iterations):
        graph = optimize_graph(graph, data, cfg)
        fvu = fvu_graph(data, graph)
        energy = graph_energy(graph, data, cfg).total
        if fvu <= cfg.fvu_threshold:
            status = CONVERGED
            if trace is not None:
                trace.steps.append(TreeStep(stage, graph.n_nodes, fvu, energy, None))
            break
        grammar = GROWING if stage < 4 else SHRINKING
        chosen = best_operation(graph, data, cfg, grammar, fallback)
        if trace is not None:
            trace.steps.append(TreeStep(stage, graph.n_nodes, fvu, energy, chosen[0] if chosen else None))
        if chosen is None:
            break
        graph = apply_grammar(graph, chosen[0], fallback)
        stage = stage + 1 if stage < 4 else 1
    else:
        graph = optimize_graph(graph, data, cfg)
        fvu = fvu_graph(data, graph)
    ms = int(round((time.perf_counter() - t0) * 1000))
    report = FitReport.measure(graph, fvu, method="PT", status=status, wall_time_ms=ms)
    return graph, report
