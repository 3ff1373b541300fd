"""Point-set statistics and the fraction of variance unexplained (FVU)."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDatasetError, DimensionMismatchError, EmptyDatasetError
from .graph import EmbeddedGraph

# points per block when building (points x segments) distance tables
_CHUNK = 4096


def _as_points(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            if arr.size == 0:
                raise EmptyDatasetError()
            arr = arr.reshape(1, -1)
    else:
        rows = [list(np.atleast_1d(np.asarray(p, dtype=float))) for p in points]
        if not rows:
            raise EmptyDatasetError()
        if len({len(r) for r in rows}) != 1:
            raise DimensionMismatchError()
        arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise EmptyDatasetError()
    if arr.shape[1] == 0:
        raise DimensionMismatchError("points must have dimension >= 1")
    return arr


def mean_and_variance(points) -> tuple[np.ndarray, float]:
    """Componentwise mean and total variance ``sum ||x_i - mean||^2``."""
    x = _as_points(points)
    # shifting by the first point keeps coincident data exactly at variance 0
    mean = x[0] + (x - x[0]).mean(axis=0)
    centred = x - mean
    return mean, float(np.einsum("ij,ij->", centred, centred))


class Dataset:
    """Immutable point cloud with cached mean and total variance."""

    def __init__(self, points):
        x = _as_points(points).copy()
        x.setflags(write=False)
        self.points = x
        self.mean, self.total_variance = mean_and_variance(x)
        self.mean.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def diameter(self) -> float:
        """Bounding-box diagonal, used as the data length scale."""
        return float(np.linalg.norm(self.points.max(axis=0) - self.points.min(axis=0)))

    def require_nondegenerate(self) -> None:
        if not self.total_variance > 0.0:
            raise DegenerateDatasetError()

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, dimension={self.dimension})"

    # -- CSV ------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(self.dimension)])
        for row in self.points:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> Dataset:
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError() from None
        d = len(header)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d:
                raise DimensionMismatchError(f"dimension mismatch on line {line_no}")
            rows.append([float(v) for v in row])
        if not rows:
            raise EmptyDatasetError()
        return cls(np.array(rows, dtype=float))

    @classmethod
    def load_csv(cls, path) -> Dataset:
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Line:
    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        u = np.asarray(self.direction, dtype=float)
        if base.shape != u.shape:
            raise DimensionMismatchError()
        norm = np.linalg.norm(u)
        if norm == 0.0:
            raise ValueError("line direction must be nonzero")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", u / norm)


def point_to_segment_distance(x, a, b) -> float:
    """Euclidean distance from ``x`` to the closed segment ``[a, b]``."""
    x, a, b = (np.asarray(v, dtype=float) for v in (x, a, b))
    if not (x.shape == a.shape == b.shape):
        raise DimensionMismatchError()
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0.0 else float(np.clip((x - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * ab)))


def squared_distances_to_segments(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``(n, m)`` table of squared distances from points ``x`` to segments ``[a_j, b_j]``."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    safe = np.where(denom > 0.0, denom, 1.0)
    out = np.empty((x.shape[0], a.shape[0]))
    for s in range(0, x.shape[0], _CHUNK):
        xs = x[s:s + _CHUNK]
        xa = xs[:, None, :] - a[None, :, :]
        t = np.einsum("nmd,md->nm", xa, ab) / safe
        t = np.clip(np.where(denom > 0.0, t, 0.0), 0.0, 1.0)
        diff = xa - t[:, :, None] * ab[None, :, :]
        out[s:s + _CHUNK] = np.einsum("nmd,nmd->nm", diff, diff)
    return out


def squared_distances_to_graph(data: Dataset, graph: EmbeddedGraph) -> np.ndarray:
    """Per-point squared distance to the union of the graph's closed edges."""
    if graph.n_nodes == 0:
        raise ValueError("graph has no nodes")
    if graph.dimension != data.dimension:
        raise DimensionMismatchError()
    a, b = graph.segments()
    return squared_distances_to_segments(data.points, a, b).min(axis=1)


def fvu_line(data: Dataset, line: Line) -> float:
    """Summed squared orthogonal distances to an infinite line over total variance."""
    data.require_nondegenerate()
    if line.base.shape[0] != data.dimension:
        raise DimensionMismatchError()
    r = data.points - line.base
    proj = r @ line.direction
    resid = r - proj[:, None] * line.direction
    return float(np.einsum("ij,ij->", resid, resid) / data.total_variance)


def fvu_graph(data: Dataset, graph: EmbeddedGraph) -> float:
    """FVU of an embedded graph: squared distance to the nearest edge over total variance."""
    data.require_nondegenerate()
    return float(squared_distances_to_graph(data, graph).sum() / data.total_variance)


def first_principal_component(data: Dataset) -> tuple[Line, float]:
    """Line through the mean along the top covariance eigenvector, and the std along it.

    The covariance uses the population normalization (1/n). The sign is fixed
    so that the largest-magnitude component of the direction is positive;
    with tied top eigenvalues the eigensolver's choice is returned.
    """
    if data.n < 2:
        raise DegenerateDatasetError("degenerate dataset: need at least two points")
    data.require_nondegenerate()
    centred = data.points - data.mean
    cov = centred.T @ centred / data.n
    vals, vecs = np.linalg.eigh(cov)
    u = vecs[:, -1]
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0:
        u = -u
    return Line(data.mean.copy(), u), float(np.sqrt(max(vals[-1], 0.0)))
