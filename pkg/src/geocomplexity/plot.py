"""Plain-text SVG rendering of a 2-D point cloud and an embedded graph."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

from .accuracy import Dataset
from .errors import DimensionMismatchError
from .graph import EmbeddedGraph

WIDTH = 600.0
MARGIN = 0.05


def render_svg(data: Dataset, graph: EmbeddedGraph, title: str | None = None) -> str:
    """Data as light circles, edges as lines, nodes as dark circles.

    The view box is fitted to data and nodes with a 5% margin; the y axis
    points up as in the data space.
    """
    if data.dimension != 2 or (graph.n_nodes and graph.dimension != 2):
        raise DimensionMismatchError("plotting supports 2-D only")
    pts = np.vstack([data.points, graph.positions]) if graph.n_nodes else data.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo = lo - MARGIN * span
    span = span * (1 + 2 * MARGIN)
    scale = WIDTH / span.max()
    w, h = span * scale

    def xy(p):
        return (p[0] - lo[0]) * scale, h - (p[1] - lo[1]) * scale

    r_data, r_node = 0.004 * WIDTH, 0.007 * WIDTH
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" viewBox="0 0 {w:.3f} {h:.3f}">',
    ]
    if title:
        out.append(f"<title>{quoteattr(title)[1:-1]}</title>")
    out.append('<g fill="#b8c4d6" stroke="none">')
    for p in data.points:
        x, y = xy(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r_data:.2f}"/>')
    out.append("</g>")
    out.append('<g stroke="#1f4e9a" stroke-width="1.5">')
    for i, j in graph.edges:
        (x1, y1), (x2, y2) = xy(graph.positions[i]), xy(graph.positions[j])
        out.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}"/>')
    out.append("</g>")
    out.append('<g fill="#8b1a1a" stroke="none">')
    for p in graph.positions:
        x, y = xy(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r_node:.2f}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
