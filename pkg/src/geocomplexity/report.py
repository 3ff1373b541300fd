"""Per-run result records and the report CSV layout."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields

from .graph import EmbeddedGraph, geometrical_complexity, graph_length, structural_barcode

CONVERGED = "converged"
STALLED = "stalled"
FAILED = "failed"

REPORT_COLUMNS = (
    "pattern", "variant", "method", "n_nodes", "fvu", "gc", "length", "barcode", "status", "wall_time_ms",
)


@dataclass
class FitReport:
    pattern: str
    variant: str
    method: str
    n_nodes: int
    fvu: float
    gc: float
    length: float
    barcode: str
    status: str
    wall_time_ms: int = 0

    @classmethod
    def measure(cls, graph: EmbeddedGraph, fvu: float, *, method: str, status: str,
                pattern: str = "", variant: str = "", wall_time_ms: int = 0,
                min_max_order: int = 4) -> FitReport:
        return cls(
            pattern=pattern,
            variant=variant,
            method=method,
            n_nodes=graph.n_nodes,
            fvu=float(fvu),
            gc=geometrical_complexity(graph),
            length=graph_length(graph),
            barcode=str(structural_barcode(graph, min_max_order)),
            status=status,
            wall_time_ms=int(wall_time_ms),
        )

    def row(self) -> list[str]:
        d = asdict(self)
        out = []
        for name in REPORT_COLUMNS:
            v = d[name]
            out.append(repr(v) if isinstance(v, float) else str(v))
        return out

    @classmethod
    def from_row(cls, row: dict) -> FitReport:
        kw = {}
        for f in fields(cls):
            raw = row[f.name]
            kw[f.name] = int(raw) if f.type == "int" else float(raw) if f.type == "float" else raw
        return cls(**kw)


def reports_to_csv(reports, extra_columns: dict[str, list[str]] | None = None) -> str:
    """Render reports with the fixed column order, plus optional trailing columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    extra = extra_columns or {}
    w.writerow(list(REPORT_COLUMNS) + list(extra))
    for i, r in enumerate(reports):
        w.writerow(r.row() + [vals[i] for vals in extra.values()])
    return buf.getvalue()


def read_reports(text: str) -> list[FitReport]:
    return [FitReport.from_row(r) for r in csv.DictReader(io.StringIO(text))]
