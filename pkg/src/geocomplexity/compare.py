"""The GSOM vs principal tree comparison matrix over all nine benchmarks."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

from .benchmarks import ALL_BENCHMARKS, BenchmarkSpec, generate, write_benchmark
from .config import RunConfig
from .graph import EmbeddedGraph
from .gsom import fit_gsom
from .plot import render_svg
from .principal_tree import fit_principal_tree
from .report import FAILED, FitReport, reports_to_csv

log = logging.getLogger(__name__)

METHODS = ("GSOM", "PT")
MEASURES = ("n_nodes", "gc", "length")


@dataclass
class RunResult:
    report: FitReport
    graph: EmbeddedGraph | None


def fit_one(method: str, data, threshold: float, cfg: RunConfig) -> tuple[EmbeddedGraph, FitReport]:
    if method == "GSOM":
        chain, report = fit_gsom(data, cfg.som_for(threshold))
        graph = chain.to_graph()
    elif method == "PT":
        graph, report = fit_principal_tree(data, cfg.elastic_for(threshold))
    else:
        raise ValueError(f"unknown method {method!r}")
    if cfg.barcode_min_max_order != 4:
        report = FitReport.measure(graph, report.fvu, method=report.method, status=report.status,
                                   wall_time_ms=report.wall_time_ms, min_max_order=cfg.barcode_min_max_order)
    return graph, report


def run_matrix(cfg: RunConfig) -> list[tuple[BenchmarkSpec, RunResult]]:
    """Fit both methods on every benchmark, in a fixed order."""
    out = []
    for pattern, variant in ALL_BENCHMARKS:
        spec = BenchmarkSpec(pattern, variant, cfg.n_points, cfg.seed, cfg.backbone)
        data = generate(spec)
        threshold = cfg.thresholds[variant]
        for method in METHODS:
            try:
                graph, report = fit_one(method, data, threshold, cfg)
            except Exception as exc:  # a failed fit is recorded, the matrix goes on
                log.warning("%s on %s/%s failed: %s", method, pattern.value, variant.value, exc)
                graph = None
                report = FitReport("", "", method, 0, float("nan"), float("nan"), float("nan"), "", FAILED)
            report.pattern, report.variant = pattern.value, variant.value
            log.info("%s %s %s: N=%d fvu=%.5f gc=%.3f length=%.3f %s (%d ms)", pattern.value, variant.value,
                     method, report.n_nodes, report.fvu, report.gc, report.length, report.status,
                     report.wall_time_ms)
            if not cfg.record_wall_time:
                report.wall_time_ms = 0
            out.append((spec, RunResult(report, graph)))
    return out


def winners(reports: list[FitReport]) -> list[dict]:
    """Per benchmark, the method with the smallest value of each complexity measure."""
    rows = []
    keys = []
    by_key: dict[tuple[str, str], dict[str, FitReport]] = {}
    for r in reports:
        k = (r.pattern, r.variant)
        if k not in by_key:
            keys.append(k)
            by_key[k] = {}
        if r.status != FAILED:
            by_key[k][r.method] = r
    for k in keys:
        row = {"pattern": k[0], "variant": k[1]}
        runs = by_key[k]
        for m in MEASURES:
            if len(runs) < 2:
                row[m] = next(iter(runs), "")
                continue
            vals = {meth: getattr(r, m) for meth, r in runs.items()}
            best = min(vals.values())
            who = [meth for meth in METHODS if meth in vals and vals[meth] == best]
            row[m] = who[0] if len(who) == 1 else "tie"
        rows.append(row)
    return rows


def winners_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["pattern", "variant", *MEASURES], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def markdown_table(reports: list[FitReport], win: list[dict]) -> str:
    """Table-1 style summary; the winner of each measure is in bold."""
    lookup = {(r.pattern, r.variant, r.method): r for r in reports}
    head = "| Pattern | Variant | " + " | ".join(f"{m} {c}" for m in METHODS for c in ("N", "FVU", "GC", "Length")) + " |"
    lines = [head, "|" + "---|" * (2 + 4 * len(METHODS))]
    for row in win:
        cells = [row["pattern"], row["variant"]]
        for m in METHODS:
            r = lookup.get((row["pattern"], row["variant"], m))
            if r is None:
                cells += [""] * 4
                continue

            def mark(measure, text):
                return f"**{text}**" if row.get(measure) == m else text

            cells += [
                mark("n_nodes", str(r.n_nodes)),
                f"{r.fvu:.2%}" + ("" if r.status == "converged" else f" ({r.status})"),
                mark("gc", f"{r.gc:.2f}"),
                mark("length", f"{r.length:.2f}"),
            ]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def run_compare(cfg: RunConfig, out_dir) -> list[FitReport]:
    """Run the matrix and write report.csv, winners.csv, table.md, data, graphs and plots."""
    out = Path(out_dir)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    (out / "data").mkdir(exist_ok=True)
    if cfg.plots:
        (out / "plots").mkdir(exist_ok=True)
    results = run_matrix(cfg)
    reports = [res.report for _, res in results]
    written = set()
    for spec, res in results:
        stem = f"{spec.pattern.value}_{spec.variant.value}"
        data = generate(spec)
        if stem not in written:
            write_benchmark(spec, out / "data" / f"{stem}.csv")
            written.add(stem)
        if res.graph is None:
            continue
        name = f"{stem}_{res.report.method.lower()}"
        res.graph.save_json(out / "graphs" / f"{name}.json")
        if cfg.plots:
            svg = render_svg(data, res.graph, title=f"{res.report.method} {stem} N={res.report.n_nodes}")
            (out / "plots" / f"{name}.svg").write_text(svg, encoding="utf-8")
    win = winners(reports)
    (out / "report.csv").write_text(reports_to_csv(reports), encoding="utf-8")
    (out / "winners.csv").write_text(winners_csv(win), encoding="utf-8")
    (out / "table.md").write_text(markdown_table(reports, win), encoding="utf-8")
    return reports
