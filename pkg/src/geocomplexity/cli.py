"""Command-line interface.

Exit codes: 0 ok, 2 usage error, 3 I/O error, 4 degenerate dataset,
5 unsupported input (plotting non 2-D data).
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .accuracy import Dataset
from .benchmarks import BenchmarkSpec, Pattern, Variant, write_benchmark
from .compare import fit_one, run_compare
from .config import load_config
from .errors import DegenerateDatasetError, DimensionMismatchError, GeoComplexityError
from .graph import EmbeddedGraph
from .plot import render_svg
from .report import reports_to_csv

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4
EXIT_UNSUPPORTED = 5

EPILOG = "Exit codes: 0 ok, 2 usage error, 3 I/O error, 4 degenerate dataset, 5 unsupported input."


def _fail(code: int, message: str):
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _threshold(ctx, param, value):
    if value is not None and not 0 < value < 1:
        raise click.BadParameter("must lie strictly between 0 and 1")
    return value


def _load_config(path):
    try:
        return load_config(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read config: {exc}")
    except ValueError as exc:
        raise click.UsageError(f"bad config: {exc}")


@click.group(epilog=EPILOG)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Fit GSOM chains and elastic principal trees; score them by FVU and geometrical complexity."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command(epilog=EPILOG)
@click.option("--pattern", required=True, type=click.Choice([p.value for p in Pattern], case_sensitive=False))
@click.option("--variant", required=True, type=click.Choice([v.value for v in Variant], case_sensitive=False))
@click.option("--n", "n_points", default=1000, show_default=True, type=click.IntRange(min=10))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="INI file with [benchmarks] shape parameters.")
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False))
def generate(pattern, variant, n_points, seed, config_path, out_path):
    """Write a benchmark dataset CSV and its <stem>.spec.json sidecar."""
    cfg = _load_config(config_path)
    spec = BenchmarkSpec(Pattern(pattern.lower()), Variant(variant.lower()), n_points, seed, cfg.backbone)
    try:
        csv_path, side = write_benchmark(spec, out_path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {out_path}: {exc}")
    click.echo(f"wrote {csv_path} and {side}")


def _read_dataset(path) -> Dataset:
    try:
        return Dataset.load_csv(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc}")
    except (ValueError, GeoComplexityError) as exc:
        _fail(EXIT_IO, f"cannot parse {path}: {exc}")


@main.command(epilog=EPILOG)
@click.option("--method", required=True, type=click.Choice(["gsom", "pt"], case_sensitive=False))
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--threshold", type=float, callback=_threshold,
              help="FVU stopping threshold; defaults to the variant's threshold from the sidecar, else 0.001.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option("--out-graph", required=True, type=click.Path(dir_okay=False))
@click.option("--out-report", required=True, type=click.Path(dir_okay=False))
def fit(method, data_path, threshold, config_path, out_graph, out_report):
    """Fit one approximator and write its graph JSON and a one-row report CSV."""
    cfg = _load_config(config_path)
    data = _read_dataset(data_path)
    side = Path(data_path).with_name(Path(data_path).stem + ".spec.json")
    meta = {}
    if side.exists():
        try:
            meta = json.loads(side.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            meta = {}
    if threshold is None:
        variant = meta.get("variant")
        threshold = cfg.thresholds[Variant(variant)] if variant in {v.value for v in Variant} else 0.001
    try:
        graph, report = fit_one(method.upper(), data, threshold, cfg)
    except DegenerateDatasetError as exc:
        _fail(EXIT_DEGENERATE, str(exc))
    report.pattern = meta.get("pattern", Path(data_path).stem)
    report.variant = meta.get("variant", "")
    try:
        graph.save_json(out_graph)
        Path(out_report).write_text(reports_to_csv([report]), encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write output: {exc}")
    click.echo(f"{report.method}: N={report.n_nodes} fvu={report.fvu:.6f} gc={report.gc:.4f} "
               f"length={report.length:.4f} barcode={report.barcode} status={report.status}")


@main.command(epilog=EPILOG)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="INI file; packaged defaults if omitted.")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--no-plots", is_flag=True, help="Skip SVG output.")
def compare(config_path, out_dir, no_plots):
    """Fit both methods on all nine benchmarks and write the comparison report."""
    cfg = _load_config(config_path)
    if no_plots:
        cfg.plots = False
    try:
        reports = run_compare(cfg, out_dir)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write to {out_dir}: {exc}")
    click.echo(Path(out_dir, "table.md").read_text(encoding="utf-8"), nl=False)
    click.echo(f"{len(reports)} rows written to {Path(out_dir, 'report.csv')}")


@main.command(epilog=EPILOG)
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--graph", "graph_path", required=True, type=click.Path(dir_okay=False))
@click.option("-o", "--out", "out_svg", required=True, type=click.Path(dir_okay=False))
def plot(data_path, graph_path, out_svg):
    """Render data points and a fitted graph as SVG (2-D only)."""
    data = _read_dataset(data_path)
    try:
        graph = EmbeddedGraph.load_json(graph_path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {graph_path}: {exc}")
    except (ValueError, KeyError, GeoComplexityError) as exc:
        _fail(EXIT_IO, f"cannot parse {graph_path}: {exc}")
    try:
        svg = render_svg(data, graph)
    except DimensionMismatchError:
        _fail(EXIT_UNSUPPORTED, "plotting supports 2-D only")
    try:
        Path(out_svg).write_text(svg, encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {out_svg}: {exc}")


if __name__ == "__main__":
    main()
