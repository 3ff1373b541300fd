"""INI run configuration shared by the CLI commands."""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .benchmarks import BackboneParams, Variant
from .gsom import SomConfig
from .principal_tree import ElasticConfig

_THRESHOLD_KEYS = {v.value: v for v in Variant}


@dataclass
class RunConfig:
    som: SomConfig = field(default_factory=SomConfig)
    elastic: ElasticConfig = field(default_factory=ElasticConfig)
    backbone: BackboneParams = field(default_factory=BackboneParams)
    thresholds: dict[Variant, float] = field(
        default_factory=lambda: {Variant.THIN: 0.001, Variant.SCATTERED: 0.002, Variant.SCATTERED_NOISED: 0.01}
    )
    n_points: int = 1000
    seed: int = 20130101
    barcode_min_max_order: int = 4
    plots: bool = True
    record_wall_time: bool = False

    def som_for(self, threshold: float) -> SomConfig:
        return dataclasses.replace(self.som, fvu_threshold=threshold)

    def elastic_for(self, threshold: float) -> ElasticConfig:
        return dataclasses.replace(self.elastic, fvu_threshold=threshold)


def default_config_text() -> str:
    return resources.files("geocomplexity").joinpath("default.ini").read_text(encoding="utf-8")


def _coerce(cls, section: configparser.SectionProxy, skip=()):
    kw = {}
    for f in dataclasses.fields(cls):
        if f.name in skip or f.name not in section:
            continue
        kind = f.type if isinstance(f.type, str) else f.type.__name__
        if kind == "int":
            kw[f.name] = section.getint(f.name)
        elif kind == "bool":
            kw[f.name] = section.getboolean(f.name)
        else:
            kw[f.name] = section.getfloat(f.name)
    unknown = set(section) - {f.name for f in dataclasses.fields(cls)} - set(skip)
    if unknown:
        raise ValueError(f"unknown keys in [{section.name}]: {', '.join(sorted(unknown))}")
    return kw


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_string(text)
    cfg = RunConfig()
    if cp.has_section("gsom"):
        cfg.som = SomConfig(**_coerce(SomConfig, cp["gsom"], skip=("fvu_threshold",)))
    if cp.has_section("principal_tree"):
        cfg.elastic = ElasticConfig(**_coerce(ElasticConfig, cp["principal_tree"], skip=("fvu_threshold",)))
    if cp.has_section("thresholds"):
        for key, value in cp["thresholds"].items():
            if key not in _THRESHOLD_KEYS:
                raise ValueError(f"unknown variant {key!r} in [thresholds]")
            t = float(value)
            if not 0 < t < 1:
                raise ValueError(f"threshold for {key} must lie in (0, 1)")
            cfg.thresholds[_THRESHOLD_KEYS[key]] = t
    if cp.has_section("benchmarks"):
        sec = cp["benchmarks"]
        cfg.backbone = BackboneParams(**_coerce(BackboneParams, sec, skip=("n_points", "seed")))
        cfg.n_points = sec.getint("n_points", cfg.n_points)
        cfg.seed = sec.getint("seed", cfg.seed)
    if cp.has_section("compare"):
        sec = cp["compare"]
        cfg.barcode_min_max_order = sec.getint("barcode_min_max_order", cfg.barcode_min_max_order)
        cfg.plots = sec.getboolean("plots", cfg.plots)
        cfg.record_wall_time = sec.getboolean("record_wall_time", cfg.record_wall_time)
    return cfg


def load_config(path=None) -> RunConfig:
    """Parse ``path``, or the packaged defaults when ``path`` is None."""
    text = default_config_text() if path is None else Path(path).read_text(encoding="utf-8")
    return parse_config(text)
