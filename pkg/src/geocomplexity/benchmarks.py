"""Synthetic 2-D benchmark point clouds: sinus, spiral and tree patterns.

Each pattern comes in three variants: points exactly on the backbone curve
(thin), backbone plus isotropic Gaussian jitter (scattered), and scattered
plus a fraction of uniform background noise (scattered and noised).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .accuracy import Dataset

GENERATOR_ID = "numpy.random.PCG64"


class Pattern(str, enum.Enum):
    SINUS = "sinus"
    SPIRAL = "spiral"
    TREE = "tree"


class Variant(str, enum.Enum):
    THIN = "thin"
    SCATTERED = "scattered"
    SCATTERED_NOISED = "scattered_noised"


_THRESHOLDS = {Variant.THIN: 0.001, Variant.SCATTERED: 0.002, Variant.SCATTERED_NOISED: 0.01}


def threshold_for(variant: Variant | str) -> float:
    """FVU stopping threshold per variant: 0.1%, 0.2% and 1%."""
    return _THRESHOLDS[Variant(variant)]


def parse_pattern(name: str) -> Pattern:
    return Pattern(name.strip().lower())


def parse_variant(name: str) -> Variant:
    key = name.strip().lower().replace("-", "_")
    aliases = {"s": "scattered", "sn": "scattered_noised", "noised": "scattered_noised"}
    return Variant(aliases.get(key, key))


@dataclass
class BackboneParams:
    """Shape parameters of the generating curves and the perturbation levels."""

    sinus_amplitude: float = 3.0
    sinus_t_max: float = 3.0 * math.pi
    spiral_a: float = 0.3
    spiral_theta_min: float = math.pi
    spiral_theta_max: float = 2.75 * math.pi
    tree_trunk_length: float = 4.0
    tree_branch_angle_deg: float = 40.0
    tree_child_ratio: float = 0.6
    tree_levels: int = 2
    jitter_fraction: float = 0.005
    noise_fraction: float = 0.02
    noise_box_inflation: float = 0.1


@dataclass
class BenchmarkSpec:
    pattern: Pattern
    variant: Variant
    n_points: int = 1000
    seed: int = 0
    params: BackboneParams = field(default_factory=BackboneParams)

    def __post_init__(self):
        self.pattern = Pattern(self.pattern)
        self.variant = Variant(self.variant)
        if self.n_points < 10:
            raise ValueError("n_points must be at least 10")

    @property
    def fvu_threshold(self) -> float:
        return threshold_for(self.variant)

    def metadata(self) -> dict:
        return {
            "pattern": self.pattern.value,
            "variant": self.variant.value,
            "n_points": self.n_points,
            "seed": self.seed,
            "generator": GENERATOR_ID,
            "fvu_threshold": self.fvu_threshold,
            "backbone": asdict(self.params),
        }


def tree_segments(p: BackboneParams) -> list[tuple[np.ndarray, np.ndarray]]:
    """Trunk plus ``tree_levels`` rounds of symmetric binary branching."""
    angle = math.radians(p.tree_branch_angle_deg)
    segs = []
    tips = [(np.array([0.0, 0.0]), math.pi / 2, p.tree_trunk_length)]
    for level in range(p.tree_levels + 1):
        nxt = []
        for start, heading, length in tips:
            end = start + length * np.array([math.cos(heading), math.sin(heading)])
            segs.append((start, end))
            if level < p.tree_levels:
                child = length * p.tree_child_ratio
                nxt += [(end, heading + angle, child), (end, heading - angle, child)]
        tips = nxt
    return segs


def _sinus(u: np.ndarray, p: BackboneParams) -> np.ndarray:
    t = u * p.sinus_t_max
    return np.column_stack([t, p.sinus_amplitude * np.sin(t)])


def _spiral(u: np.ndarray, p: BackboneParams) -> np.ndarray:
    th = p.spiral_theta_min + u * (p.spiral_theta_max - p.spiral_theta_min)
    r = p.spiral_a * th
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def _tree(rng: np.random.Generator, n: int, p: BackboneParams) -> np.ndarray:
    segs = tree_segments(p)
    lengths = np.array([np.linalg.norm(b - a) for a, b in segs])
    which = rng.choice(len(segs), size=n, p=lengths / lengths.sum())
    t = rng.random(n)
    a = np.array([s[0] for s in segs])[which]
    b = np.array([s[1] for s in segs])[which]
    return a + t[:, None] * (b - a)


def backbone_polyline(pattern: Pattern | str, params: BackboneParams | None = None, resolution: int = 20000):
    """Dense sampling of the generating curve, as ``(A, B)`` segment endpoint arrays."""
    p = params or BackboneParams()
    pattern = Pattern(pattern)
    if pattern is Pattern.TREE:
        segs = tree_segments(p)
        return np.array([s[0] for s in segs]), np.array([s[1] for s in segs])
    u = np.linspace(0.0, 1.0, resolution)
    pts = _sinus(u, p) if pattern is Pattern.SINUS else _spiral(u, p)
    return pts[:-1], pts[1:]


def generate(spec: BenchmarkSpec) -> Dataset:
    """Deterministic point cloud for ``spec``."""
    p = spec.params
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.n_points
    if spec.pattern is Pattern.SINUS:
        pts = _sinus(rng.random(n), p)
    elif spec.pattern is Pattern.SPIRAL:
        pts = _spiral(rng.random(n), p)
    else:
        pts = _tree(rng, n, p)
    if spec.variant is Variant.THIN:
        return Dataset(pts)

    lo, hi = _backbone_box(spec.pattern, p)
    sigma = p.jitter_fraction * float(np.linalg.norm(hi - lo))
    pts = pts + rng.normal(0.0, sigma, size=pts.shape)
    if spec.variant is Variant.SCATTERED_NOISED:
        n_noise = int(round(p.noise_fraction * n))
        idx = np.sort(rng.choice(n, size=n_noise, replace=False))
        centre, half = (lo + hi) / 2, (hi - lo) / 2 * (1.0 + p.noise_box_inflation)
        pts[idx] = centre + rng.uniform(-1.0, 1.0, size=(n_noise, 2)) * half
    return Dataset(pts)


def _backbone_box(pattern: Pattern, p: BackboneParams) -> tuple[np.ndarray, np.ndarray]:
    a, b = backbone_polyline(pattern, p)
    both = np.vstack([a, b])
    return both.min(axis=0), both.max(axis=0)


def jitter_sigma(spec: BenchmarkSpec) -> float:
    """Standard deviation of the Gaussian jitter used for ``spec``."""
    lo, hi = _backbone_box(spec.pattern, spec.params)
    return spec.params.jitter_fraction * float(np.linalg.norm(hi - lo))


def write_benchmark(spec: BenchmarkSpec, out_path) -> tuple[Path, Path]:
    """Write ``<out>.csv`` and the ``<stem>.spec.json`` sidecar."""
    out = Path(out_path)
    data = generate(spec)
    out.write_text(data.to_csv(), encoding="utf-8")
    side = out.with_name(out.stem + ".spec.json")
    side.write_text(json.dumps(spec.metadata(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out, side


ALL_BENCHMARKS = [(pat, var) for pat in Pattern for var in Variant]
