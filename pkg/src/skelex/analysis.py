"""Region accounting: analytic linear/activation-region counts per pipeline
stage, plus an independent numeric counter based on activation sign patterns
over a sampling grid. The grid count is a lower bound on the true activation
region count and is used as a cross-check oracle for the analytic pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .geometry import EPS_AREA, Hyperrectangle
from .pipeline import StageRecord, run_skelex
from .skeleton import Network, Skeleton, vertex_key


def region_count(s: Skeleton, min_area: float | None = None) -> int:
    """Number of regions with area above the geometric resolution floor.

    Tessellations carry occasional sub-resolution tiles where critical lines
    are nearly concurrent; they keep the encoded function and the area
    bookkeeping exact but are float artifacts, not meaningful
    full-dimensional regions, so counting ignores them by default.
    """
    if min_area is None:
        min_area = EPS_AREA * s.bounds.area
    return sum(1 for r in s.regions if r.polygon.area > min_area)


@dataclass
class StageStats:
    tag: str
    linear_regions: list[int]
    activation_regions: list[int]
    vertices: int
    edges: int


@dataclass
class RegionStats:
    stages: list[StageStats] = field(default_factory=list)
    linear_regions: int | None = None
    activation_regions: int | None = None
    grid_activation_regions: int | None = None
    membership_polygons: dict[int, int] = field(default_factory=dict)
    boundary_edges: int = 0

    def to_dict(self) -> dict:
        return {
            "stages": [
                {
                    "tag": st.tag,
                    "linear_regions": st.linear_regions,
                    "activation_regions": st.activation_regions,
                    "vertices": st.vertices,
                    "edges": st.edges,
                }
                for st in self.stages
            ],
            "linear_regions": self.linear_regions,
            "activation_regions": self.activation_regions,
            "grid_activation_regions": self.grid_activation_regions,
            "membership_polygons": {str(c): n for c, n in sorted(self.membership_polygons.items())},
            "boundary_edges": self.boundary_edges,
        }


def _skeleton_faces(skeletons) -> tuple[int, int]:
    """Distinct vertex and edge counts over a stage's skeletons."""
    verts: set[tuple] = set()
    edges: set[tuple] = set()
    for s in skeletons:
        for r in s.regions:
            keys = [vertex_key(v.point) for v in r.vertices]
            verts.update(keys)
            if len(keys) == 2:  # 1-D interval
                edges.add(tuple(sorted(keys)))
            else:
                for a, b in zip(keys, keys[1:] + keys[:1]):
                    edges.add(tuple(sorted((a, b))))
    return len(verts), len(edges)


def count_activation_regions(net: Network, bounds: Hyperrectangle, grid_n: int) -> int:
    """Distinct hidden-unit sign patterns over a grid_n-per-axis sample grid.

    A lower bound on the true activation-region count, monotone
    non-decreasing in ``grid_n``.
    """
    if grid_n < 2:
        raise InputError("grid_n must be at least 2")
    axes = [np.linspace(lo, hi, grid_n) for lo, hi in bounds.bounds]
    if bounds.dim == 1:
        pts = axes[0][:, None]
    else:
        xx, yy = np.meshgrid(axes[0], axes[1])
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    bits = []
    acts = pts
    for w, b in net.layers[:-1]:
        pre = acts @ w.T + b
        bits.append(pre > 0)
        acts = np.maximum(pre, 0.0)
    patterns = np.concatenate(bits, axis=1)
    packed = np.packbits(patterns, axis=1)
    return len(np.unique(packed, axis=0))


def count_analytic(fs, merged: bool) -> RegionStats:
    """Exact region counts from extracted membership skeletons.

    ``merged`` records whether the skeletons came from a pipeline run with
    same-affine merging (linear regions) or without (activation regions).
    """
    fs = list(fs)
    counts = [region_count(s) for s in fs]
    vertices, edges = _skeleton_faces(fs)
    stats = RegionStats()
    top = max(counts)
    if merged:
        stats.linear_regions = top
    else:
        stats.activation_regions = top
    stats.stages.append(
        StageStats(
            tag="membership",
            linear_regions=counts if merged else [],
            activation_regions=[] if merged else counts,
            vertices=vertices,
            edges=edges,
        )
    )
    return stats


def analyze_network(
    net: Network, bounds: Hyperrectangle, grid_n: int = 512
) -> RegionStats:
    """Full accounting: both pipeline variants, per-stage counts, decision map
    sizes and the numeric grid cross-check."""
    from .boundex import run_boundex

    trace_merged: list[StageRecord] = []
    trace_raw: list[StageRecord] = []
    merged = run_skelex(net, bounds, merge=True, trace=trace_merged)
    run_skelex(net, bounds, merge=False, trace=trace_raw)

    stats = RegionStats()
    for rec_m, rec_r in zip(trace_merged, trace_raw):
        vertices, edges = _skeleton_faces(rec_m.skeletons)
        stats.stages.append(
            StageStats(
                tag=rec_m.tag,
                linear_regions=[region_count(s) for s in rec_m.skeletons],
                activation_regions=[region_count(s) for s in rec_r.skeletons],
                vertices=vertices,
                edges=edges,
            )
        )
    stats.linear_regions = max(region_count(s) for s in trace_merged[-1].skeletons)
    stats.activation_regions = max(region_count(s) for s in trace_raw[-1].skeletons)
    stats.grid_activation_regions = count_activation_regions(net, bounds, grid_n)

    dm = run_boundex(merged)
    for mp in dm.polygons:
        stats.membership_polygons[mp.class_index] = (
            stats.membership_polygons.get(mp.class_index, 0) + 1
        )
    stats.boundary_edges = len(dm.boundary)
    return stats
