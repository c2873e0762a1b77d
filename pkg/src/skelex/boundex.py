"""Analytical decision boundaries from membership-function skeletons.

Given the k skeletons of a classifier's output functions on one shared
tessellation, each tile is assigned to the class whose function dominates it,
splitting the tile wherever two functions exchange leadership. Same-class
neighbors are merged afterwards, the edges between different classes form the
decision boundary, and classification reduces to point-in-polygon lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely

from . import geometry
from .errors import OutOfDomainError, StructuralError
from .geometry import EPS_GEOM, Hyperrectangle, Polygon
from .skeleton import LinearRegion, Skeleton

# Affine difference below this scale-relative threshold counts as an exact
# tie; ties go to the lower class index.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class MembershipPolygon:
    polygon: Polygon
    class_index: int


@dataclass(frozen=True)
class BoundarySegment:
    """A straight boundary piece separating two classes (lo before hi)."""

    p0: np.ndarray
    p1: np.ndarray
    classes: tuple[int, int]


@dataclass
class DecisionMap:
    bounds: Hyperrectangle
    polygons: tuple[MembershipPolygon, ...]
    boundary: tuple[BoundarySegment, ...]
    num_classes: int
    single_logit: bool = False
    _tree: object = field(default=None, repr=False, compare=False)

    def class_polygons(self, c: int) -> list[Polygon]:
        return [mp.polygon for mp in self.polygons if mp.class_index == c]


def split_region_by_pair(lr: Polygon, fi, fj) -> tuple[list[Polygon], list[Polygon]]:
    """Split a tile along the locus where two affine forms are equal.

    ``fi`` and ``fj`` are (gradient, offset) pairs valid on the tile; the
    positive side is where fi >= fj. Exact ties over the whole tile land on
    the positive side.
    """
    gi, oi = fi
    gj, oj = fj
    a = np.asarray(gi, dtype=np.float64) - np.asarray(gj, dtype=np.float64)
    c = float(oi) - float(oj)
    scale = 1.0 + max(np.max(np.abs(gi)), np.max(np.abs(gj))) + max(abs(oi), abs(oj))
    if np.max(np.abs(a)) <= TIE_TOL * scale and abs(c) <= TIE_TOL * scale:
        return [lr], []
    return geometry.split_by_line(lr, a, c)


def _common_tiles(fs: list[Skeleton]) -> list[tuple[Polygon, np.ndarray, np.ndarray]]:
    """Tiles of the shared tessellation with per-class affine data.

    Returns (polygon, gradients (k, n0), offsets (k,)) triples. Skeletons
    that already share a tessellation are zipped directly; otherwise they are
    refined to their common tessellation by pairwise intersection.
    """
    base = fs[0]
    aligned = all(
        len(s.regions) == len(base.regions)
        and all(
            r1.polygon.close_to(r2.polygon, tol=EPS_GEOM)
            for r1, r2 in zip(base.regions, s.regions)
        )
        for s in fs[1:]
    )
    tiles = []
    if aligned:
        for i, r0 in enumerate(base.regions):
            grads = np.stack([s.regions[i].gradient for s in fs])
            offs = np.array([s.regions[i].offset for s in fs])
            tiles.append((r0.polygon, grads, offs))
        return tiles

    from .pipeline import _refine_fold

    current = [(r.polygon, ((r.gradient,), (r.offset,))) for r in base.regions]
    for nxt in fs[1:]:
        current = _refine_fold(
            current,
            nxt.regions,
            lambda state, r2: (state[0] + (r2.gradient,), state[1] + (r2.offset,)),
        )
    for poly, (grads, offs) in current:
        tiles.append((poly, np.stack(grads), np.array(offs)))
    return tiles


def _assign_tile(poly: Polygon, grads: np.ndarray, offs: np.ndarray) -> dict[int, list[Polygon]]:
    """Partition one tile into per-class membership pieces.

    The winner at the tile's vertices seeds the assignment; every other class
    then bites off the part of each current piece where it beats that piece's
    owner. After the loop each piece is owned by the class that dominates it.
    """
    values = poly.vertices @ grads.T + offs  # (V, k)
    winners = np.argmax(values, axis=1)
    k = len(offs)
    base = int(winners[0])
    if np.all(winners == base):
        # unanimous at the vertices: the affine differences f_base - f_j are
        # nonnegative on the tile's hull, so the whole tile belongs to base
        return {base: [poly]}
    cmp: dict[int, list[Polygon]] = {base: [poly]}
    for i in range(k):
        if i == base:
            continue
        gained: list[Polygon] = []
        for key in list(cmp.keys()):
            kept: list[Polygon] = []
            for reg in cmp[key]:
                if i < key:
                    neg, pos = split_region_by_pair(
                        reg, (grads[i], offs[i]), (grads[key], offs[key])
                    )
                else:
                    pos, neg = split_region_by_pair(
                        reg, (grads[key], offs[key]), (grads[i], offs[i])
                    )
                kept.extend(pos)
                gained.extend(neg)
            cmp[key] = kept
        cmp[i] = gained
    return {c: regs for c, regs in cmp.items() if regs}


def _boundary_segments(
    merged: list[MembershipPolygon],
) -> list[BoundarySegment]:
    geoms = [mp.polygon.shapely for mp in merged]
    tree = shapely.STRtree(geoms)
    left, right = tree.query(geoms, predicate="intersects")
    segments: list[BoundarySegment] = []
    seen: set[tuple] = set()
    for i, j in zip(left.tolist(), right.tolist()):
        if i >= j or merged[i].class_index == merged[j].class_index:
            continue
        classes = tuple(sorted((merged[i].class_index, merged[j].class_index)))
        for p0, p1 in geometry.shared_edge_segments(merged[i].polygon, merged[j].polygon):
            lo, hi = sorted((tuple(p0), tuple(p1)))
            key = (tuple(np.round(lo, 9)), tuple(np.round(hi, 9)), classes)
            if key in seen:
                continue
            seen.add(key)
            segments.append(BoundarySegment(np.array(lo), np.array(hi), classes))
    segments.sort(key=lambda s: (tuple(s.p0), tuple(s.p1), s.classes))
    return segments


def _boundary_points_1d(merged: list[MembershipPolygon]) -> list[BoundarySegment]:
    segs = []
    ordered = sorted(merged, key=lambda mp: mp.polygon.vertices[0, 0])
    for a, b in zip(ordered, ordered[1:]):
        if a.class_index == b.class_index:
            continue
        x = 0.5 * (a.polygon.vertices[1, 0] + b.polygon.vertices[0, 0])
        pt = np.array([x])
        segs.append(
            BoundarySegment(pt, pt.copy(), tuple(sorted((a.class_index, b.class_index))))
        )
    return segs


def run_boundex(fs) -> DecisionMap:
    """Compute the membership polygons and decision boundary of a classifier.

    ``fs`` holds one skeleton per output neuron. A single-logit classifier is
    handled by pairing the lone function with the constant zero function, so
    class 1 covers f >= 0 and class 0 the rest (flagged via ``single_logit``).
    """
    fs = list(fs)
    if not fs:
        raise StructuralError("no membership functions")
    bounds = fs[0].bounds
    for s in fs[1:]:
        if s.bounds != bounds:
            raise StructuralError("membership skeletons disagree on bounds")
    single_logit = len(fs) == 1
    if single_logit:
        f = fs[0]
        zero = Skeleton(
            bounds,
            [
                LinearRegion(
                    r.polygon, np.zeros(f.dim), 0.0, steps=[v.step for v in r.vertices]
                )
                for r in f.regions
            ],
        )
        fs = [zero, f]

    tiles = _common_tiles(fs)
    by_class: dict[int, list[Polygon]] = {}
    for poly, grads, offs in tiles:
        for c, regs in _assign_tile(poly, grads, offs).items():
            by_class.setdefault(c, []).extend(regs)

    merged: list[MembershipPolygon] = []
    for c in sorted(by_class):
        for poly in geometry.union_adjacent(by_class[c]):
            merged.append(MembershipPolygon(poly, c))

    if bounds.dim == 1:
        boundary = _boundary_points_1d(merged)
    else:
        boundary = _boundary_segments(merged)
    return DecisionMap(
        bounds=bounds,
        polygons=tuple(merged),
        boundary=tuple(boundary),
        num_classes=len(fs),
        single_logit=single_logit,
    )


def _decision_tree(dm: DecisionMap) -> shapely.STRtree:
    if dm._tree is None:
        dm._tree = shapely.STRtree([mp.polygon.shapely for mp in dm.polygons])
    return dm._tree


def classify(dm: DecisionMap, x) -> int:
    """Class of the membership polygon containing ``x``.

    Points on a boundary take the lowest adjacent class index; points outside
    the bounds raise OutOfDomainError.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not dm.bounds.contains(x):
        raise OutOfDomainError(f"{x.tolist()} outside bounds {dm.bounds}")
    if dm.bounds.dim == 1:
        hits = [
            mp.class_index
            for mp in dm.polygons
            if geometry.contains(mp.polygon, x) in ("inside", "on-boundary")
        ]
        if hits:
            return min(hits)
        raise StructuralError(f"no membership polygon covers {x.tolist()}")
    pt = shapely.points(x)
    hits = _decision_tree(dm).query(pt, predicate="intersects")
    if hits.size:
        return min(dm.polygons[int(i)].class_index for i in hits)
    best, best_d = -1, np.inf
    for i, mp in enumerate(dm.polygons):
        d = shapely.distance(mp.polygon.shapely, pt)
        if d < best_d:
            best, best_d = i, d
    if best >= 0 and best_d <= 10 * EPS_GEOM:
        return dm.polygons[best].class_index
    raise StructuralError(f"no membership polygon covers {x.tolist()}")


def classify_many(dm: DecisionMap, xs: np.ndarray) -> np.ndarray:
    """Vectorized classify over an (N, n0) array of in-bounds points."""
    xs = np.asarray(xs, dtype=np.float64)
    if dm.bounds.dim == 1:
        return np.array([classify(dm, x) for x in xs])
    pts = shapely.points(xs)
    pt_idx, poly_idx = _decision_tree(dm).query(pts, predicate="intersects")
    out = np.full(len(xs), -1, dtype=np.int64)
    classes = np.array([mp.class_index for mp in dm.polygons])
    for p, c in zip(pt_idx, classes[poly_idx]):
        if out[p] < 0 or c < out[p]:
            out[p] = c
    for p in np.flatnonzero(out < 0):
        out[p] = classify(dm, xs[p])
    return out
