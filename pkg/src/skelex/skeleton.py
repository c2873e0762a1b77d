"""Skeleton data model: a tessellation of a bounded domain into linear regions.

A skeleton encodes one piecewise-linear function as regions that tile the
input hyperrectangle, each carrying an affine form (gradient, offset). Vertex
values are cached alongside but the affine pair is authoritative; cached
values are re-derived from it so float drift cannot accumulate. Each vertex
also carries the tag of the pipeline stage that created it ("g1", "f1",
"g2", ...) which is used for visualization only and never for computation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import shapely

from . import geometry
from .errors import InputError, OutOfDomainError, StructuralError
from .geometry import EPS_AREA, EPS_GEOM, Hyperrectangle, Polygon

# Relative tolerance for function-value comparisons; accounts for float error
# accumulated across layers.
EPS_VAL = 1e-6

_STEP_RE = re.compile(r"^([gf])(\d+)$")


def step_order(tag: str) -> int:
    """Total order of creation-step tags: g1 < f1 < g2 < f2 < ..."""
    m = _STEP_RE.match(tag)
    if not m:
        raise InputError(f"malformed creation-step tag: {tag!r}")
    kind, layer = m.group(1), int(m.group(2))
    return 2 * (layer - 1) + (0 if kind == "g" else 1)


@dataclass(frozen=True)
class Vertex:
    point: np.ndarray
    value: float
    step: str

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise InputError(f"non-finite vertex value at {self.point}")


class LinearRegion:
    """A polygon together with the affine form the function takes on it."""

    __slots__ = ("polygon", "gradient", "offset", "vertices")

    def __init__(self, polygon: Polygon, gradient, offset: float, steps=None, values=None):
        gradient = np.asarray(gradient, dtype=np.float64).reshape(-1)
        if gradient.size != polygon.dim:
            raise StructuralError(
                f"gradient dimension {gradient.size} != polygon dimension {polygon.dim}"
            )
        if not (np.all(np.isfinite(gradient)) and np.isfinite(offset)):
            raise InputError("non-finite affine data")
        gradient.setflags(write=False)
        if values is None:
            values = polygon.vertices @ gradient + offset
        else:
            values = np.asarray(values, dtype=np.float64).reshape(-1)
            if values.size != len(polygon.vertices):
                raise StructuralError("one value per polygon vertex required")
        if steps is None:
            steps = ["g1"] * len(values)
        elif len(steps) != len(values):
            raise StructuralError("one creation step per polygon vertex required")
        verts = tuple(
            Vertex(point=p, value=float(v), step=s)
            for p, v, s in zip(polygon.vertices, values, steps)
        )
        object.__setattr__(self, "polygon", polygon)
        object.__setattr__(self, "gradient", gradient)
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "vertices", verts)

    def __setattr__(self, name, value):
        raise AttributeError("LinearRegion is immutable")

    def value_at(self, x) -> float:
        return float(np.asarray(x, dtype=np.float64).reshape(-1) @ self.gradient + self.offset)

    def values_at(self, xs: np.ndarray) -> np.ndarray:
        return xs @ self.gradient + self.offset

    def __repr__(self):
        return (
            f"LinearRegion(gradient={self.gradient.tolist()}, offset={self.offset}, "
            f"vertices={len(self.vertices)})"
        )


class Skeleton:
    """A tessellation of ``bounds`` into linear regions encoding one PL function."""

    __slots__ = ("bounds", "regions", "_tree")

    def __init__(self, bounds: Hyperrectangle, regions):
        regions = tuple(regions)
        if not regions:
            raise StructuralError("a skeleton needs at least one region")
        for r in regions:
            if r.polygon.dim != bounds.dim:
                raise StructuralError("region dimension != bounds dimension")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "_tree", None)

    def __setattr__(self, name, value):
        raise AttributeError("Skeleton is immutable")

    @property
    def dim(self) -> int:
        return self.bounds.dim

    def _region_tree(self) -> shapely.STRtree:
        if self._tree is None:
            tree = shapely.STRtree([r.polygon.shapely for r in self.regions])
            object.__setattr__(self, "_tree", tree)
        return self._tree

    def region_index_of(self, x) -> int:
        """Index of a region containing ``x`` (lowest index on shared edges)."""
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if not self.bounds.contains(x):
            raise OutOfDomainError(f"{x.tolist()} outside bounds {self.bounds}")
        if self.dim == 1:
            for i, r in enumerate(self.regions):
                lo, hi = r.polygon.vertices[0, 0], r.polygon.vertices[1, 0]
                if lo - EPS_GEOM <= x[0] <= hi + EPS_GEOM:
                    return i
            raise StructuralError(f"no region covers {x.tolist()}")
        pt = shapely.points(x)
        hits = self._region_tree().query(pt, predicate="intersects")
        if hits.size:
            return int(hits.min())
        # tolerance fallback for points in sub-eps gaps between regions
        cand = self._region_tree().query(shapely.buffer(pt, 10 * EPS_GEOM))
        best, best_d = -1, np.inf
        for i in np.sort(cand):
            d = shapely.distance(self.regions[int(i)].polygon.shapely, pt)
            if d < best_d:
                best, best_d = int(i), d
        if best >= 0 and best_d <= 10 * EPS_GEOM:
            return best
        raise StructuralError(f"no region covers {x.tolist()}")

    def evaluate(self, x) -> float:
        """Value of the encoded function at ``x`` (must lie within bounds)."""
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        return self.regions[self.region_index_of(x)].value_at(x)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluate over an (N, n0) array of in-bounds points."""
        xs = np.asarray(xs, dtype=np.float64)
        if self.dim == 1:
            return np.array([self.evaluate(x) for x in xs])
        pts = shapely.points(xs)
        pt_idx, reg_idx = self._region_tree().query(pts, predicate="intersects")
        owner = np.full(len(xs), -1, dtype=np.int64)
        # lowest region index wins on shared edges
        order = np.lexsort((reg_idx, pt_idx))
        seen = np.zeros(len(xs), dtype=bool)
        for p, r in zip(pt_idx[order], reg_idx[order]):
            if not seen[p]:
                owner[p] = r
                seen[p] = True
        for p in np.flatnonzero(owner < 0):
            owner[p] = self.region_index_of(xs[p])
        grads = np.stack([r.gradient for r in self.regions])
        offs = np.array([r.offset for r in self.regions])
        return np.einsum("ij,ij->i", xs, grads[owner]) + offs[owner]

    def step_tags(self) -> dict[tuple, str]:
        """Map from rounded vertex coordinates to earliest creation step."""
        tags: dict[tuple, str] = {}
        for r in self.regions:
            for v in r.vertices:
                key = vertex_key(v.point)
                prev = tags.get(key)
                if prev is None or step_order(v.step) < step_order(prev):
                    tags[key] = v.step
        return tags

    def max_step(self) -> str:
        best = "g1"
        for r in self.regions:
            for v in r.vertices:
                if step_order(v.step) > step_order(best):
                    best = v.step
        return best

    def __repr__(self):
        return f"Skeleton({len(self.regions)} regions, bounds={self.bounds})"


def vertex_key(point: np.ndarray) -> tuple:
    """Hashable key identifying a vertex location up to EPS_GEOM snapping."""
    return tuple(np.round(np.asarray(point, dtype=np.float64), 9).tolist())


class Network:
    """Fully-connected net: ReLU after every layer except the linear last one."""

    __slots__ = ("layers",)

    def __init__(self, layers):
        if not layers:
            raise InputError("a network needs at least one layer")
        norm = []
        prev = None
        for li, (w, b) in enumerate(layers):
            w = np.asarray(w, dtype=np.float64)
            b = np.asarray(b, dtype=np.float64).reshape(-1)
            if w.ndim != 2:
                raise InputError(f"layer {li}: weight matrix must be 2-D, got {w.shape}")
            if w.shape[0] != b.size:
                raise InputError(f"layer {li}: {w.shape[0]} rows but {b.size} biases")
            if prev is not None and w.shape[1] != prev:
                raise InputError(
                    f"layer {li}: expected {prev} inputs, weight matrix has {w.shape[1]}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise InputError(f"layer {li}: non-finite parameters")
            w.setflags(write=False)
            b.setflags(write=False)
            prev = w.shape[0]
            norm.append((w, b))
        object.__setattr__(self, "layers", tuple(norm))

    def __setattr__(self, name, value):
        raise AttributeError("Network is immutable")

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @property
    def hidden_widths(self) -> list[int]:
        return [w.shape[0] for w, _ in self.layers[:-1]]

    def __repr__(self):
        dims = [self.input_dim] + self.hidden_widths + [self.output_dim]
        return f"Network({'-'.join(map(str, dims))})"


def initial_skeleton(a, c: float, bounds: Hyperrectangle, step: str = "g1") -> Skeleton:
    """Single-region skeleton of the affine function a.x + c over ``bounds``."""
    poly = bounds.to_polygon()
    region = LinearRegion(poly, a, c, steps=[step] * len(poly.vertices))
    return Skeleton(bounds, [region])


def linear_combination(skeletons, weights, bias: float) -> Skeleton:
    """Combine same-tessellation skeletons region-by-region.

    Output gradient/offset are the weighted sums of the inputs' affine data
    plus ``bias``; vertex values follow from the affine form. Raises
    StructuralError when the tessellations do not match region-for-region.
    """
    skeletons = list(skeletons)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if len(skeletons) != weights.size:
        raise StructuralError(f"{len(skeletons)} skeletons but {weights.size} weights")
    if not skeletons:
        raise StructuralError("nothing to combine")
    base = skeletons[0]
    for s in skeletons[1:]:
        if s.bounds != base.bounds:
            raise StructuralError("bounds mismatch")
        if len(s.regions) != len(base.regions):
            raise StructuralError("tessellation mismatch: different region counts")
        for r1, r2 in zip(base.regions, s.regions):
            if not r1.polygon.close_to(r2.polygon, tol=EPS_GEOM):
                raise StructuralError("tessellation mismatch: different region polygons")
    out_regions = []
    for i, r0 in enumerate(base.regions):
        grad = np.zeros(base.dim)
        off = float(bias)
        for w, s in zip(weights, skeletons):
            grad = grad + w * s.regions[i].gradient
            off += w * s.regions[i].offset
        out_regions.append(
            LinearRegion(r0.polygon, grad, off, steps=[v.step for v in r0.vertices])
        )
    return Skeleton(base.bounds, out_regions)


@dataclass
class ValidationReport:
    passed: bool = True
    failures: list = field(default_factory=list)

    def fail(self, check: str, regions, detail: str):
        self.passed = False
        self.failures.append((check, tuple(regions), detail))

    def __str__(self):
        if self.passed:
            return "skeleton valid"
        lines = [f"{c} @ regions {r}: {d}" for c, r, d in self.failures]
        return "skeleton INVALID:\n  " + "\n  ".join(lines)


def validate(s: Skeleton) -> ValidationReport:
    """Check the skeleton invariants: affine-consistent vertex values,
    area-conserving tessellation, no overlaps, and edge continuity."""
    report = ValidationReport()
    bounds_area = s.bounds.area

    for i, r in enumerate(s.regions):
        for v in r.vertices:
            expect = r.value_at(v.point)
            if abs(v.value - expect) > EPS_VAL * (1.0 + abs(v.value)):
                report.fail("affine-consistency", [i], f"vertex {v.point.tolist()}")
        lo_ok = np.all(r.polygon.vertices >= s.bounds.bounds[:, 0] - 1e2 * EPS_GEOM)
        hi_ok = np.all(r.polygon.vertices <= s.bounds.bounds[:, 1] + 1e2 * EPS_GEOM)
        if not (lo_ok and hi_ok):
            report.fail("within-bounds", [i], "region leaves the hyperrectangle")

    total = sum(r.polygon.area for r in s.regions)
    if abs(total - bounds_area) > EPS_AREA * bounds_area:
        report.fail(
            "area-conservation", [], f"regions sum to {total}, bounds area {bounds_area}"
        )

    if s.dim == 1:
        ivs = sorted(range(len(s.regions)), key=lambda i: s.regions[i].polygon.vertices[0, 0])
        for a, b in zip(ivs, ivs[1:]):
            hi_a = s.regions[a].polygon.vertices[1, 0]
            lo_b = s.regions[b].polygon.vertices[0, 0]
            if lo_b - hi_a < -EPS_GEOM:
                report.fail("interior-disjoint", [a, b], "overlapping intervals")
            x = 0.5 * (hi_a + lo_b)
            va = s.regions[a].value_at([x])
            vb = s.regions[b].value_at([x])
            if abs(va - vb) > EPS_VAL * (1.0 + abs(va)):
                report.fail("edge-continuity", [a, b], f"jump at x={x}")
        return report

    geoms = [r.polygon.shapely for r in s.regions]
    union = shapely.union_all(geoms)
    if abs(union.area - bounds_area) > EPS_AREA * bounds_area:
        # rule out a degenerate full-precision union before failing
        union = shapely.union_all(geoms, grid_size=EPS_GEOM)
    if abs(union.area - bounds_area) > EPS_AREA * bounds_area:
        report.fail("coverage", [], f"union area {union.area} vs bounds {bounds_area}")
    if abs(union.area - total) > EPS_AREA * bounds_area:
        report.fail("interior-disjoint", [], "region areas double-count overlap")

    tree = shapely.STRtree(geoms)
    left, right = tree.query(geoms, predicate="intersects")
    for i, j in zip(left.tolist(), right.tolist()):
        if i >= j:
            continue
        for p0, p1 in geometry.shared_edge_segments(s.regions[i].polygon, s.regions[j].polygon):
            # the value difference is affine along the edge: two probes suffice
            for x in (p0, 0.5 * (p0 + p1), p1):
                vi = s.regions[i].value_at(x)
                vj = s.regions[j].value_at(x)
                if abs(vi - vj) > EPS_VAL * (1.0 + abs(vi)):
                    report.fail("edge-continuity", [i, j], f"jump at {x.tolist()}")
                    break
    return report
