"""Robust 1-D and 2-D polygon arithmetic underpinning the tessellation pipeline.

Polygons are explicit vertex loops (counter-clockwise for 2-D, ``[lo, hi]``
intervals for 1-D), never half-plane lists: merged regions can be non-convex.
2-D boolean operations (half-plane clipping, intersection, union) are
delegated to GEOS through shapely; areas, orientation, normalization and all
1-D cases are computed directly.

All functions are pure: inputs are never mutated and outputs are newly
allocated, so values can be shared freely between workers.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import Point as _ShapelyPoint
from shapely.geometry import Polygon as _ShapelyPolygon

from .errors import GeometryError, UnsupportedDimensionError

# Absolute tolerance for vertex snapping / collinearity; matches
# double-precision headroom for coordinate magnitudes up to ~1e3.
EPS_GEOM = 1e-9
# Relative tolerance for area bookkeeping (sliver discarding, conservation).
EPS_AREA = 1e-9


def as_point(coords) -> np.ndarray:
    """Validate and return a point as a float64 vector of dimension 1 or 2."""
    x = np.asarray(coords, dtype=np.float64).reshape(-1)
    if x.size not in (1, 2):
        raise UnsupportedDimensionError(f"points must be 1-D or 2-D, got {x.size}-D")
    if not np.all(np.isfinite(x)):
        raise GeometryError(f"non-finite point coordinates: {x}")
    return x


def shoelace_area(vertices: np.ndarray) -> float:
    """Signed area of a closed 2-D vertex loop (positive for CCW)."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _dedupe_ring(verts: np.ndarray) -> np.ndarray:
    """Drop consecutive (and wrap-around) vertices closer than EPS_GEOM."""
    kept = [verts[0]]
    for v in verts[1:]:
        if np.max(np.abs(v - kept[-1])) > EPS_GEOM:
            kept.append(v)
    if len(kept) > 1 and np.max(np.abs(kept[-1] - kept[0])) <= EPS_GEOM:
        kept.pop()
    return np.array(kept, dtype=np.float64)


def _drop_collinear(verts: np.ndarray) -> np.ndarray:
    """Drop vertices lying within EPS_GEOM of the segment joining their neighbors."""
    changed = True
    while changed and len(verts) > 3:
        changed = False
        n = len(verts)
        keep = np.ones(n, dtype=bool)
        for i in range(n):
            if not keep[i]:
                continue
            u = verts[(i - 1) % n]
            v = verts[i]
            w = verts[(i + 1) % n]
            d = w - u
            seg = np.hypot(d[0], d[1])
            if seg <= EPS_GEOM:
                continue
            dist = abs(d[0] * (v[1] - u[1]) - d[1] * (v[0] - u[0])) / seg
            if dist <= EPS_GEOM:
                keep[i] = False
                changed = True
                # avoid cascading removals against already-dropped neighbors
                break
        verts = verts[keep]
    return verts


class Polygon:
    """A simple polygon (2-D, CCW) or a closed interval (1-D).

    Vertices are normalized on construction: consecutive duplicates and
    collinear vertices are removed, orientation is forced counter-clockwise,
    and the vertex loop is rotated so the lexicographically smallest vertex
    comes first. Instances are immutable.
    """

    __slots__ = ("_vertices", "_shapely")

    def __init__(self, vertices, *, _trusted: bool = False):
        verts = np.asarray(vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] not in (1, 2):
            raise GeometryError(f"vertex array must be (N, 1) or (N, 2), got {verts.shape}")
        if not np.all(np.isfinite(verts)):
            raise GeometryError("non-finite vertex coordinates")
        if verts.shape[1] == 1:
            if verts.shape[0] != 2:
                raise GeometryError("1-D polygon must be a [lo, hi] interval")
            lo, hi = float(verts[0, 0]), float(verts[1, 0])
            if not lo < hi:
                raise GeometryError(f"degenerate interval [{lo}, {hi}]")
            verts = np.array([[lo], [hi]])
        else:
            verts = _dedupe_ring(verts)
            if len(verts) >= 4:
                verts = _drop_collinear(verts)
            if len(verts) < 3:
                raise GeometryError("2-D polygon needs at least 3 distinct vertices")
            signed = shoelace_area(verts)
            if signed < 0:
                verts = verts[::-1]
                signed = -signed
            if signed <= 0.0:
                raise GeometryError("polygon has non-positive area")
            if not _trusted and not _ShapelyPolygon(verts).is_valid:
                raise GeometryError("polygon is self-intersecting or otherwise invalid")
            start = int(np.lexsort((verts[:, 1], verts[:, 0]))[0])
            verts = np.roll(verts, -start, axis=0)
        verts.setflags(write=False)
        object.__setattr__(self, "_vertices", verts)
        object.__setattr__(self, "_shapely", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polygon is immutable")

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def dim(self) -> int:
        return self._vertices.shape[1]

    @property
    def area(self) -> float:
        if self.dim == 1:
            return float(self._vertices[1, 0] - self._vertices[0, 0])
        return shoelace_area(self._vertices)

    @property
    def shapely(self) -> _ShapelyPolygon:
        """Cached GEOS geometry (2-D only)."""
        if self.dim != 2:
            raise UnsupportedDimensionError("no shapely form for 1-D intervals")
        if self._shapely is None:
            geom = _ShapelyPolygon(self._vertices)
            shapely.prepare(geom)
            object.__setattr__(self, "_shapely", geom)
        return self._shapely

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Polygon":
        return cls(np.array([[lo], [hi]], dtype=np.float64))

    @classmethod
    def from_shapely(cls, geom: _ShapelyPolygon) -> "Polygon":
        if geom.interiors:
            raise GeometryError("polygons with holes are not supported")
        return cls(np.asarray(geom.exterior.coords)[:-1], _trusted=True)

    def __repr__(self):
        return f"Polygon({self._vertices.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, Polygon):
            return NotImplemented
        return self._vertices.shape == other._vertices.shape and np.array_equal(
            self._vertices, other._vertices
        )

    def __hash__(self):
        return hash(self._vertices.tobytes())

    def close_to(self, other: "Polygon", tol: float = EPS_GEOM) -> bool:
        """Vertex-wise equality within ``tol`` (same normalization assumed)."""
        return self._vertices.shape == other._vertices.shape and bool(
            np.all(np.abs(self._vertices - other._vertices) <= tol)
        )


class Hyperrectangle:
    """Axis-aligned bounding box of the input domain, per-dimension [min, max]."""

    __slots__ = ("_bounds",)

    def __init__(self, bounds):
        b = np.asarray(bounds, dtype=np.float64)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] not in (1, 2):
            raise GeometryError(f"bounds must be (n0, 2) with n0 in {{1, 2}}, got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise GeometryError("non-finite bounds")
        if not np.all(b[:, 0] < b[:, 1]):
            raise GeometryError(f"empty hyperrectangle: {b.tolist()}")
        b.setflags(write=False)
        object.__setattr__(self, "_bounds", b)

    def __setattr__(self, name, value):
        raise AttributeError("Hyperrectangle is immutable")

    @property
    def bounds(self) -> np.ndarray:
        return self._bounds

    @property
    def dim(self) -> int:
        return self._bounds.shape[0]

    @property
    def area(self) -> float:
        return float(np.prod(self._bounds[:, 1] - self._bounds[:, 0]))

    def to_polygon(self) -> Polygon:
        b = self._bounds
        if self.dim == 1:
            return Polygon.interval(b[0, 0], b[0, 1])
        (x0, x1), (y0, y1) = b
        return Polygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def corners(self) -> np.ndarray:
        return self.to_polygon().vertices

    def contains(self, x: np.ndarray, tol: float = EPS_GEOM) -> bool:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        return bool(
            np.all(x >= self._bounds[:, 0] - tol) and np.all(x <= self._bounds[:, 1] + tol)
        )

    def __eq__(self, other):
        if not isinstance(other, Hyperrectangle):
            return NotImplemented
        return np.array_equal(self._bounds, other._bounds)

    def __hash__(self):
        return hash(self._bounds.tobytes())

    def __repr__(self):
        return f"Hyperrectangle({self._bounds.tolist()})"


def area(p: Polygon) -> float:
    """Shoelace area of a 2-D polygon; interval length in 1-D. Always > 0."""
    return p.area


def _polygonal_pieces(geom, min_area: float) -> list[Polygon]:
    """Extract full-dimensional pieces from a GEOS result, dropping slivers."""
    pieces: list[Polygon] = []
    if geom.is_empty:
        return pieces
    if geom.geom_type == "Polygon":
        parts: Iterable = [geom]
    elif geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        parts = [g for g in geom.geoms if g.geom_type == "Polygon"]
    else:
        return pieces
    for g in parts:
        if g.area >= min_area:
            try:
                pieces.append(Polygon.from_shapely(g))
            except GeometryError:
                # sliver below geometric resolution (collapses when snapped)
                continue
    pieces.sort(key=lambda q: tuple(q.vertices[0]))
    return pieces


def _halfplane_quad(p: Polygon, a: np.ndarray, c: float, side: int) -> _ShapelyPolygon:
    """A quad covering ``p`` clipped to side*(a.x + c) >= 0.

    Both sides share the same two on-line corner points so that the pieces of
    a split share their crossing vertices exactly.
    """
    verts = p.vertices
    norm_a = float(np.linalg.norm(a))
    n_hat = a / norm_a
    d_hat = np.array([-n_hat[1], n_hat[0]])
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    center = 0.5 * (lo + hi)
    foot = center - ((center @ a + c) / norm_a) * n_hat
    reach = 4.0 * (float(np.linalg.norm(hi - lo)) + 1.0)
    p0 = foot - reach * d_hat
    p1 = foot + reach * d_hat
    shift = side * reach * n_hat
    return _ShapelyPolygon([p0, p1, p1 + shift, p0 + shift])


def _clip_halfplane(p: Polygon, a, c: float, side: int, grid_size=None) -> list[Polygon]:
    geom = shapely.intersection(
        p.shapely, _halfplane_quad(p, a, c, side), grid_size=grid_size
    )
    return _polygonal_pieces(geom, EPS_AREA * p.area)


def split_by_line(
    p: Polygon, a, c: float
) -> tuple[list[Polygon], list[Polygon]]:
    """Split ``p`` along the zero-set of the affine form a.x + c.

    Returns ``(pos, neg)`` piece lists covering ``{a.x + c >= 0}`` and
    ``{a.x + c <= 0}``. Pieces are closed, so vertices on the line belong to
    both sides. A side that the line does not reach comes back empty.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    if a.size != p.dim:
        raise GeometryError(f"gradient dimension {a.size} != polygon dimension {p.dim}")
    if not (np.all(np.isfinite(a)) and np.isfinite(c)):
        raise GeometryError("non-finite affine form")
    vals = p.vertices @ a + float(c)
    band = EPS_GEOM * (1.0 + float(np.linalg.norm(a)))
    if vals.min() >= -band:
        return [p], []
    if vals.max() <= band:
        return [], [p]

    if p.dim == 1:
        lo, hi = p.vertices[0, 0], p.vertices[1, 0]
        x_star = float(np.clip(-c / a[0], lo, hi))
        left = Polygon.interval(lo, x_star)
        right = Polygon.interval(x_star, hi)
        if vals[0] > 0:
            return [left], [right]
        return [right], [left]

    pos = _clip_halfplane(p, a, c, +1)
    neg = _clip_halfplane(p, a, c, -1)
    total = sum(q.area for q in pos) + sum(q.area for q in neg)
    if abs(total - p.area) > EPS_AREA * p.area:
        # full-precision overlay collapsed a near-degenerate wedge; the
        # snap-rounding overlay is robust for these configurations
        pos = _clip_halfplane(p, a, c, +1, grid_size=EPS_GEOM)
        neg = _clip_halfplane(p, a, c, -1, grid_size=EPS_GEOM)
    return pos, neg


def intersect(p: Polygon, q: Polygon, grid_size=None) -> list[Polygon]:
    """Full-dimensional pieces of p ∩ q; slivers below EPS_AREA are discarded."""
    if p.dim != q.dim:
        raise GeometryError("dimension mismatch in intersection")
    if p.dim == 1:
        lo = max(p.vertices[0, 0], q.vertices[0, 0])
        hi = min(p.vertices[1, 0], q.vertices[1, 0])
        if hi - lo <= EPS_AREA * min(p.area, q.area):
            return []
        return [Polygon.interval(lo, hi)]
    min_area = EPS_AREA * min(p.area, q.area)
    return _polygonal_pieces(
        shapely.intersection(p.shapely, q.shapely, grid_size=grid_size), min_area
    )


def _collinear_overlap(a, b, c, d, tol: float):
    """Overlap of segment (c, d) projected onto segment (a, b), or None.

    Segments count as overlapping only when (c, d) lies within ``tol`` of the
    supporting line of (a, b) and the parameter intervals intersect in more
    than a point.
    """
    dvec = b - a
    length = float(np.hypot(dvec[0], dvec[1]))
    if length <= tol:
        return None
    u = dvec / length
    dist_c = abs((c[0] - a[0]) * u[1] - (c[1] - a[1]) * u[0])
    dist_d = abs((d[0] - a[0]) * u[1] - (d[1] - a[1]) * u[0])
    if dist_c > tol or dist_d > tol:
        return None
    tc = (c - a) @ u
    td = (d - a) @ u
    lo = max(0.0, min(tc, td))
    hi = min(length, max(tc, td))
    if hi - lo <= 10.0 * tol:
        return None
    return a + lo * u, a + hi * u


def shared_edge_segments(
    p: Polygon, q: Polygon, tol: float = EPS_GEOM
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Straight pieces where the boundaries of two 2-D polygons coincide.

    Works entirely on the vertex loops with a tolerance band, so boundaries
    produced by independent clipping operations (coincident only up to float
    noise) are still recognized as shared. Point contacts yield nothing.
    """
    pv = p.vertices
    qv = q.vertices
    p_segs = list(zip(pv, np.roll(pv, -1, axis=0)))
    q_segs = list(zip(qv, np.roll(qv, -1, axis=0)))
    out = []
    for a, b in p_segs:
        lo = np.minimum(a, b) - tol
        hi = np.maximum(a, b) + tol
        for c, d in q_segs:
            if np.any(np.minimum(c, d) > hi) or np.any(np.maximum(c, d) < lo):
                continue
            piece = _collinear_overlap(a, b, c, d, tol)
            if piece is not None:
                out.append(piece)
    return out


def shared_edge_length(p: Polygon, q: Polygon, tol: float = EPS_GEOM) -> float:
    return sum(float(np.linalg.norm(p1 - p0)) for p0, p1 in shared_edge_segments(p, q, tol))


def union_adjacent(ps: Sequence[Polygon]) -> list[Polygon]:
    """Merge edge-adjacent polygons into simple polygons.

    Point contact is not adjacency. A merge that would punch a hole is
    refused and that component's input polygons are returned unchanged.
    Inputs must be pairwise interior-disjoint.
    """
    if not ps:
        return []
    if any(p.dim != ps[0].dim for p in ps):
        raise GeometryError("mixed dimensions in union_adjacent")

    if ps[0].dim == 1:
        ivs = sorted(ps, key=lambda p: p.vertices[0, 0])
        merged: list[list[float]] = [[ivs[0].vertices[0, 0], ivs[0].vertices[1, 0]]]
        for iv in ivs[1:]:
            lo, hi = iv.vertices[0, 0], iv.vertices[1, 0]
            if lo - merged[-1][1] <= EPS_GEOM:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [Polygon.interval(lo, hi) for lo, hi in merged]

    n = len(ps)
    geoms = [p.shapely for p in ps]
    tree = shapely.STRtree(geoms)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    cand_left, cand_right = tree.query(geoms, predicate="intersects")
    for i, j in zip(cand_left.tolist(), cand_right.tolist()):
        if i >= j or find(i) == find(j):
            continue
        if shared_edge_length(ps[i], ps[j]) > EPS_GEOM:
            parent[find(i)] = find(j)

    components: dict[int, list[int]] = {}
    for i in range(n):
        components.setdefault(find(i), []).append(i)

    out: list[Polygon] = []
    for members in components.values():
        if len(members) == 1:
            out.append(ps[members[0]])
            continue
        merged = _merge_component([ps[i] for i in members], [geoms[i] for i in members])
        out.extend(merged)
    out.sort(key=lambda q: tuple(q.vertices[0]))
    return out


def _merge_component(pieces: list[Polygon], geoms) -> list[Polygon]:
    """Union one edge-connected component; refuse merges that punch holes.

    Float-noise artifacts (micro holes or slivers far below the area
    tolerance) are discarded; anything substantial aborts the merge and the
    original pieces are returned. A failed full-precision union is retried
    once with the snap-rounding overlay before giving up.
    """
    total = sum(p.area for p in pieces)
    noise = EPS_AREA * total

    def attempt(grid_size):
        merged_geom = shapely.union_all(geoms, grid_size=grid_size)
        if merged_geom.geom_type == "Polygon":
            parts = [merged_geom]
        elif merged_geom.geom_type == "MultiPolygon":
            parts = [g for g in merged_geom.geoms if g.area > noise]
            if len(parts) != 1:
                return None
        else:
            return None
        part = parts[0]
        if part.interiors:
            hole_area = sum(
                abs(shoelace_area(np.asarray(r.coords)[:-1])) for r in part.interiors
            )
            if hole_area > noise:
                return None
            part = _ShapelyPolygon(part.exterior)
        if abs(part.area - total) > max(noise, 1e-300):
            return None
        return [Polygon.from_shapely(part)]

    return attempt(None) or attempt(EPS_GEOM) or list(pieces)


def contains(p: Polygon, x) -> str:
    """Locate ``x`` relative to ``p``: 'inside', 'on-boundary' or 'outside'.

    The boundary band has absolute width EPS_GEOM.
    """
    x = as_point(x)
    if x.size != p.dim:
        raise GeometryError(f"point dimension {x.size} != polygon dimension {p.dim}")
    if p.dim == 1:
        lo, hi = p.vertices[0, 0], p.vertices[1, 0]
        if abs(x[0] - lo) <= EPS_GEOM or abs(x[0] - hi) <= EPS_GEOM:
            return "on-boundary"
        return "inside" if lo < x[0] < hi else "outside"
    pt = _ShapelyPoint(x)
    if p.shapely.exterior.distance(pt) <= EPS_GEOM:
        return "on-boundary"
    return "inside" if p.shapely.contains(pt) else "outside"
