"""Layer-by-layer extraction of membership-function skeletons.

Starting from the first layer's affine pre-activations (one region each),
every layer alternates two steps: clamp each pre-activation skeleton at zero
(splitting the regions its zero-set crosses, then re-merging neighbors that
ended up with the same affine form), and combine the clamped skeletons into
the next layer's pre-activations on the common refinement of their
tessellations. The output layer is combined but never clamped, yielding one
skeleton per output neuron.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely

from . import geometry
from .errors import StructuralError, UnsupportedDimensionError
from .geometry import EPS_AREA, EPS_GEOM, Hyperrectangle, Polygon
from .skeleton import (
    LinearRegion,
    Network,
    Skeleton,
    initial_skeleton,
    step_order,
    vertex_key,
)

# Affine forms are merged only when equal to ~1e-12 relative; pieces cut from
# the same source region carry bit-identical affine data, so anything looser
# would risk gluing genuinely different pieces of a nearly-flat function.
MERGE_TOL = 1e-12


@dataclass
class StageRecord:
    tag: str
    skeletons: tuple


def _build_skeleton(
    bounds: Hyperrectangle,
    pieces: list[tuple[Polygon, np.ndarray, float]],
    step: str,
    parents: list[Skeleton],
) -> Skeleton:
    """Assemble regions, inheriting creation steps for vertices seen before."""
    tags: dict[tuple, str] = {}
    for parent in parents:
        for key, tag in parent.step_tags().items():
            prev = tags.get(key)
            if prev is None or step_order(tag) < step_order(prev):
                tags[key] = tag
    regions = []
    for poly, grad, off in pieces:
        steps = [tags.get(vertex_key(p), step) for p in poly.vertices]
        regions.append(LinearRegion(poly, grad, off, steps=steps))
    regions.sort(key=lambda r: tuple(r.polygon.vertices[0]))
    return Skeleton(bounds, regions)


def _affine_scale(grad: np.ndarray, off: float) -> float:
    return 1.0 + float(np.max(np.abs(grad))) + abs(off)


def _merge_same_affine(
    pieces: list[tuple[Polygon, np.ndarray, float]]
) -> list[tuple[Polygon, np.ndarray, float]]:
    """Union edge-adjacent pieces whose affine forms coincide."""
    order = sorted(
        range(len(pieces)),
        key=lambda i: (tuple(pieces[i][1]), pieces[i][2]),
    )
    groups: list[list[int]] = []
    for idx in order:
        if groups:
            head = pieces[groups[-1][0]]
            cand = pieces[idx]
            tol = MERGE_TOL * _affine_scale(head[1], head[2])
            if (
                np.max(np.abs(head[1] - cand[1])) <= tol
                and abs(head[2] - cand[2]) <= tol
            ):
                groups[-1].append(idx)
                continue
        groups.append([idx])
    out = []
    for group in groups:
        grad, off = pieces[group[0]][1], pieces[group[0]][2]
        for poly in geometry.union_adjacent([pieces[i][0] for i in group]):
            out.append((poly, grad, off))
    return out


def apply_relu(g: Skeleton, step: str | None = None, merge: bool = True) -> Skeleton:
    """Clamp a pre-activation skeleton at zero: f(x) = max(0, g(x)).

    Regions the zero-set crosses are split along it; pieces on the negative
    side become flat (gradient 0, offset 0). With ``merge`` enabled,
    neighboring pieces that end up with identical affine forms are unioned,
    which keeps the result a tessellation into linear regions rather than
    activation regions. New zero-crossing vertices are tagged with ``step``
    (inferred from the input's tags when omitted).
    """
    if step is None:
        kind, layer = g.max_step()[0], int(g.max_step()[1:])
        step = f"f{layer}" if kind == "g" else f"f{layer + 1}"
    pieces: list[tuple[Polygon, np.ndarray, float]] = []
    zero = np.zeros(g.dim)
    for region in g.regions:
        vals = region.polygon.vertices @ region.gradient + region.offset
        band = EPS_GEOM * (1.0 + float(np.linalg.norm(region.gradient)))
        if vals.min() >= -band:
            pieces.append((region.polygon, region.gradient, region.offset))
        elif vals.max() <= band:
            pieces.append((region.polygon, zero, 0.0))
        else:
            pos, neg = geometry.split_by_line(
                region.polygon, region.gradient, region.offset
            )
            pieces.extend((q, region.gradient, region.offset) for q in pos)
            pieces.extend((q, zero, 0.0) for q in neg)
    if merge:
        pieces = _merge_same_affine(pieces)
    return _build_skeleton(g.bounds, pieces, step, parents=[g])


def _refine_fold(
    current: list[tuple[Polygon, object]],
    regions,
    combine,
) -> list[tuple[Polygon, object]]:
    """One step of tessellation refinement: intersect every current piece
    with the regions of the next skeleton, combining carried state.

    The sub-pieces of every current piece must tile it exactly (both inputs
    tessellate the same bounds); a piece whose sub-pieces lose area hit a
    degenerate full-precision overlay and is redone with snap rounding.
    """
    out: list[tuple[Polygon, object]] = []
    if regions[0].polygon.dim == 1:
        for poly, state in current:
            for r2 in regions:
                for piece in geometry.intersect(poly, r2.polygon):
                    out.append((piece, combine(state, r2)))
        return out
    geoms = [r.polygon.shapely for r in regions]
    tree = shapely.STRtree(geoms)
    for poly, state in current:
        target = poly.shapely
        candidates = [int(j) for j in np.sort(tree.query(target, predicate="intersects"))]

        def pieces_of(grid_size):
            found = []
            for j in candidates:
                r2 = regions[j]
                other = r2.polygon.shapely
                if shapely.covers(other, target):
                    pieces = [poly]
                elif shapely.covers(target, other):
                    pieces = [r2.polygon]
                else:
                    pieces = geometry.intersect(poly, r2.polygon, grid_size=grid_size)
                found.extend((piece, r2) for piece in pieces)
            return found

        produced = pieces_of(None)
        covered = sum(piece.area for piece, _ in produced)
        if abs(covered - poly.area) > EPS_AREA * poly.area:
            produced = pieces_of(geometry.EPS_GEOM)
        out.extend((piece, combine(state, r2)) for piece, r2 in produced)
    return out


def merge_activations(
    fs, weights, bias: float, step: str | None = None
) -> Skeleton:
    """Weighted sum of activation skeletons on their common refinement.

    Folds left-to-right over the inputs: each step refines the running
    tessellation by pairwise intersection (full-dimensional pieces only) and
    adds the next skeleton's affine data scaled by its weight. Inputs whose
    weight is exactly zero are skipped; the bias enters once at the end.
    """
    fs = list(fs)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if len(fs) != weights.size:
        raise StructuralError(f"{len(fs)} skeletons but {weights.size} weights")
    if not fs:
        raise StructuralError("nothing to merge")
    bounds = fs[0].bounds
    for s in fs[1:]:
        if s.bounds != bounds:
            raise StructuralError("bounds mismatch between activation skeletons")
    if step is None:
        tag = max((s.max_step() for s in fs), key=step_order)
        layer = int(tag[1:])
        step = f"g{layer + 1}" if tag[0] == "f" else f"g{layer}"

    active = [(s, float(w)) for s, w in zip(fs, weights) if w != 0.0]
    if not active:
        poly = bounds.to_polygon()
        return _build_skeleton(
            bounds, [(poly, np.zeros(bounds.dim), float(bias))], step, parents=fs
        )

    first, w0 = active[0]
    current: list[tuple[Polygon, tuple[np.ndarray, float]]] = [
        (r.polygon, (w0 * r.gradient, w0 * r.offset)) for r in first.regions
    ]
    for nxt, w in active[1:]:
        current = _refine_fold(
            current,
            nxt.regions,
            lambda state, r2, w=w: (state[0] + w * r2.gradient, state[1] + w * r2.offset),
        )
    pieces = [(poly, grad, off + float(bias)) for poly, (grad, off) in current]
    return _build_skeleton(bounds, pieces, step, parents=fs)


def run_skelex(
    net: Network,
    bounds: Hyperrectangle,
    merge: bool = True,
    trace: list[StageRecord] | None = None,
) -> list[Skeleton]:
    """Extract one membership-function skeleton per output neuron.

    Hidden layers alternate clamping and merging; the final linear layer is
    merged only. With ``merge=False`` the same-affine union after clamping is
    skipped, so region counts reflect activation regions instead of linear
    regions (the encoded functions are identical either way). ``trace``, when
    given, receives a StageRecord per pipeline stage.
    """
    if net.input_dim not in (1, 2):
        raise UnsupportedDimensionError("only 1-D and 2-D input domains are supported")
    if net.input_dim != bounds.dim:
        raise StructuralError(
            f"network expects {net.input_dim}-D input, bounds are {bounds.dim}-D"
        )

    w1, b1 = net.layers[0]
    current = [initial_skeleton(w1[j], b1[j], bounds, step="g1") for j in range(len(b1))]
    if trace is not None:
        trace.append(StageRecord("g1", tuple(current)))

    for i in range(1, len(net.layers)):
        activations = [apply_relu(g, step=f"f{i}", merge=merge) for g in current]
        if trace is not None:
            trace.append(StageRecord(f"f{i}", tuple(activations)))
        w, b = net.layers[i]
        current = [
            merge_activations(activations, w[m], b[m], step=f"g{i + 1}")
            for m in range(len(b))
        ]
        if trace is not None:
            trace.append(StageRecord(f"g{i + 1}", tuple(current)))
    return current
