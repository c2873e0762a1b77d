"""Interchange formats (network / skeleton / decision-map JSON, points CSV),
the reference forward pass, and deterministic SVG rendering.

JSON floats are serialized through Python's shortest round-trip repr, so
write -> read -> write is byte-identical. SVG output uses fixed 6-decimal
coordinates and canonical element ordering for the same reason.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boundex import BoundarySegment, DecisionMap, MembershipPolygon
from .errors import InputError
from .geometry import Hyperrectangle, Polygon
from .skeleton import LinearRegion, Network, Skeleton


# ---------------------------------------------------------------------------
# forward pass

def forward(net: Network, x) -> np.ndarray:
    """Reference semantics: affine layers with ReLU everywhere but the end."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != net.input_dim:
        raise InputError(f"expected {net.input_dim}-D input, got {x.size}-D")
    return forward_many(net, x[None, :])[0]


def forward_many(net: Network, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != net.input_dim:
        raise InputError(f"expected (N, {net.input_dim}) inputs, got {xs.shape}")
    acts = xs
    last = len(net.layers) - 1
    for i, (w, b) in enumerate(net.layers):
        acts = acts @ w.T + b
        if i < last:
            acts = np.maximum(acts, 0.0)
    return acts


# ---------------------------------------------------------------------------
# network JSON

def network_to_dict(net: Network, name: str | None = None, metadata: dict | None = None) -> dict:
    doc: dict = {"kind": "network", "input_dim": net.input_dim}
    if name is not None:
        doc["name"] = name
    doc["layers"] = [
        {
            "activation": "linear" if i == len(net.layers) - 1 else "relu",
            "weights": w.tolist(),
            "biases": b.tolist(),
        }
        for i, (w, b) in enumerate(net.layers)
    ]
    if metadata:
        doc["metadata"] = metadata
    return doc


def network_from_dict(doc: dict) -> Network:
    if doc.get("kind", "network") != "network":
        raise InputError(f"not a network document: kind={doc.get('kind')!r}")
    try:
        layers_doc = doc["layers"]
        layers = [(np.asarray(l["weights"], dtype=np.float64),
                   np.asarray(l["biases"], dtype=np.float64)) for l in layers_doc]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed network document: {exc}") from exc
    if not layers_doc:
        raise InputError("network document has no layers")
    for i, layer in enumerate(layers_doc):
        want = "linear" if i == len(layers_doc) - 1 else "relu"
        got = layer.get("activation", want)
        if got != want:
            raise InputError(
                f"layer {i} tagged {got!r}; hidden layers must be 'relu' and the last 'linear'"
            )
    net = Network(layers)
    declared = doc.get("input_dim")
    if declared is not None and declared != net.input_dim:
        raise InputError(
            f"input_dim {declared} does not match first layer width {net.input_dim}"
        )
    return net


# ---------------------------------------------------------------------------
# skeleton / decision map JSON

def skeleton_to_dict(s: Skeleton) -> dict:
    return {
        "kind": "skeleton",
        "bounds": s.bounds.bounds.tolist(),
        "regions": [
            {
                "gradient": r.gradient.tolist(),
                "offset": r.offset,
                "vertices": [
                    {"point": v.point.tolist(), "value": v.value, "step": v.step}
                    for v in r.vertices
                ],
            }
            for r in s.regions
        ],
    }


def skeleton_from_dict(doc: dict) -> Skeleton:
    if doc.get("kind") != "skeleton":
        raise InputError(f"not a skeleton document: kind={doc.get('kind')!r}")
    try:
        bounds = Hyperrectangle(doc["bounds"])
        regions = []
        for rd in doc["regions"]:
            file_pts = [tuple(map(float, v["point"])) for v in rd["vertices"]]
            poly = Polygon(np.asarray(file_pts))
            by_point = {p: (v["value"], v.get("step", "g1")) for p, v in zip(file_pts, rd["vertices"])}
            values, steps = [], []
            grad = np.asarray(rd["gradient"], dtype=np.float64)
            off = float(rd["offset"])
            for p in poly.vertices:
                rec = by_point.get(tuple(p.tolist()))
                if rec is None:
                    values.append(float(p @ grad + off))
                    steps.append("g1")
                else:
                    values.append(float(rec[0]))
                    steps.append(rec[1])
            regions.append(LinearRegion(poly, grad, off, steps=steps, values=values))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed skeleton document: {exc}") from exc
    return Skeleton(bounds, regions)


def decision_map_to_dict(dm: DecisionMap) -> dict:
    return {
        "kind": "decision_map",
        "bounds": dm.bounds.bounds.tolist(),
        "num_classes": dm.num_classes,
        "single_logit": dm.single_logit,
        "polygons": [
            {"class": mp.class_index, "vertices": mp.polygon.vertices.tolist()}
            for mp in dm.polygons
        ],
        "boundary": [
            {"classes": list(seg.classes), "p0": seg.p0.tolist(), "p1": seg.p1.tolist()}
            for seg in dm.boundary
        ],
    }


def decision_map_from_dict(doc: dict) -> DecisionMap:
    if doc.get("kind") != "decision_map":
        raise InputError(f"not a decision-map document: kind={doc.get('kind')!r}")
    try:
        bounds = Hyperrectangle(doc["bounds"])
        polygons = tuple(
            MembershipPolygon(Polygon(np.asarray(pd["vertices"])), int(pd["class"]))
            for pd in doc["polygons"]
        )
        boundary = tuple(
            BoundarySegment(
                np.asarray(sd["p0"], dtype=np.float64),
                np.asarray(sd["p1"], dtype=np.float64),
                tuple(int(c) for c in sd["classes"]),
            )
            for sd in doc["boundary"]
        )
        num_classes = int(doc["num_classes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed decision-map document: {exc}") from exc
    return DecisionMap(
        bounds=bounds,
        polygons=polygons,
        boundary=boundary,
        num_classes=num_classes,
        single_logit=bool(doc.get("single_logit", False)),
    )


def dump_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# points CSV

def read_points_csv(path, dim: int | None = None):
    """Read `x1[,x2][,label]` rows; returns (points array, labels or None)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty points file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:1] != ["x1"]:
        raise InputError(f"{path}: expected header starting with 'x1', got {rows[0]}")
    has_x2 = len(header) > 1 and header[1] == "x2"
    ncoord = 2 if has_x2 else 1
    has_label = len(header) > ncoord and header[ncoord] == "label"
    if dim is not None and ncoord != dim:
        raise InputError(f"{path}: {ncoord}-D points, expected {dim}-D")
    pts, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            pts.append([float(v) for v in row[:ncoord]])
            if has_label:
                labels.append(int(row[ncoord]))
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}:{lineno}: bad row {row}") from exc
    return np.asarray(pts, dtype=np.float64), (np.asarray(labels) if has_label else None)


def write_labels_csv(path, points: np.ndarray, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        coord_names = ["x1", "x2"][: points.shape[1]]
        writer.writerow(coord_names + ["label"])
        for p, lab in zip(points, labels):
            writer.writerow([repr(float(v)) for v in p] + [int(lab)])


# ---------------------------------------------------------------------------
# SVG rendering

# creation-step palette, cycling: g1, f1, g2, f2, g3, ...
STEP_COLORS = ["blue", "magenta", "cyan", "red", "green"]
CLASS_FILLS = ["#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94"]
CLASS_STROKES = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]


@dataclass
class RenderOptions:
    width: int = 640
    margin: float = 24.0
    show_vertices: bool = True
    vertex_radius: float = 2.5
    strip_height: float = 80.0  # 1-D rendering
    data: np.ndarray | None = None
    data_labels: np.ndarray | None = None


def step_color(step: str) -> str:
    from .skeleton import step_order

    return STEP_COLORS[step_order(step) % len(STEP_COLORS)]


def _fmt(v: float) -> str:
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


class _Canvas:
    """Maps domain coordinates to SVG pixels (y flipped)."""

    def __init__(self, bounds: Hyperrectangle, opts: RenderOptions):
        b = bounds.bounds
        self.margin = opts.margin
        self.x0, self.x1 = b[0]
        span_x = self.x1 - self.x0
        self.scale = (opts.width - 2 * opts.margin) / span_x
        self.width = float(opts.width)
        if bounds.dim == 2:
            self.y0, self.y1 = b[1]
            self.height = (self.y1 - self.y0) * self.scale + 2 * opts.margin
        else:
            self.y0, self.y1 = 0.0, 0.0
            self.height = opts.strip_height + 2 * opts.margin

    def pt(self, p) -> tuple[float, float]:
        x = self.margin + (p[0] - self.x0) * self.scale
        if len(p) == 2:
            y = self.margin + (self.y1 - p[1]) * self.scale
        else:
            y = self.height / 2.0
        return x, y

    def path(self, vertices) -> str:
        cmds = []
        for i, p in enumerate(vertices):
            x, y = self.pt(p)
            cmds.append(f"{'M' if i == 0 else 'L'} {_fmt(x)} {_fmt(y)}")
        cmds.append("Z")
        return " ".join(cmds)


def _svg_doc(canvas: _Canvas, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(canvas.width)}" '
        f'height="{_fmt(canvas.height)}" '
        f'viewBox="0 0 {_fmt(canvas.width)} {_fmt(canvas.height)}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _data_overlay(canvas: _Canvas, opts: RenderOptions) -> list[str]:
    if opts.data is None:
        return []
    labels = opts.data_labels
    body = []
    for i, p in enumerate(np.asarray(opts.data, dtype=np.float64)):
        x, y = canvas.pt(p)
        color = "#333333"
        if labels is not None:
            color = CLASS_STROKES[int(labels[i]) % len(CLASS_STROKES)]
        body.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.000000" fill="{color}" '
            f'stroke="white" stroke-width="0.800000"/>'
        )
    return body


def _render_skeleton(s: Skeleton, opts: RenderOptions) -> str:
    canvas = _Canvas(s.bounds, opts)
    body = ['<rect width="100%" height="100%" fill="white"/>']
    if s.dim == 2:
        for r in s.regions:
            body.append(
                f'<path d="{canvas.path(r.polygon.vertices)}" fill="#f8f8f8" '
                f'stroke="#cc3344" stroke-width="1.200000" stroke-linejoin="round"/>'
            )
    else:
        top = canvas.margin
        h = canvas.height - 2 * canvas.margin
        for r in s.regions:
            (xa, _), (xb, _) = canvas.pt(r.polygon.vertices[0]), canvas.pt(r.polygon.vertices[1])
            body.append(
                f'<rect x="{_fmt(xa)}" y="{_fmt(top)}" width="{_fmt(xb - xa)}" '
                f'height="{_fmt(h)}" fill="#f8f8f8" stroke="#cc3344" stroke-width="1.200000"/>'
            )
    if opts.show_vertices:
        seen = set()
        for r in s.regions:
            for v in r.vertices:
                key = tuple(np.round(v.point, 9).tolist())
                if key in seen:
                    continue
                seen.add(key)
                x, y = canvas.pt(v.point)
                body.append(
                    f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(opts.vertex_radius)}" '
                    f'fill="{step_color(v.step)}"/>'
                )
    body.extend(_data_overlay(canvas, opts))
    return _svg_doc(canvas, body)


def _render_decision_map(dm: DecisionMap, opts: RenderOptions) -> str:
    canvas = _Canvas(dm.bounds, opts)
    body = ['<rect width="100%" height="100%" fill="white"/>']
    if dm.bounds.dim == 2:
        for mp in dm.polygons:
            fill = CLASS_FILLS[mp.class_index % len(CLASS_FILLS)]
            body.append(
                f'<path d="{canvas.path(mp.polygon.vertices)}" fill="{fill}" '
                f'stroke="#888888" stroke-width="0.500000" stroke-linejoin="round"/>'
            )
        for seg in dm.boundary:
            (xa, ya), (xb, yb) = canvas.pt(seg.p0), canvas.pt(seg.p1)
            body.append(
                f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}" '
                f'stroke="black" stroke-width="2.400000" stroke-linecap="round"/>'
            )
    else:
        top = canvas.margin
        h = canvas.height - 2 * canvas.margin
        for mp in dm.polygons:
            (xa, _), (xb, _) = canvas.pt(mp.polygon.vertices[0]), canvas.pt(mp.polygon.vertices[1])
            fill = CLASS_FILLS[mp.class_index % len(CLASS_FILLS)]
            body.append(
                f'<rect x="{_fmt(xa)}" y="{_fmt(top)}" width="{_fmt(xb - xa)}" '
                f'height="{_fmt(h)}" fill="{fill}" stroke="#888888" stroke-width="0.500000"/>'
            )
        for seg in dm.boundary:
            x, _ = canvas.pt(seg.p0)
            body.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(top)}" x2="{_fmt(x)}" '
                f'y2="{_fmt(top + h)}" stroke="black" stroke-width="2.400000"/>'
            )
    body.extend(_data_overlay(canvas, opts))
    return _svg_doc(canvas, body)


def render_svg(obj, options: RenderOptions | None = None) -> str:
    """Deterministic SVG for a Skeleton or a DecisionMap."""
    opts = options or RenderOptions()
    if isinstance(obj, Skeleton):
        return _render_skeleton(obj, opts)
    if isinstance(obj, DecisionMap):
        return _render_decision_map(obj, opts)
    raise InputError(f"cannot render object of type {type(obj).__name__}")
