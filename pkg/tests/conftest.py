"""Shared test helpers: independent oracles and random input generators.

The oracles here are deliberately written without reusing package code paths:
shoelace by explicit loop, winding-number point location, and a scalar
pure-Python forward pass.
"""

import math

import numpy as np
import pytest

from skelex.geometry import Hyperrectangle, Polygon


def shoelace_oracle(vertices) -> float:
    """Plain-loop shoelace; absolute area."""
    verts = [tuple(map(float, v)) for v in vertices]
    total = 0.0
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0


def winding_number_oracle(vertices, point) -> int:
    """Winding number of a closed loop around ``point`` (nonzero means inside)."""
    px, py = float(point[0]), float(point[1])
    wn = 0
    verts = [tuple(map(float, v)) for v in vertices]
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        cross = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        if y0 <= py:
            if y1 > py and cross > 0:
                wn += 1
        elif y1 <= py and cross < 0:
            wn -= 1
    return wn


def point_on_loop(vertices, point, tol=1e-12) -> bool:
    px, py = float(point[0]), float(point[1])
    verts = [tuple(map(float, v)) for v in vertices]
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        dx, dy = x1 - x0, y1 - y0
        seg = math.hypot(dx, dy)
        if seg == 0.0:
            continue
        t = ((px - x0) * dx + (py - y0) * dy) / (seg * seg)
        t = min(1.0, max(0.0, t))
        if math.hypot(x0 + t * dx - px, y0 + t * dy - py) <= tol:
            return True
    return False


def forward_scalar_oracle(layers, x):
    """Pure-Python forward pass: explicit loops, no numpy matmul.

    ``layers`` is a list of (weight_rows, biases); ReLU after every layer but
    the last.
    """
    vec = [float(v) for v in x]
    for li, (w, b) in enumerate(layers):
        nxt = []
        for row, bias in zip(w, b):
            acc = float(bias)
            for wij, xj in zip(row, vec):
                acc += float(wij) * float(xj)
            if li < len(layers) - 1:
                acc = max(0.0, acc)
            nxt.append(acc)
        vec = nxt
    return vec


def random_convex_polygon(rng, n_max=8, scale=2.0, center=(0.0, 0.0)):
    """Convex hull of random points; retries until at least a triangle."""
    while True:
        pts = rng.uniform(-scale, scale, size=(rng.integers(3, n_max + 1), 2)) + center
        hull = _convex_hull(pts)
        if len(hull) >= 3:
            return Polygon(hull)


def random_star_polygon(rng, n=10, r_lo=0.4, r_hi=2.0, center=(0.0, 0.0)):
    """Simple (usually non-convex) polygon, star-shaped around its center."""
    spacing = 2 * np.pi / n
    angles = np.arange(n) * spacing + rng.uniform(0.05, 0.95, size=n) * spacing
    radii = rng.uniform(r_lo, r_hi, size=n)
    pts = np.stack([np.cos(angles), np.sin(angles)], axis=1) * radii[:, None]
    return Polygon(pts + np.asarray(center))


def _convex_hull(pts):
    pts = sorted(map(tuple, pts))
    if len(pts) <= 2:
        return np.array(pts)

    def half(points):
        out = []
        for p in points:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 1e-12:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def random_network(seed, *, n0=2, max_width=8, k=None, n_layers=None):
    """Seeded random fully-connected ReLU net with standard normal entries."""
    from skelex.skeleton import Network

    rng = np.random.default_rng(seed)
    if n_layers is None:
        n_layers = int(rng.integers(1, 4))
    widths = [int(rng.integers(2, max_width + 1)) for _ in range(n_layers)]
    if k is None:
        k = int(rng.integers(1, 4))
    dims = [n0] + widths + [k]
    layers = [
        (rng.standard_normal((dims[i + 1], dims[i])), rng.standard_normal(dims[i + 1]))
        for i in range(len(dims) - 1)
    ]
    return Network(layers)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    return Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture
def box22():
    return Hyperrectangle([[-2, 2], [-2, 2]])
