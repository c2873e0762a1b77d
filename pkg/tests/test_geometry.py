import math

import numpy as np
import pytest

from skelex.errors import GeometryError
from skelex.geometry import (
    EPS_GEOM,
    Hyperrectangle,
    Polygon,
    area,
    contains,
    intersect,
    split_by_line,
    union_adjacent,
)

from conftest import (
    point_on_loop,
    random_convex_polygon,
    random_star_polygon,
    shoelace_oracle,
    winding_number_oracle,
)


class TestPolygonConstruction:
    def test_normalizes_to_ccw(self):
        p = Polygon([[0, 0], [0, 1], [1, 1], [1, 0]])  # clockwise input
        assert area(p) == pytest.approx(1.0)
        assert p.vertices[0].tolist() == [0, 0]

    def test_drops_duplicate_and_collinear_vertices(self):
        p = Polygon([[0, 0], [0.5, 0], [1, 0], [1, 1], [1, 1], [0, 1]])
        assert len(p.vertices) == 4

    def test_rejects_degenerate(self):
        with pytest.raises(GeometryError):
            Polygon([[0, 0], [1, 0]])
        with pytest.raises(GeometryError):
            Polygon([[0, 0], [1, 0], [2, 0]])  # zero area
        with pytest.raises(GeometryError):
            Polygon([[0, 0], [1, 1], [1, 0], [0, 1]])  # bowtie
        with pytest.raises(GeometryError):
            Polygon([[0, 0], [np.nan, 0], [1, 1]])

    def test_interval(self):
        iv = Polygon.interval(-1.0, 2.0)
        assert iv.dim == 1
        assert area(iv) == pytest.approx(3.0)
        with pytest.raises(GeometryError):
            Polygon.interval(1.0, 1.0)

    def test_hyperrectangle(self):
        r = Hyperrectangle([[-4, 4], [-2, 2]])
        assert r.area == pytest.approx(32.0)
        assert len(r.to_polygon().vertices) == 4
        with pytest.raises(GeometryError):
            Hyperrectangle([[1, 1], [0, 2]])


class TestArea:
    def test_unit_square(self, unit_square):
        assert area(unit_square) == pytest.approx(1.0)

    def test_triangle(self):
        assert area(Polygon([[0, 0], [1, 0], [0, 1]])) == pytest.approx(0.5)

    def test_regular_hexagon(self):
        # radius-1 regular hexagon: 3*sqrt(3)/2, checked by hand via shoelace
        angles = np.linspace(0, 2 * np.pi, 6, endpoint=False)
        hexagon = Polygon(np.stack([np.cos(angles), np.sin(angles)], axis=1))
        expected = 3.0 * math.sqrt(3.0) / 2.0
        assert area(hexagon) == pytest.approx(expected, rel=1e-12)
        assert shoelace_oracle(hexagon.vertices) == pytest.approx(expected, rel=1e-12)

    def test_matches_oracle_on_random_polygons(self, rng):
        for _ in range(50):
            p = random_star_polygon(rng, n=int(rng.integers(4, 12)))
            assert area(p) == pytest.approx(shoelace_oracle(p.vertices), rel=1e-12)


class TestSplitByLine:
    def test_vertical_halving(self, unit_square):
        pos, neg = split_by_line(unit_square, (1, 0), -0.5)
        assert len(pos) == 1 and len(neg) == 1
        assert shoelace_oracle(pos[0].vertices) == pytest.approx(0.5)
        assert shoelace_oracle(neg[0].vertices) == pytest.approx(0.5)
        # right half is the positive side of x - 0.5
        assert pos[0].vertices[:, 0].min() == pytest.approx(0.5)

    def test_line_misses_polygon(self, unit_square):
        pos, neg = split_by_line(unit_square, (1, 0), 5.0)
        assert pos == [unit_square] and neg == []
        pos, neg = split_by_line(unit_square, (1, 0), -5.0)
        assert pos == [] and neg == [unit_square]

    def test_triangle_hypotenuse_on_line(self):
        # the hypotenuse of this triangle lies exactly on x + y = 2, so the
        # positive side is degenerate; oracle: piece areas sum to 2
        tri = Polygon([[0, 0], [2, 0], [0, 2]])
        pos, neg = split_by_line(tri, (1, 1), -2.0)
        total = sum(shoelace_oracle(q.vertices) for q in pos + neg)
        assert total == pytest.approx(2.0, rel=1e-12)
        assert pos == []
        assert neg == [tri]

    def test_triangle_diagonal_cut(self):
        tri = Polygon([[0, 0], [2, 0], [0, 2]])
        pos, neg = split_by_line(tri, (1, 1), -1.0)
        total = sum(shoelace_oracle(q.vertices) for q in pos + neg)
        assert total == pytest.approx(2.0, rel=1e-12)
        # negative side of x + y - 1 is the corner triangle (0,0),(1,0),(0,1)
        assert len(neg) == 1 and neg[0].close_to(Polygon([[0, 0], [1, 0], [0, 1]]), tol=1e-12)
        assert sum(shoelace_oracle(q.vertices) for q in pos) == pytest.approx(1.5, rel=1e-9)

    def test_nonconvex_split_into_multiple_pieces(self):
        # U-shape: cutting across the arms yields two positive pieces
        u = Polygon([[0, 0], [3, 0], [3, 2], [2, 2], [2, 1], [1, 1], [1, 2], [0, 2]])
        pos, neg = split_by_line(u, (0, 1), -1.5)  # y >= 1.5
        assert len(pos) == 2
        assert sum(q.area for q in pos) == pytest.approx(1.0, rel=1e-9)
        assert len(neg) == 1
        assert sum(q.area for q in neg) == pytest.approx(4.0, rel=1e-9)

    def test_vertex_on_line_belongs_to_both_sides(self):
        tri = Polygon([[0, 0], [2, 0], [1, 1]])
        pos, neg = split_by_line(tri, (1, 0), -1.0)  # line x = 1 through apex
        apex = np.array([1.0, 1.0])
        assert any(np.min(np.abs(q.vertices - apex).sum(axis=1)) < 1e-12 for q in pos)
        assert any(np.min(np.abs(q.vertices - apex).sum(axis=1)) < 1e-12 for q in neg)

    def test_area_conservation_random(self, rng):
        for i in range(60):
            p = (
                random_convex_polygon(rng)
                if i % 2 == 0
                else random_star_polygon(rng, n=int(rng.integers(5, 11)))
            )
            a = rng.standard_normal(2)
            if np.linalg.norm(a) < 1e-3:
                continue
            c = float(rng.uniform(-2, 2))
            pos, neg = split_by_line(p, a, c)
            total = sum(q.area for q in pos + neg)
            assert total == pytest.approx(p.area, rel=1e-9)
            # new vertices land on the line
            for q in pos + neg:
                vals = q.vertices @ a + c
                originals = {tuple(v) for v in p.vertices}
                for v, val in zip(q.vertices, vals):
                    if tuple(v) not in originals:
                        assert abs(val) <= EPS_GEOM * (1 + np.linalg.norm(a)) * 10

    def test_1d_split(self):
        iv = Polygon.interval(-2.0, 4.0)
        pos, neg = split_by_line(iv, (1,), -1.0)
        assert pos[0].vertices.ravel().tolist() == [1.0, 4.0]
        assert neg[0].vertices.ravel().tolist() == [-2.0, 1.0]
        pos, neg = split_by_line(iv, (-2,), 0.5)  # -2x + 0.5 >= 0 left of 0.25
        assert pos[0].vertices.ravel().tolist() == [-2.0, 0.25]
        assert neg[0].vertices.ravel().tolist() == [0.25, 4.0]


class TestIntersect:
    def test_idempotent(self, unit_square):
        out = intersect(unit_square, unit_square)
        assert out == [unit_square]

    def test_disjoint(self, unit_square):
        far = Polygon([[5, 5], [6, 5], [6, 6], [5, 6]])
        assert intersect(unit_square, far) == []

    def test_offset_squares(self):
        p = Polygon([[0, 0], [2, 0], [2, 2], [0, 2]])
        q = Polygon([[1, 1], [3, 1], [3, 3], [1, 3]])
        out = intersect(p, q)
        assert len(out) == 1
        assert out[0].area == pytest.approx(1.0, rel=1e-12)
        assert out[0].close_to(Polygon([[1, 1], [2, 1], [2, 2], [1, 2]]))

    def test_commutative_total_area(self, rng):
        for _ in range(40):
            p = random_star_polygon(rng, n=8)
            q = random_convex_polygon(rng, center=rng.uniform(-1, 1, 2))
            a_pq = sum(r.area for r in intersect(p, q))
            a_qp = sum(r.area for r in intersect(q, p))
            assert a_pq == pytest.approx(a_qp, rel=1e-9, abs=1e-12)

    def test_edge_touching_is_dropped(self, unit_square):
        neighbor = Polygon([[1, 0], [2, 0], [2, 1], [1, 1]])
        assert intersect(unit_square, neighbor) == []

    def test_1d(self):
        a = Polygon.interval(0, 2)
        b = Polygon.interval(1, 3)
        out = intersect(a, b)
        assert len(out) == 1 and out[0].vertices.ravel().tolist() == [1.0, 2.0]
        assert intersect(a, Polygon.interval(5, 6)) == []


class TestUnionAdjacent:
    def test_two_halves(self, unit_square):
        left = Polygon([[0, 0], [0.5, 0], [0.5, 1], [0, 1]])
        right = Polygon([[0.5, 0], [1, 0], [1, 1], [0.5, 1]])
        out = union_adjacent([left, right])
        assert len(out) == 1
        assert out[0] == unit_square

    def test_corner_contact_not_merged(self):
        a = Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
        b = Polygon([[1, 1], [2, 1], [2, 2], [1, 2]])
        out = union_adjacent([a, b])
        assert len(out) == 2

    def test_l_shape(self):
        squares = [
            Polygon([[0, 0], [1, 0], [1, 1], [0, 1]]),
            Polygon([[1, 0], [2, 0], [2, 1], [1, 1]]),
            Polygon([[0, 1], [1, 1], [1, 2], [0, 2]]),
        ]
        out = union_adjacent(squares)
        assert len(out) == 1
        assert out[0].area == pytest.approx(3.0, rel=1e-12)
        assert len(out[0].vertices) == 6

    def test_ring_with_hole_is_refused(self):
        # eight unit squares around an empty center cell
        cells = [
            (i, j) for i in range(3) for j in range(3) if not (i == 1 and j == 1)
        ]
        squares = [
            Polygon([[i, j], [i + 1, j], [i + 1, j + 1], [i, j + 1]]) for i, j in cells
        ]
        out = union_adjacent(squares)
        assert len(out) == 8  # kept separate rather than creating a hole
        assert sum(q.area for q in out) == pytest.approx(8.0)

    def test_split_then_union_restores_polygon(self, rng):
        for _ in range(30):
            p = random_convex_polygon(rng)
            a = rng.standard_normal(2)
            if np.linalg.norm(a) < 1e-3:
                continue
            c = float(rng.uniform(-1, 1))
            pos, neg = split_by_line(p, a, c)
            merged = union_adjacent(pos + neg)
            assert len(merged) == 1
            assert merged[0].area == pytest.approx(p.area, rel=1e-9)
            assert merged[0].close_to(p, tol=1e-9)

    def test_1d_chain(self):
        out = union_adjacent(
            [Polygon.interval(0, 1), Polygon.interval(2, 3), Polygon.interval(1, 2)]
        )
        assert len(out) == 1
        assert out[0].vertices.ravel().tolist() == [0.0, 3.0]


class TestContains:
    def test_unit_square_cases(self, unit_square):
        assert contains(unit_square, (0.5, 0.5)) == "inside"
        assert contains(unit_square, (1.0, 0.5)) == "on-boundary"
        assert contains(unit_square, (2.0, 2.0)) == "outside"

    def test_1d(self):
        iv = Polygon.interval(0, 1)
        assert contains(iv, (0.5,)) == "inside"
        assert contains(iv, (1.0,)) == "on-boundary"
        assert contains(iv, (1.5,)) == "outside"

    def test_agrees_with_winding_oracle(self, rng):
        checked = 0
        while checked < 1000:
            p = (
                random_convex_polygon(rng)
                if checked % 2 == 0
                else random_star_polygon(rng, n=int(rng.integers(5, 12)))
            )
            x = rng.uniform(-2.5, 2.5, size=2)
            verdict = contains(p, x)
            if verdict == "on-boundary":
                assert point_on_loop(p.vertices, x, tol=1e-8)
            else:
                expected = "inside" if winding_number_oracle(p.vertices, x) != 0 else "outside"
                assert verdict == expected, f"{p} {x}"
            checked += 1
