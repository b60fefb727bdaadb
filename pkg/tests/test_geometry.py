import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellpp import (
    ConvexPolygon,
    Window,
    disk_segment_area,
    distance_to_boundary,
    mean_segment_area,
    mean_segment_area_quadrature,
    polygon_area_perimeter,
    sample_point_in_polygon,
    torus_distance,
)

UNIT_SQUARE = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
RIGHT_TRIANGLE = ConvexPolygon([(0, 0), (1, 0), (0, 1)])


def mc_segment_area(v, r, n=10**6, seed=0):
    """Monte-Carlo oracle: area of b((-v,0),r) intersected with the right half-plane."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (n, 2)) * r
    in_disk = (pts**2).sum(axis=1) <= r**2
    frac = np.mean(in_disk & (pts[:, 0] >= v))
    return frac * (2 * r) ** 2


class TestDiskSegmentArea:
    def test_half_disk(self):
        assert disk_segment_area(0, 1) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_empty_segment(self):
        assert disk_segment_area(1, 1) == pytest.approx(0, abs=1e-12)

    def test_against_monte_carlo(self):
        # oracle with 10^6 draws has ~1e-3 resolution; frozen value 0.614185
        assert mc_segment_area(0.5, 1.0) == pytest.approx(0.614185, abs=3e-3)
        assert disk_segment_area(0.5, 1.0) == pytest.approx(0.614185, abs=1e-3)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            disk_segment_area(-0.1, 1)
        with pytest.raises(ValueError):
            disk_segment_area(1.1, 1)
        with pytest.raises(ValueError):
            disk_segment_area(0, 0)

    @given(st.floats(0.01, 0.99), st.floats(0.1, 50))
    def test_bounds_and_monotonicity(self, frac, r):
        v = frac * r
        s = disk_segment_area(v, r)
        assert 0 <= s <= math.pi * r**2 / 2
        assert s < disk_segment_area(v * 0.9, r)

    @given(st.floats(0.0, 1.0), st.floats(0.1, 20), st.floats(0.01, 100))
    def test_quadratic_scaling(self, frac, r, c):
        # near v = r the value vanishes with infinite slope, so allow the
        # sqrt(eps)-level absolute error double precision can deliver there
        v = frac * r
        assert disk_segment_area(c * v, c * r) == pytest.approx(
            c**2 * disk_segment_area(v, r), rel=1e-7, abs=1e-7 * (c * r) ** 2
        )


class TestMeanSegmentArea:
    def test_closed_form(self):
        assert mean_segment_area(1) == pytest.approx(2 / 3, abs=1e-12)
        assert mean_segment_area(0.5) == pytest.approx(1 / 6, abs=1e-12)

    def test_quadrature_cross_check(self):
        assert mean_segment_area_quadrature(2.0) == pytest.approx(mean_segment_area(2.0), abs=1e-9)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            mean_segment_area(-1)


class TestTorusDistance:
    def test_wraparound(self):
        w = Window(10, 10)
        d = torus_distance((0.1, 0.1), (9.9, 9.9), w)
        assert d == pytest.approx(0.282843, abs=1e-6)

    def test_identity(self):
        assert torus_distance((3, 4), (3, 4), Window(10, 10)) == 0

    def test_max_axial_separation(self):
        assert torus_distance((0, 0), (5, 0), Window(10, 10)) == pytest.approx(5)

    def test_non_periodic(self):
        w = Window(10, 10, periodic=False)
        assert torus_distance((0.1, 0.1), (9.9, 9.9), w) == pytest.approx(9.8 * math.sqrt(2))

    @given(
        st.tuples(st.floats(0, 10), st.floats(0, 10)),
        st.tuples(st.floats(0, 10), st.floats(0, 10)),
        st.tuples(st.floats(0, 10), st.floats(0, 10)),
    )
    @settings(max_examples=200)
    def test_triangle_inequality(self, p, q, s):
        w = Window(10, 10)
        assert torus_distance(p, q, w) <= (
            torus_distance(p, s, w) + torus_distance(s, q, w) + 1e-12
        )

    def test_half_diagonal_bound(self):
        w = Window(10, 6)
        rng = np.random.default_rng(3)
        p, q = rng.random((2, 50, 2)) * [10, 6]
        assert np.all(torus_distance(p, q, w) <= math.hypot(5, 3) + 1e-12)


class TestPolygon:
    def test_unit_square(self):
        assert polygon_area_perimeter(UNIT_SQUARE) == pytest.approx((1.0, 4.0))

    def test_right_triangle(self):
        area, perim = polygon_area_perimeter(RIGHT_TRIANGLE)
        assert area == pytest.approx(0.5)
        assert perim == pytest.approx(2 + math.sqrt(2))

    def test_regular_hexagon(self):
        ang = np.arange(6) * math.pi / 3
        hexagon = ConvexPolygon(np.column_stack([np.cos(ang), np.sin(ang)]))
        area, perim = polygon_area_perimeter(hexagon)
        assert area == pytest.approx(3 * math.sqrt(3) / 2)
        assert perim == pytest.approx(6.0)

    def test_clockwise_input_normalized(self):
        cw = ConvexPolygon([(0, 1), (1, 1), (1, 0), (0, 0)])
        assert cw.area == pytest.approx(1.0)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0)])
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0), (1, 1), (0.5, 0.2), (0, 1)])  # reflex corner

    def test_area_invariant_under_vertex_rotation_and_rigid_motion(self):
        rng = np.random.default_rng(11)
        ang = np.sort(rng.uniform(0, 2 * math.pi, 7))
        pts = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(1, 2)
        base = ConvexPolygon(pts)
        for k in range(1, 7):
            rolled = ConvexPolygon(np.roll(pts, k, axis=0))
            assert rolled.area == pytest.approx(base.area, abs=1e-12)
        theta = 0.77
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        moved = ConvexPolygon(pts @ rot.T + [5.0, -3.0])
        assert moved.area == pytest.approx(base.area, abs=1e-12)
        assert moved.perimeter == pytest.approx(base.perimeter, abs=1e-12)


class TestDistanceToBoundary:
    def test_square_center(self):
        assert distance_to_boundary((0.5, 0.5), UNIT_SQUARE) == pytest.approx(0.5)

    def test_square_off_center(self):
        assert distance_to_boundary((0.1, 0.5), UNIT_SQUARE) == pytest.approx(0.1)

    def test_triangle_centroid_against_brute_force(self):
        centroid = np.array([1 / 3, 1 / 3])
        # brute-force oracle: min distance over densely sampled edge points
        edges = [((0, 0), (1, 0)), ((1, 0), (0, 1)), ((0, 1), (0, 0))]
        t = np.linspace(0, 1, 20001)[:, None]
        best = min(
            np.min(np.linalg.norm(np.array(a) + t * (np.array(b) - np.array(a)) - centroid, axis=1))
            for a, b in edges
        )
        assert best == pytest.approx((1 / 3) / math.sqrt(2), abs=1e-6)
        assert distance_to_boundary(centroid, RIGHT_TRIANGLE) == pytest.approx(best, abs=1e-6)
        assert distance_to_boundary(centroid, RIGHT_TRIANGLE) == pytest.approx(0.23570, abs=1e-5)

    def test_outside_rejected(self):
        with pytest.raises(ValueError):
            distance_to_boundary((2.0, 2.0), UNIT_SQUARE)

    @given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
    @settings(max_examples=50)
    def test_interior_positive(self, x, y):
        assert distance_to_boundary((x, y), UNIT_SQUARE) > 0


class TestSamplePointInPolygon:
    def test_contained_and_centered(self):
        rng = np.random.default_rng(5)
        pts = np.array([sample_point_in_polygon(RIGHT_TRIANGLE, rng) for _ in range(20000)])
        assert all(RIGHT_TRIANGLE.contains(p, tol=1e-9) for p in pts[:500])
        assert pts.mean(axis=0) == pytest.approx(RIGHT_TRIANGLE.centroid, abs=0.01)

    def test_uniform_in_square_quadrants(self):
        rng = np.random.default_rng(6)
        pts = np.array([sample_point_in_polygon(UNIT_SQUARE, rng) for _ in range(8000)])
        quad = (pts[:, 0] > 0.5).astype(int) * 2 + (pts[:, 1] > 0.5).astype(int)
        counts = np.bincount(quad, minlength=4)
        assert np.all(np.abs(counts - 2000) < 4 * math.sqrt(2000 * 0.75))
