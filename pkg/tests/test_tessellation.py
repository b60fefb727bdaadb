import math

import numpy as np
import pytest
from scipy import stats

from cellpp import (
    ConfigurationError,
    PointPattern,
    Window,
    boundary_distance,
    build_voronoi,
    cells_to_csv,
    locate_cell,
    nucleus_nn_distances,
    sample_ppp,
    sample_square_lattice,
    torus_distance,
)

W20 = Window(20, 20)
W10 = Window(10, 10)


@pytest.fixture(scope="module")
def lattice_tess():
    return build_voronoi(sample_square_lattice(1.0, W10, 21))


@pytest.fixture(scope="module")
def ppp_tess():
    return build_voronoi(sample_ppp(1.0, W20, 100))


class TestBuildVoronoi:
    def test_lattice_cells_are_unit_squares(self, lattice_tess):
        for c in lattice_tess.cells:
            assert c.area == pytest.approx(1.0, abs=1e-9)
            assert c.perimeter == pytest.approx(4.0, abs=1e-9)
            assert len(c.neighbor_indices) == 4

    def test_neighbor_symmetry(self, ppp_tess):
        for c in ppp_tess.cells:
            for j in c.neighbor_indices:
                assert c.nucleus_index in ppp_tess.cells[j].neighbor_indices

    def test_areas_sum_to_window(self, ppp_tess):
        assert ppp_tess.areas.sum() == pytest.approx(W20.area, rel=1e-6)

    def test_second_area_moment(self):
        areas = []
        for s in range(30):
            areas.append(build_voronoi(sample_ppp(1.0, W20, 200 + s)).areas)
        areas = np.concatenate(areas)
        assert len(areas) >= 10_000
        assert (areas**2).mean() == pytest.approx(9 / 7, rel=0.03)

    def test_too_few_points(self):
        pts = PointPattern(np.array([[1.0, 1.0], [5.0, 5.0]]), W10, 0.02)
        with pytest.raises(ConfigurationError):
            build_voronoi(pts)

    def test_duplicate_points(self):
        pts = np.vstack([sample_ppp(1.5, W10, 3).points, [[2.0, 2.0], [2.0, 2.0]]])
        with pytest.raises(ValueError, match="duplicate"):
            build_voronoi(PointPattern(pts, W10, 1.5))

    def test_non_periodic_window(self):
        import dataclasses

        p = sample_ppp(2.0, Window(10, 10), 4)
        aperiodic = dataclasses.replace(p, window=Window(10, 10, periodic=False))
        with pytest.raises(ConfigurationError):
            build_voronoi(aperiodic)

    def test_window_too_small(self):
        with pytest.raises(ConfigurationError):
            build_voronoi(sample_ppp(0.2, W10, 5))


class TestLocateCell:
    def test_nucleus_in_own_cell(self, ppp_tess):
        for i in (0, 7, 42):
            assert locate_cell(ppp_tess, ppp_tess.pattern.points[i]) == i

    def test_lattice_cell_center(self, lattice_tess):
        nuc = lattice_tess.pattern.points[17]
        assert locate_cell(lattice_tess, nuc + [0.2, 0.1]) == 17

    def test_agrees_with_brute_force(self, ppp_tess):
        rng = np.random.default_rng(9)
        probes = rng.random((10_000, 2)) * 20
        nuclei = ppp_tess.pattern.points
        d = torus_distance(probes[:, None, :], nuclei[None, :, :], W20)
        expected = d.argmin(axis=1)
        got = np.array([locate_cell(ppp_tess, p) for p in probes])
        assert np.array_equal(got, expected)

    def test_containing_polygon_agrees(self, ppp_tess):
        rng = np.random.default_rng(19)
        for p in rng.random((200, 2)) * 20:
            i = locate_cell(ppp_tess, p)
            cell = ppp_tess.cells[i]
            nuc = ppp_tess.pattern.points[i]
            p_un = nuc + (p - nuc + 10) % 20 - 10
            assert cell.polygon.contains(p_un, tol=1e-9)


class TestBoundaryDistance:
    def test_lattice_center(self, lattice_tess):
        nuc = lattice_tess.pattern.points[3]
        d, j = boundary_distance(lattice_tess, 3, nuc)
        assert d == pytest.approx(0.5, abs=1e-9)
        assert j in lattice_tess.cells[3].neighbor_indices

    def test_edge_limit(self, lattice_tess):
        nuc = lattice_tess.pattern.points[3]
        d, _ = boundary_distance(lattice_tess, 3, (nuc + [0.4999999, 0.0]) % 10)
        assert d == pytest.approx(0.0, abs=1e-6)

    def test_point_outside_cell_rejected(self, lattice_tess):
        nuc = lattice_tess.pattern.points[3]
        with pytest.raises(ValueError):
            boundary_distance(lattice_tess, 3, (nuc + [1.5, 0.0]) % 10)

    def test_neighbor_is_across_nearest_edge(self, lattice_tess):
        nuc = lattice_tess.pattern.points[8]
        d, j = boundary_distance(lattice_tess, 8, (nuc + [0.3, 0.05]) % 10)
        assert d == pytest.approx(0.2, abs=1e-9)
        # neighbor must be the lattice point one spacing to the right
        expect = (nuc + [1.0, 0.0]) % 10
        assert np.allclose(lattice_tess.pattern.points[j], expect, atol=1e-9)

    def test_boundary_layer_probability(self, lattice_tess):
        # P(distance to boundary < r) for uniform p in a unit square cell is
        # ~ r |dV| / |V| = 4r for small r
        rng = np.random.default_rng(2)
        r = 0.01
        nuc = lattice_tess.pattern.points[0]
        pts = (nuc - 0.5 + rng.random((100_000, 2))) % 10
        hits = sum(boundary_distance(lattice_tess, 0, p)[0] < r for p in pts[:20_000])
        assert hits / 20_000 == pytest.approx(4 * r, rel=0.10)


class TestNucleusNnDistances:
    def test_lattice_all_unit(self, lattice_tess):
        assert np.allclose(nucleus_nn_distances(lattice_tess), 1.0, atol=1e-12)

    def test_ppp_rayleigh_mean(self):
        # close pairs contribute two correlated small distances, so the
        # effective sample is smaller than the point count; pool 100 runs
        d = np.concatenate(
            [nucleus_nn_distances(build_voronoi(sample_ppp(1.0, W20, 300 + s))) for s in range(100)]
        )
        assert d.mean() == pytest.approx(0.5, rel=0.01)

    def test_scale_invariance_ks(self):
        d1 = np.concatenate(
            [nucleus_nn_distances(build_voronoi(sample_ppp(1.0, W20, 50 + s))) for s in range(10)]
        )
        d4 = np.concatenate(
            [nucleus_nn_distances(build_voronoi(sample_ppp(4.0, W10, 60 + s))) for s in range(10)]
        )
        assert stats.ks_2samp(d1, 2 * d4).pvalue > 0.01


@pytest.mark.slow
def test_area_histogram_matches_gamma_approximation():
    # >= 1e5 cells; the gamma pdf is itself an approximation, hence KS < 0.02
    areas = []
    for s in range(260):
        areas.append(build_voronoi(sample_ppp(1.0, W20, 1000 + s)).areas)
    areas = np.concatenate(areas)
    assert len(areas) >= 100_000
    ks = stats.kstest(areas, stats.gamma(a=3.5, scale=1 / 3.5).cdf).statistic
    assert ks < 0.02


def test_cells_csv_dump(tmp_path, lattice_tess):
    path = tmp_path / "cells.csv"
    cells_to_csv(lattice_tess, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "nucleus_x,nucleus_y,area,perimeter,n_neighbors"
    assert len(lines) == 101
    row = lines[1].split(",")
    assert float(row[2]) == pytest.approx(1.0, abs=1e-9)
    assert row[4] == "4"
