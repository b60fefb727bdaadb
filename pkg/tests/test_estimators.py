import numpy as np
import pytest

from cellpp import (
    BsUserPcfEstimator,
    PcfEstimator,
    PointPattern,
    Window,
    build_voronoi,
    cell_stats,
    conditional_cell_area,
    distance_samples,
    estimate_pcf,
    estimate_pcf_bs,
    nucleus_nn_distances,
    sample_ppp,
    type1_users,
    type2_users,
)

W20 = Window(20, 20)


@pytest.fixture(scope="module")
def type1_assignments():
    out = []
    for s in range(60):
        t = build_voronoi(sample_ppp(1.0, W20, 2_000 + s))
        out.append(type1_users(t, 3_000 + s))
    return out


class TestPcfEstimator:
    def test_csr_baseline(self):
        patterns = [sample_ppp(1.0, W20, s) for s in range(80)]
        est = estimate_pcf(patterns)
        band = (est.r_grid >= 0.1) & (est.r_grid <= 2.0)
        assert np.max(np.abs(est.g_hat[band] - 1.0)) < 0.08

    def test_k_consistent_with_g_integral(self):
        patterns = [sample_ppp(1.0, W20, 500 + s) for s in range(60)]
        est = estimate_pcf(patterns, r_grid=np.arange(0.05, 3.0, 0.05), bandwidth=0.05)
        # K(r) ~ int_0^r g(s) 2 pi s ds for r >= 5 bandwidths; the integral
        # starts at 0, where the 2 pi s factor vanishes
        s_grid = np.concatenate([[0.0], est.r_grid])
        integrand = np.concatenate([[0.0], est.g_hat * 2 * np.pi * est.r_grid])
        for i, r in enumerate(est.r_grid):
            if r < 5 * est.bandwidth:
                continue
            k_from_g = np.trapezoid(integrand[: i + 2], s_grid[: i + 2])
            assert k_from_g == pytest.approx(est.k_hat[i], rel=0.02)

    def test_skips_degenerate_patterns(self):
        empty = PointPattern(np.empty((0, 2)), W20, 0.0)
        single = PointPattern(np.array([[1.0, 1.0]]), W20, 0.0025)
        good = sample_ppp(1.0, W20, 1)
        with pytest.warns(UserWarning, match="skipped 2"):
            est = estimate_pcf([empty, single, good])
        assert est.n_realizations == 1

    def test_all_degenerate_raises(self):
        empty = PointPattern(np.empty((0, 2)), W20, 0.0)
        with pytest.raises(ValueError):
            estimate_pcf([empty])

    def test_bandwidth_grid_validation(self):
        good = sample_ppp(1.0, W20, 1)
        with pytest.raises(ValueError, match="bandwidth"):
            estimate_pcf([good], r_grid=np.arange(0.05, 2, 0.05), bandwidth=0.3)
        with pytest.raises(ValueError, match="increasing"):
            estimate_pcf([good], r_grid=[0.5, 0.4], bandwidth=0.05)

    def test_window_mismatch_rejected(self):
        a = sample_ppp(1.0, W20, 1)
        b = sample_ppp(1.0, Window(10, 10), 2)
        with pytest.raises(ValueError, match="window"):
            estimate_pcf([a, b])

    def test_sklearn_protocol(self):
        est = PcfEstimator(bandwidth=0.1)
        assert est.get_params() == {"r_grid": None, "bandwidth": 0.1}
        est.set_params(bandwidth=0.2)
        assert est.bandwidth == 0.2


class TestBsUserPcfEstimator:
    def test_independent_users_give_unity(self):
        items = [
            (sample_ppp(1.0, W20, 10_000 + s), sample_ppp(1.0, W20, 20_000 + s))
            for s in range(80)
        ]
        est = estimate_pcf_bs(items)
        band = (est.r_grid >= 0.1) & (est.r_grid <= 2.0)
        assert np.max(np.abs(est.g_hat[band] - 1.0)) < 0.08

    def test_small_r_suppression_for_type1(self, type1_assignments):
        est = estimate_pcf_bs(type1_assignments)
        small = est.r_grid <= 0.2
        assert np.all(est.g_hat[small] < 0.4)
        far = est.r_grid >= 2.0
        assert np.max(np.abs(est.g_hat[far] - 1.0)) < 0.08

    def test_k_nondecreasing(self, type1_assignments):
        est = estimate_pcf_bs(type1_assignments)
        assert np.all(np.diff(est.k_hat) >= 0)


class TestDistanceSamples:
    def test_kinds(self, type1_assignments):
        d = distance_samples(type1_assignments, "nearest_neighbor")
        r = distance_samples(type1_assignments, "link")
        ni = distance_samples(type1_assignments, "nearest_interferer")
        n_users = sum(a.n_active for a in type1_assignments)
        assert len(d.values) == len(r.values) == len(ni.values) == n_users
        assert d.values.min() > 0 and r.values.min() > 0
        # every nearest interferer is at least as far as the nearest user
        assert ni.values.mean() >= d.values.mean() * 0.95

    def test_unknown_kind(self, type1_assignments):
        with pytest.raises(ValueError):
            distance_samples(type1_assignments, "nope")


class TestCellStats:
    def test_type1_no_vacancy(self, type1_assignments):
        st = cell_stats(type1_assignments)
        assert st.vacancy_fraction == 0.0
        assert np.isnan(st.mean_area_vac)
        assert st.mean_area_occ == pytest.approx(st.mean_area)

    def test_balance_identity_exact(self):
        rows = []
        for s in range(25):
            t = build_voronoi(sample_ppp(1.0, W20, 30_000 + s))
            pop = sample_ppp(1.0, W20, 40_000 + s)
            rows.append(type2_users(t, pop, s))
        st = cell_stats(rows)
        assert 0.3 < st.vacancy_fraction < 0.55
        assert st.balance_lhs / st.mean_area == pytest.approx(1.0, abs=1e-12)

    def test_mean_inv_area_near_gamma_value(self, type1_assignments):
        st = cell_stats(type1_assignments)
        # 7/5 comes from the gamma approximation; the truth is within 10%
        assert st.mean_inv_area == pytest.approx(1.4, rel=0.10)


def test_pcf_csv_roundtrip(tmp_path):
    from cellpp.estimators import pcf_to_csv

    est = estimate_pcf([sample_ppp(1.0, W20, 3), sample_ppp(1.0, W20, 4)])
    path = tmp_path / "pcf.csv"
    pcf_to_csv(est, path, header_comments=["demo"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# demo"
    assert lines[1] == "r,g_hat,k_hat,pairs,stderr"
    first = lines[2].split(",")
    assert float(first[0]) == pytest.approx(est.r_grid[0])
    assert float(first[1]) == pytest.approx(est.g_hat[0], rel=1e-8)
    assert len(lines) == len(est.r_grid) + 2


class TestConditionalCellArea:
    def test_cumulative_and_missing_bins(self):
        tess = [build_voronoi(sample_ppp(1.0, W20, 50_000 + s)) for s in range(100)]
        rho, means = conditional_cell_area(tess, [1e-6, 0.3, 3.0])
        assert np.isnan(means[0])  # no nucleus pair that close
        assert means[1] < means[2]
        # at large rho every cell is included: exactly the pooled mean area
        pooled = np.concatenate([t.areas for t in tess])
        assert means[2] == pytest.approx(pooled.mean(), abs=1e-12)
        assert means[2] == pytest.approx(1.0, rel=0.01)

    def test_accepts_precomputed_pairs(self):
        t = build_voronoi(sample_ppp(1.0, W20, 60_000))
        pair = (nucleus_nn_distances(t), t.areas)
        rho, m1 = conditional_cell_area([pair], [0.5, 2.0])
        rho, m2 = conditional_cell_area([t], [0.5, 2.0])
        assert np.allclose(m1, m2, equal_nan=True)

    def test_grid_validation(self):
        t = build_voronoi(sample_ppp(1.0, W20, 60_001))
        with pytest.raises(ValueError):
            conditional_cell_area([t], [0.3, 0.2])
