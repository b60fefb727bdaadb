"""Monte-Carlo estimators for second-order and distance statistics.

The two pair-correlation estimators follow the scikit-learn protocol: they
are configured in ``__init__``, consume a sequence of realizations through
``fit`` (or one at a time through ``partial_fit``), and expose results as
trailing-underscore attributes. Accumulation is a commutative reduction over
per-realization counts, so realizations may be processed in any fixed order;
estimator objects themselves must not be shared across concurrent writers.

Both estimators use box-kernel ring counting on the torus (no edge
correction needed, no differentiation noise), pooled over realizations:

    g_hat(r) = |W| * sum_pairs 1{d in [r-h/2, r+h/2]} / (sum n(n-1) * 2 pi r h)

which is unbiased for stationary processes on periodic windows and
identically 1 for the Poisson process.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .geometry import torus_distance
from .sampling import PointPattern
from .tessellation import Tessellation, nucleus_nn_distances
from .validation import check_bandwidth, check_r_grid

DEFAULT_R_MAX = 4.0
DEFAULT_R_STEP = 0.05
DEFAULT_BANDWIDTH = 0.1


def default_r_grid(intensity=1.0, r_max=DEFAULT_R_MAX, step=DEFAULT_R_STEP):
    """Default radial grid {step, 2*step, ...} rescaled by 1/sqrt(intensity)."""
    scale = 1.0 / np.sqrt(intensity)
    return np.arange(step, r_max + step / 2, step) * scale


@dataclass(frozen=True)
class PcfEstimate:
    """Estimated pair correlation function and Ripley K on a radial grid."""

    r_grid: np.ndarray = field(repr=False)
    g_hat: np.ndarray = field(repr=False)
    k_hat: np.ndarray = field(repr=False)
    pair_counts: np.ndarray = field(repr=False)
    bandwidth: float
    n_realizations: int
    g_stderr: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class DistanceSample:
    """Pooled distance sample of a given kind."""

    values: np.ndarray = field(repr=False)
    kind: str

    def __post_init__(self):
        if self.kind not in ("nearest_neighbor", "link", "nearest_interferer"):
            raise ValueError(f"unknown distance kind {self.kind!r}")


@dataclass(frozen=True)
class CellStats:
    """Pooled per-cell occupancy and area statistics."""

    vacancy_fraction: float
    mean_area_occ: float
    mean_area_vac: float
    mean_area_crofton: float
    mean_inv_area: float
    mean_area: float
    n_cells: int

    @property
    def balance_lhs(self):
        """nu*E(A_vac) + (1-nu)*E(A_occ); identically the pooled mean area."""
        nu = self.vacancy_fraction
        vac = 0.0 if nu == 0 else nu * self.mean_area_vac
        occ = 0.0 if nu == 1 else (1 - nu) * self.mean_area_occ
        return vac + occ


def _torus_pair_distances(points, window, chunk=1024):
    """Sorted distances of all unordered pairs, blocked to bound memory."""
    n = len(points)
    sides = window.sides
    out = []
    for i0 in range(0, n - 1, chunk):
        block = points[i0 : i0 + chunk]
        d = np.abs(block[:, None, :] - points[None, i0:, :])
        if window.periodic:
            d = np.minimum(d, sides - d)
        dist = np.hypot(d[..., 0], d[..., 1])
        ii, jj = np.triu_indices(len(block), 1, dist.shape[1])
        out.append(dist[ii, jj])
    return np.sort(np.concatenate(out)) if out else np.empty(0)


def _torus_cross_distances(a, b, window):
    d = np.abs(a[:, None, :] - b[None, :, :])
    if window.periodic:
        d = np.minimum(d, window.sides - d)
    return np.hypot(d[..., 0], d[..., 1])


class PcfEstimator(BaseEstimator):
    """Pair correlation function and Ripley K of stationary point patterns.

    Parameters
    ----------
    r_grid : array or None
        Radii at which to estimate; defaults to the standard grid rescaled by
        the first pattern's intensity.
    bandwidth : float or None
        Box-kernel ring width; defaults to 0.1/sqrt(intensity).

    Attributes (after fit)
    ----------------------
    r_, g_, k_, pair_counts_, g_stderr_ : arrays on the grid
    n_realizations_, n_skipped_ : int
    """

    def __init__(self, r_grid=None, bandwidth=None):
        self.r_grid = r_grid
        self.bandwidth = bandwidth

    def _start(self, pattern):
        intensity = pattern.nominal_intensity or max(pattern.realized_intensity, 1e-12)
        r = self.r_grid if self.r_grid is not None else default_r_grid(intensity)
        self.r_ = check_r_grid(r)
        h = self.bandwidth if self.bandwidth is not None else DEFAULT_BANDWIDTH / np.sqrt(intensity)
        self.bandwidth_ = check_bandwidth(h, self.r_)
        self.window_ = pattern.window
        self._lo = np.maximum(self.r_ - self.bandwidth_ / 2.0, 0.0)
        self._hi = self.r_ + self.bandwidth_ / 2.0
        self._ring = np.zeros(len(self.r_), dtype=np.int64)
        self._cum = np.zeros(len(self.r_), dtype=np.int64)
        self._den = 0.0
        self._per_real = []
        self.n_realizations_ = 0
        self.n_skipped_ = 0

    def partial_fit(self, pattern):
        if not hasattr(self, "r_"):
            self._start(pattern)
        n = len(pattern)
        if n < 2:
            self.n_skipped_ += 1
            return self
        if pattern.window != self.window_:
            raise ValueError("all patterns must share one window")
        d = _torus_pair_distances(pattern.points, pattern.window)
        ring = np.searchsorted(d, self._hi, "right") - np.searchsorted(d, self._lo, "right")
        cum = np.searchsorted(d, self.r_, "right")
        self._ring += 2 * ring
        self._cum += 2 * cum
        den = n * (n - 1)
        self._den += den
        self._per_real.append((2 * ring, den))
        self.n_realizations_ += 1
        return self

    def fit(self, X, y=None):
        """Accumulate an iterable of ``PointPattern`` realizations."""
        for pattern in X:
            self.partial_fit(pattern)
        if not hasattr(self, "r_") or self._den == 0:
            raise ValueError("no usable pattern (need at least one with 2+ points)")
        if self.n_skipped_:
            warnings.warn(f"skipped {self.n_skipped_} empty/singleton pattern(s)")
        self._finalize()
        return self

    def _finalize(self):
        area = self.window_.area
        norm = 2.0 * np.pi * self.r_ * self.bandwidth_
        self.g_ = area * self._ring / (self._den * norm)
        self.k_ = area * self._cum / self._den
        self.pair_counts_ = self._ring.copy()
        per = np.array([area * c / (d * norm) for c, d in self._per_real])
        m = len(per)
        self.g_stderr_ = per.std(axis=0, ddof=1) / np.sqrt(m) if m > 1 else np.full(len(self.r_), np.nan)

    def result(self):
        check_is_fitted(self, "g_")
        return PcfEstimate(
            self.r_, self.g_, self.k_, self.pair_counts_, self.bandwidth_,
            self.n_realizations_, self.g_stderr_,
        )


class BsUserPcfEstimator(BaseEstimator):
    """Pair correlation of interfering users as seen from each base station.

    Accepts ``UserAssignment`` realizations (each station's own served user
    is excluded) or ``(bs_pattern, user_pattern)`` tuples for independent
    baselines (nothing excluded). Counts are normalized per station by the
    realized interferer density, so independent users give exactly 1.
    """

    def __init__(self, r_grid=None, bandwidth=None):
        self.r_grid = r_grid
        self.bandwidth = bandwidth

    def _start(self, window, intensity):
        r = self.r_grid if self.r_grid is not None else default_r_grid(intensity)
        self.r_ = check_r_grid(r)
        h = self.bandwidth if self.bandwidth is not None else DEFAULT_BANDWIDTH / np.sqrt(intensity)
        self.bandwidth_ = check_bandwidth(h, self.r_)
        self.window_ = window
        self._lo = np.maximum(self.r_ - self.bandwidth_ / 2.0, 0.0)
        self._hi = self.r_ + self.bandwidth_ / 2.0
        self._ring = np.zeros(len(self.r_), dtype=np.int64)
        self._cum = np.zeros(len(self.r_), dtype=np.int64)
        self._den = 0.0
        self._per_real = []
        self.n_realizations_ = 0
        self.n_skipped_ = 0

    @staticmethod
    def _as_view(item):
        """(window, intensity, bs_points, user_points, served_user_per_bs)"""
        if isinstance(item, tuple):
            bs, users = item
            return bs.window, bs.nominal_intensity, bs.points, users.points, None
        a = item  # UserAssignment
        return (
            a.tess.pattern.window,
            a.tess.pattern.nominal_intensity,
            a.tess.pattern.points,
            a.active_users(),
            a.active_position_of_cell(),
        )

    def partial_fit(self, item):
        window, intensity, bs, users, served = self._as_view(item)
        if not hasattr(self, "r_"):
            self._start(window, intensity or 1.0)
        n_bs, m = len(bs), len(users)
        if n_bs == 0 or m == 0 or (served is not None and m < 2):
            self.n_skipped_ += 1
            return self
        dist = _torus_cross_distances(bs, users, window)
        if served is None:
            interferers_per_bs = np.full(n_bs, m, dtype=float)
        else:
            occ = served >= 0
            dist[np.nonzero(occ)[0], served[occ]] = np.inf
            interferers_per_bs = np.where(occ, m - 1, m).astype(float)
        d = np.sort(dist.ravel())
        d = d[np.isfinite(d)]
        ring = np.searchsorted(d, self._hi, "right") - np.searchsorted(d, self._lo, "right")
        cum = np.searchsorted(d, self.r_, "right")
        den = interferers_per_bs.sum() / window.area
        self._ring += ring
        self._cum += cum
        self._den += den
        self._per_real.append((ring, den))
        self.n_realizations_ += 1
        return self

    def fit(self, X, y=None):
        for item in X:
            self.partial_fit(item)
        if not hasattr(self, "r_") or self._den == 0:
            raise ValueError("no usable realization")
        if self.n_skipped_:
            warnings.warn(f"skipped {self.n_skipped_} degenerate realization(s)")
        self._finalize()
        return self

    def _finalize(self):
        norm = 2.0 * np.pi * self.r_ * self.bandwidth_
        self.g_ = self._ring / (self._den * norm)
        self.k_ = self._cum / self._den
        self.pair_counts_ = self._ring.copy()
        per = np.array([c / (d * norm) for c, d in self._per_real])
        m = len(per)
        self.g_stderr_ = per.std(axis=0, ddof=1) / np.sqrt(m) if m > 1 else np.full(len(self.r_), np.nan)

    def result(self):
        check_is_fitted(self, "g_")
        return PcfEstimate(
            self.r_, self.g_, self.k_, self.pair_counts_, self.bandwidth_,
            self.n_realizations_, self.g_stderr_,
        )


def estimate_pcf(patterns, r_grid=None, bandwidth=None):
    """Pooled pcf/K estimate over point-pattern realizations."""
    return PcfEstimator(r_grid=r_grid, bandwidth=bandwidth).fit(patterns).result()


def estimate_pcf_bs(assignments, r_grid=None, bandwidth=None):
    """Pooled station-to-user pcf/K estimate over realizations."""
    return BsUserPcfEstimator(r_grid=r_grid, bandwidth=bandwidth).fit(assignments).result()


def distance_samples(assignments, kind):
    """Pool per-user or per-station distances over assignment realizations.

    Kinds: ``"nearest_neighbor"`` (user to nearest other user), ``"link"``
    (user to serving station), ``"nearest_interferer"`` (station to nearest
    user it does not serve).
    """
    vals = []
    for a in assignments:
        w = a.tess.pattern.window
        users = a.active_users()
        if kind == "link":
            occ = ~a.vacant
            vals.append(torus_distance(users, a.tess.pattern.points[occ], w))
            continue
        if len(users) < 2:
            continue
        tree = cKDTree(users, boxsize=[w.width, w.height])
        if kind == "nearest_neighbor":
            d, _ = tree.query(users, k=2)
            vals.append(d[:, 1])
        elif kind == "nearest_interferer":
            bs = a.tess.pattern.points
            d, idx = tree.query(bs, k=2)
            own = a.active_position_of_cell()
            take_second = idx[:, 0] == own
            vals.append(np.where(take_second, d[:, 1], d[:, 0]))
        else:
            raise ValueError(f"unknown distance kind {kind!r}")
    if not vals:
        raise ValueError("no distances could be collected")
    return DistanceSample(np.concatenate(vals), kind)


def cell_stats(assignments):
    """Pooled vacancy fraction and cell-area statistics.

    The decomposition ``nu*E(A_vac) + (1-nu)*E(A_occ) = E(A)`` holds exactly
    (to floating point) because all three means come from the same pooled
    per-cell data.
    """
    areas, vac = [], []
    for a in assignments:
        areas.append(a.cell_areas())
        vac.append(a.vacant)
    areas = np.concatenate(areas)
    vac = np.concatenate(vac)
    n = len(areas)
    nu = float(vac.sum() / n)
    return CellStats(
        vacancy_fraction=nu,
        mean_area_occ=float(areas[~vac].mean()) if nu < 1 else np.nan,
        mean_area_vac=float(areas[vac].mean()) if nu > 0 else np.nan,
        mean_area_crofton=float((areas**2).sum() / areas.sum()),
        mean_inv_area=float((1.0 / areas).mean()),
        mean_area=float(areas.mean()),
        n_cells=n,
    )


def conditional_cell_area(tessellations, rho_grid):
    """Mean cell area conditioned on the nucleus having a neighbor within rho.

    Binning is cumulative (all cells with nearest-neighbor distance <= rho),
    matching "within distance rho". Values of rho with no qualifying cells
    are reported as NaN, not zero.
    """
    rho = check_r_grid(rho_grid)
    nnd, areas = [], []
    for t in tessellations:
        if isinstance(t, Tessellation):
            nnd.append(nucleus_nn_distances(t))
            areas.append(t.areas)
        else:
            d, a = t
            nnd.append(np.asarray(d, dtype=float))
            areas.append(np.asarray(a, dtype=float))
    nnd = np.concatenate(nnd)
    areas = np.concatenate(areas)
    order = np.argsort(nnd)
    cum_area = np.concatenate([[0.0], np.cumsum(areas[order])])
    counts = np.searchsorted(nnd[order], rho, "right")
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, cum_area[counts] / np.maximum(counts, 1), np.nan)
    return rho, means


def radial_pcf(samples, r_grid, bandwidth):
    """Ring-normalized radial intensity of pooled ``RadialSample`` draws.

    Counts radii per ring, divided by ``n_samples * intensity * 2 pi r h``;
    for a (non-conditioned) stationary sample this is identically 1, and for
    an origin-conditioned sample it estimates the pcf against the origin.
    """
    r = check_r_grid(r_grid)
    h = check_bandwidth(bandwidth, r)
    samples = list(samples)
    pooled = np.sort(np.concatenate([s.radii for s in samples]))
    lam = samples[0].intensity
    ring = np.searchsorted(pooled, r + h / 2, "right") - np.searchsorted(
        pooled, np.maximum(r - h / 2, 0.0), "right"
    )
    return r, ring / (len(samples) * lam * 2.0 * np.pi * r * h)


def pcf_to_csv(est, path, header_comments=()):
    """Write an estimate as CSV: r, g_hat, k_hat, pairs, stderr."""
    with open(path, "w", newline="") as f:
        for line in header_comments:
            f.write(f"# {line}\n")
        f.write("r,g_hat,k_hat,pairs,stderr\n")
        err = est.g_stderr if est.g_stderr is not None else np.full(len(est.r_grid), np.nan)
        for r, g, k, p, e in zip(est.r_grid, est.g_hat, est.k_hat, est.pair_counts, err):
            f.write(f"{r:.9g},{g:.9g},{k:.9g},{int(p)},{e:.9g}\n")
