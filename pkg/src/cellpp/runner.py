"""Batch experiment driver: seeded realizations, parallel workers, CSV output.

Realizations are simulated independently (one counter-based stream per
realization index) and reduced in index order, so output files are
byte-identical for any worker count and across reruns with the same config.
CSV files carry the resolved config as a '#'-commented header block.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import analytics
from .estimators import (
    BsUserPcfEstimator,
    PcfEstimator,
    cell_stats,
    conditional_cell_area,
)
from .geometry import Window, torus_distance
from .random import realization_rng
from .sampling import sample_ppp, sample_square_lattice
from .tessellation import build_voronoi, nucleus_nn_distances
from .user_models import thin_users, type1_users, type2_users
from .validation import ConfigurationError

MODELS = ("type1", "type2", "lattice", "ppp_baseline")
STATISTICS = ("pcf", "pcf_bs", "pcf_thinned", "pcf_bs_thinned", "distances", "cells", "conditional_area", "fits")
DEFAULT_OUTPUTS = {
    "type1": ("pcf", "pcf_bs", "distances", "cells", "conditional_area", "fits"),
    "type2": ("pcf", "distances", "cells"),
    "lattice": ("pcf", "distances", "cells"),
    "ppp_baseline": ("pcf", "pcf_bs"),
}
OUT_DIR_ENV = "CELLPP_OUT_DIR"
THINNING_RETAIN = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved description of one batch experiment."""

    model: str
    lambda_bs: float = 1.0
    eta: float = None
    window_side: float = 20.0
    n_realizations: int = 200
    r_min: float = None
    r_max: float = None
    r_step: float = None
    bandwidth: float = None
    master_seed: int = 1
    alpha: float = None
    outputs: tuple = None
    workers: int = 1
    out_dir: str = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.lambda_bs <= 0:
            raise ConfigurationError("lambda_bs must be positive")
        if self.model == "type2":
            if self.eta is None or self.eta <= 0:
                raise ConfigurationError("model type2 requires a positive eta")
        elif self.eta is not None:
            raise ConfigurationError(f"eta is only meaningful for type2, not {self.model}")
        if self.window_side < 10.0 / math.sqrt(self.lambda_bs):
            raise ConfigurationError(
                f"window_side must be at least 10/sqrt(lambda_bs)="
                f"{10.0 / math.sqrt(self.lambda_bs):.3g}"
            )
        if self.n_realizations < 1:
            raise ConfigurationError("n_realizations must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        outs = self.outputs if self.outputs is not None else DEFAULT_OUTPUTS[self.model]
        outs = tuple(outs)
        for o in outs:
            if o not in STATISTICS:
                raise ConfigurationError(f"unknown output {o!r}; choose from {STATISTICS}")
        if self.model == "ppp_baseline" and set(outs) - {"pcf", "pcf_bs"}:
            raise ConfigurationError("ppp_baseline only supports pcf and pcf_bs outputs")
        object.__setattr__(self, "outputs", outs)

    @property
    def scale(self):
        return 1.0 / math.sqrt(self.lambda_bs)

    def r_grid(self):
        lo = self.r_min if self.r_min is not None else 0.05 * self.scale
        hi = self.r_max if self.r_max is not None else 4.0 * self.scale
        step = self.r_step if self.r_step is not None else 0.05 * self.scale
        return np.arange(lo, hi + step / 2, step)

    def resolved_bandwidth(self):
        return self.bandwidth if self.bandwidth is not None else 0.1 * self.scale

    def window(self):
        return Window(self.window_side, self.window_side, periodic=True)

    def echo_lines(self):
        """Stable key=value lines for CSV provenance headers.

        The worker count is excluded: it cannot affect results, and output
        files must be byte-identical for any parallelism level.
        """
        vals = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "workers"}
        vals["outputs"] = ",".join(self.outputs)
        vals["r_min"], vals["r_max"], vals["r_step"] = self.r_grid()[0], self.r_grid()[-1], (
            self.r_step if self.r_step is not None else 0.05 * self.scale
        )
        vals["bandwidth"] = self.resolved_bandwidth()
        vals["out_dir"] = self.resolve_out_dir()
        out = []
        for k in sorted(vals):
            v = vals[k]
            out.append(f"{k}={v:.9g}" if isinstance(v, float) else f"{k}={v}")
        return out

    def resolve_out_dir(self):
        return self.out_dir or os.environ.get(OUT_DIR_ENV) or "."


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    pcf: object = None
    pcf_bs: object = None
    pcf_thinned: object = None
    pcf_bs_thinned: object = None
    distances: dict = field(default_factory=dict)
    cells: object = None
    conditional_area: object = None
    fits: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    csv_paths: dict = field(default_factory=dict)


def _simulate(cfg, index):
    """One realization: sample, tessellate, assign, and pre-aggregate.

    Returns a dict of per-realization partials keyed by statistic name; the
    heavy geometry happens here so workers carry the load.
    """
    rng = realization_rng(cfg.master_seed, index)
    w = cfg.window()
    grid, h = cfg.r_grid(), cfg.resolved_bandwidth()
    out = {}

    if cfg.model == "ppp_baseline":
        users = sample_ppp(cfg.lambda_bs, w, rng)
        bs = sample_ppp(cfg.lambda_bs, w, rng)
        if "pcf" in cfg.outputs:
            out["pcf"] = PcfEstimator(grid, h).partial_fit(users)
        if "pcf_bs" in cfg.outputs:
            out["pcf_bs"] = BsUserPcfEstimator(grid, h).partial_fit((bs, users))
        return out

    if cfg.model == "lattice":
        bs = sample_square_lattice(cfg.lambda_bs, w, rng)
    else:
        bs = sample_ppp(cfg.lambda_bs, w, rng)
    tess = build_voronoi(bs)
    if cfg.model == "type2":
        population = sample_ppp(cfg.eta * cfg.lambda_bs, w, rng)
        assign = type2_users(tess, population, rng)
    else:
        assign = type1_users(tess, rng)

    if "pcf" in cfg.outputs:
        out["pcf"] = PcfEstimator(grid, h).partial_fit(assign.user_pattern())
    if "pcf_bs" in cfg.outputs:
        out["pcf_bs"] = BsUserPcfEstimator(grid, h).partial_fit(assign)
    if "pcf_thinned" in cfg.outputs or "pcf_bs_thinned" in cfg.outputs:
        thinned = thin_users(assign, THINNING_RETAIN, rng)
        if "pcf_thinned" in cfg.outputs:
            out["pcf_thinned"] = PcfEstimator(grid, h).partial_fit(thinned.user_pattern())
        if "pcf_bs_thinned" in cfg.outputs:
            out["pcf_bs_thinned"] = BsUserPcfEstimator(grid, h).partial_fit(thinned)
    if "distances" in cfg.outputs:
        out["distances"] = _distance_arrays(assign)
    if "cells" in cfg.outputs:
        out["cells"] = (tess.areas, assign.vacant.copy())
    if "conditional_area" in cfg.outputs:
        out["conditional_area"] = (nucleus_nn_distances(tess), tess.areas)
    return out


def _distance_arrays(assign):
    from scipy.spatial import cKDTree

    w = assign.tess.pattern.window
    users = assign.active_users()
    occ = ~assign.vacant
    link = torus_distance(users, assign.tess.pattern.points[occ], w)
    if len(users) >= 2:
        tree = cKDTree(users, boxsize=[w.width, w.height])
        d2, idx = tree.query(users, k=2)
        d_nn = d2[:, 1]
        db, ib = tree.query(assign.tess.pattern.points, k=2)
        own = assign.active_position_of_cell()
        d_ni = np.where(ib[:, 0] == own, db[:, 1], db[:, 0])
    else:
        d_nn = np.empty(0)
        d_ni = np.empty(0)
    return {"nearest_neighbor": d_nn, "link": link, "nearest_interferer": d_ni}


def _merge_estimator(target, part):
    if target is None:
        return part
    target._ring += part._ring
    target._cum += part._cum
    target._den += part._den
    target._per_real.extend(part._per_real)
    target.n_realizations_ += part.n_realizations_
    target.n_skipped_ += part.n_skipped_
    return target


def _map_realizations(cfg):
    indices = range(cfg.n_realizations)
    if cfg.workers == 1:
        for i in indices:
            yield _simulate(cfg, i)
    else:
        chunk = max(1, cfg.n_realizations // (cfg.workers * 4))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            yield from pool.map(_simulate, [cfg] * cfg.n_realizations, indices, chunksize=chunk)


def run_experiment(cfg, write_csv=True):
    """Run all realizations of a config and assemble the requested statistics.

    Returns an ``ExperimentResult``; when ``write_csv`` is set, also writes
    one CSV per requested statistic plus a summary.csv into the output
    directory and records their paths.
    """
    merged = {}
    dist_pool = {"nearest_neighbor": [], "link": [], "nearest_interferer": []}
    cell_pool = []
    cond_pool = []
    for part in _map_realizations(cfg):
        for key in ("pcf", "pcf_bs", "pcf_thinned", "pcf_bs_thinned"):
            if key in part:
                merged[key] = _merge_estimator(merged.get(key), part[key])
        if "distances" in part:
            for k, v in part["distances"].items():
                dist_pool[k].append(v)
        if "cells" in part:
            cell_pool.append(part["cells"])
        if "conditional_area" in part:
            cond_pool.append(part["conditional_area"])

    res = ExperimentResult(config=cfg)
    for key, est in merged.items():
        est._finalize()
        setattr(res, key, est.result())
    if dist_pool["link"]:
        res.distances = {k: np.concatenate(v) for k, v in dist_pool.items() if v}
    if cell_pool:
        res.cells = cell_stats_from_arrays(cell_pool)
    if cond_pool:
        rho = rho_grid_default(cfg)
        res.conditional_area = conditional_cell_area(cond_pool, rho)
    if "fits" in cfg.outputs:
        if res.pcf is not None:
            res.fits.append(analytics.fit_pcf(res.pcf, "prototype_user"))
            res.fits.append(analytics.fit_pcf(res.pcf, "exponential"))
        if res.pcf_bs is not None:
            res.fits.append(analytics.fit_pcf(res.pcf_bs, "exponential_r2"))
            res.fits.append(analytics.fit_pcf(res.pcf_bs, "prototype_bs"))

    res.summary = _summarize(res)
    if write_csv:
        _write_outputs(res)
    return res


def rho_grid_default(cfg):
    return np.arange(0.02, 0.5 + 1e-12, 0.02) * cfg.scale


def cell_stats_from_arrays(pairs):
    """CellStats from pooled (areas, vacant) realization arrays."""

    class _View:
        def __init__(self, areas, vacant):
            self._areas, self.vacant = np.asarray(areas, float), np.asarray(vacant, bool)

        def cell_areas(self):
            return self._areas

    return cell_stats([_View(a, v) for a, v in pairs])


def _summarize(res):
    s = {"model": res.config.model, "n_realizations": res.config.n_realizations}
    if res.cells is not None:
        s["vacancy_fraction"] = res.cells.vacancy_fraction
        s["mean_area_occ"] = res.cells.mean_area_occ
        s["mean_area_vac"] = res.cells.mean_area_vac
        s["mean_area_crofton"] = res.cells.mean_area_crofton
    if res.distances:
        if "link" in res.distances:
            s["mean_link_distance"] = float(res.distances["link"].mean())
        if "nearest_neighbor" in res.distances and len(res.distances["nearest_neighbor"]):
            s["mean_nn_distance"] = float(res.distances["nearest_neighbor"].mean())
        if "nearest_interferer" in res.distances and len(res.distances["nearest_interferer"]):
            s["mean_interferer_distance"] = float(res.distances["nearest_interferer"].mean())
    for fr in res.fits:
        tag = fr.model.family
        for name, val in zip("abc", fr.model.params):
            s[f"fit_{tag}_{name}"] = val
    if res.config.alpha is not None and res.pcf is not None:
        mi = analytics.mean_interference(res.pcf, res.config.alpha, small_r_order=1)
        s["mean_interference"] = mi.value
    return s


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _write_csv(path, header_lines, columns, rows):
    with open(path, "w", newline="") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _write_outputs(res):
    cfg = res.config
    out_dir = cfg.resolve_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    echo = cfg.echo_lines()
    tag = cfg.model
    for key in ("pcf", "pcf_bs", "pcf_thinned", "pcf_bs_thinned"):
        est = getattr(res, key)
        if est is None:
            continue
        path = os.path.join(out_dir, f"{tag}_{key}.csv")
        err = est.g_stderr if est.g_stderr is not None else np.full(len(est.r_grid), np.nan)
        _write_csv(
            path,
            echo,
            ["r", "g_hat", "k_hat", "pairs", "stderr"],
            zip(est.r_grid, est.g_hat, est.k_hat, (int(p) for p in est.pair_counts), err),
        )
        res.csv_paths[key] = path
    if res.distances:
        path = os.path.join(out_dir, f"{tag}_distances.csv")
        kinds = sorted(res.distances)
        rows = []
        for k in kinds:
            v = res.distances[k]
            rows.append([k, len(v), float(v.mean()), float((v**2).mean())])
        _write_csv(path, echo, ["kind", "n", "mean", "mean_square"], rows)
        res.csv_paths["distances"] = path
    if res.cells is not None:
        path = os.path.join(out_dir, f"{tag}_cells.csv")
        c = res.cells
        _write_csv(
            path,
            echo,
            ["vacancy_fraction", "mean_area_occ", "mean_area_vac", "mean_area_crofton", "mean_inv_area", "n_cells"],
            [[c.vacancy_fraction, c.mean_area_occ, c.mean_area_vac, c.mean_area_crofton, c.mean_inv_area, c.n_cells]],
        )
        res.csv_paths["cells"] = path
    if res.conditional_area is not None:
        path = os.path.join(out_dir, f"{tag}_conditional_area.csv")
        rho, means = res.conditional_area
        _write_csv(path, echo, ["rho", "mean_area"], zip(rho, means))
        res.csv_paths["conditional_area"] = path
    if res.fits:
        path = os.path.join(out_dir, f"{tag}_fits.csv")
        rows = []
        for fr in res.fits:
            p = list(fr.model.params) + [math.nan] * (3 - len(fr.model.params))
            rows.append([fr.model.family, p[0], p[1], p[2], fr.sse, int(fr.converged)])
        _write_csv(path, echo, ["family", "a", "b", "c", "sse", "converged"], rows)
        res.csv_paths["fits"] = path
    path = os.path.join(out_dir, f"{tag}_summary.csv")
    _write_csv(path, echo, ["key", "value"], sorted(res.summary.items()))
    res.csv_paths["summary"] = path


# ---------------------------------------------------------------------------
# figure bundles


def _sweep_realization(cfg, etas, index):
    """Shared-tessellation sweep: one pattern, one population draw per eta."""
    rng = realization_rng(cfg.master_seed, index)
    w = cfg.window()
    bs = sample_ppp(cfg.lambda_bs, w, rng)
    tess = build_voronoi(bs)
    rows = []
    for eta in etas:
        population = sample_ppp(eta * cfg.lambda_bs, w, rng)
        assign = type2_users(tess, population, rng)
        occ = ~assign.vacant
        link = torus_distance(assign.active_users(), bs.points[occ], w)
        rows.append((tess.areas, assign.vacant.copy(), link))
    return rows


def run_eta_sweep(cfg, etas):
    """Per-eta vacancy/area/link statistics over a common set of realizations."""
    etas = list(etas)
    pools = [([], []) for _ in etas]  # (cell pairs, link arrays)

    def _consume(parts):
        for part in parts:
            for j, (areas, vacant, link) in enumerate(part):
                pools[j][0].append((areas, vacant))
                pools[j][1].append(link)

    if cfg.workers == 1:
        _consume(_sweep_realization(cfg, etas, i) for i in range(cfg.n_realizations))
    else:
        chunk = max(1, cfg.n_realizations // (cfg.workers * 4))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            _consume(
                pool.map(
                    _sweep_realization, [cfg] * cfg.n_realizations,
                    [etas] * cfg.n_realizations, range(cfg.n_realizations),
                    chunksize=chunk,
                )
            )
    rows = []
    for eta, (cells, links) in zip(etas, pools):
        stats = cell_stats_from_arrays(cells)
        link = np.concatenate(links)
        rows.append(
            {
                "eta": eta,
                "eta_db": 10.0 * math.log10(eta),
                "nu_sim": stats.vacancy_fraction,
                "nu_model": analytics.vacancy_probability(eta),
                "mean_area_occ": stats.mean_area_occ,
                "mean_area_vac": stats.mean_area_vac,
                "mean_link": float(link.mean()),
                "occ_over_r2": stats.mean_area_occ / float(link.mean()) ** 2,
                "stats": stats,
                "link": link,
            }
        )
    return rows


FIGURES = ("fig1", "fig2", "fig3", "fig4")


def figure_command(figure_id, cfg=None):
    """Produce the CSV bundle behind one of the four reference figures.

    Each bundle holds the simulated curve plus every analytical overlay the
    figure shows. Returns the bundle path.
    """
    if figure_id not in FIGURES:
        raise ConfigurationError(f"unknown figure {figure_id!r}; choose from {FIGURES}")
    base = cfg or ExperimentConfig(model="type1")
    out_dir = base.resolve_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{figure_id}.csv")

    if figure_id in ("fig1", "fig3"):
        need = "pcf" if figure_id == "fig1" else "pcf_bs"
        cfg_run = replace(base, model="type1", eta=None, outputs=(need,))
        res = run_experiment(cfg_run, write_csv=False)
        est = res.pcf if figure_id == "fig1" else res.pcf_bs
        r = est.r_grid
        if figure_id == "fig1":
            cols = ["r", "g_sim", "stderr", "g_prototype", "g_best_exp", "g_ginibre"]
            overlays = [
                analytics.eval_pcf_model(analytics.PcfModel("prototype_user", analytics.PROTOTYPE_USER_PARAMS), r),
                analytics.eval_pcf_model(analytics.PcfModel("exponential", (analytics.BEST_EXP_USER_RATE,)), r),
                analytics.eval_pcf_model(analytics.PcfModel("exponential_r2", (analytics.BEST_EXP_BS_RATE,)), r),
            ]
        else:
            cols = ["r", "gbs_sim", "stderr", "gbs_analytical", "gbs_prototype", "gbs_best_exp", "gbs_singh"]
            overlays = [
                analytics.eval_pcf_model(analytics.PcfModel("exponential_r2", (analytics.ANALYTICAL_BS_RATE,)), r),
                analytics.eval_pcf_model(analytics.PcfModel("prototype_bs", analytics.PROTOTYPE_BS_PARAMS), r),
                analytics.eval_pcf_model(analytics.PcfModel("exponential_r2", (analytics.BEST_EXP_BS_RATE,)), r),
                analytics.eval_pcf_model(analytics.PcfModel("singh", (1.0,)), r),
            ]
        err = est.g_stderr if est.g_stderr is not None else np.full(len(r), np.nan)
        _write_csv(path, cfg_run.echo_lines(), cols, zip(r, est.g_hat, err, *overlays))
    elif figure_id == "fig2":
        cfg_run = replace(base, model="type1", eta=None, outputs=("conditional_area",))
        res = run_experiment(cfg_run, write_csv=False)
        rho, means = res.conditional_area
        model = 0.5 + rho / 3.0
        _write_csv(path, cfg_run.echo_lines(), ["rho", "area_sim", "area_small_rho_model"], zip(rho, means, model))
    else:  # fig4
        cfg_run = replace(base, model="type2", eta=base.eta or 1.0, outputs=("cells", "distances"))
        etas = [10 ** (db / 10.0) for db in range(-10, 11)]
        rows = run_eta_sweep(cfg_run, etas)
        cols = ["eta_db", "nu_sim", "nu_model", "mean_area_occ", "mean_area_vac", "mean_link", "occ_over_r2"]
        _write_csv(
            path, cfg_run.echo_lines(), cols,
            [[row[c] for c in cols] for row in rows],
        )
    return path
