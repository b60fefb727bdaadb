"""Closed-form curves, densities and integrals for the one-user-per-cell models.

Covers the prototype pair-correlation families and their fitted constants,
the gamma cell-area approximation, vacancy probability, Poisson-replacement
intensity functions, distance densities, the mean-interference integral, and
least-squares fitting of the pcf families to empirical estimates. All pure
functions; fitting is single-threaded per call.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special, stats
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .estimators import PcfEstimate
from .validation import check_positive

# fitted constants for the type I model at unit intensity
PROTOTYPE_USER_PARAMS = (9 / 4, 1 / 2, 5 / 4)
PROTOTYPE_BS_PARAMS = (13 / 2, 2 / 7, 13 / 9)
BEST_EXP_USER_RATE = 3.0
BEST_EXP_BS_RATE = 12 * math.pi / 5
ANALYTICAL_BS_RATE = 14 * math.pi / 5
GINIBRE_BETA_BS = 5 / 12
SINGH_RATE = math.pi

GAMMA_SHAPE = 3.5  # shape (= rate) of the unit-mean cell-area approximation

_FAMILIES = {
    # family -> (n_params, small-r order of g)
    "prototype_user": (3, 1),
    "prototype_bs": (3, 2),
    "exponential": (1, 1),
    "exponential_r2": (1, 2),
    "ginibre": (1, 2),
    "singh": (1, 2),
}


@dataclass(frozen=True)
class PcfModel:
    """A parametric pair-correlation curve; rises from 0 at r=0 toward 1."""

    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown pcf family {self.family!r}")
        n, _ = _FAMILIES[self.family]
        params = tuple(float(p) for p in np.atleast_1d(self.params))
        if len(params) != n:
            raise ValueError(f"family {self.family!r} takes {n} parameter(s), got {params}")
        if any(p <= 0 or not np.isfinite(p) for p in params):
            raise ValueError(f"pcf parameters must be positive and finite, got {params}")
        object.__setattr__(self, "params", params)

    @property
    def small_r_order(self):
        return _FAMILIES[self.family][1]

    def __call__(self, r):
        return eval_pcf_model(self, r)


@dataclass(frozen=True)
class FitResult:
    model: PcfModel
    sse: float
    converged: bool
    n_points: int


@dataclass(frozen=True)
class InterferenceResult:
    """Mean interference integral 2 pi int g(r) r^(1-alpha) dr.

    ``closed_form_magnitude`` is filled for pure-exponential-in-r^2 families,
    where the literature closed form pi^(a/2) a^(a/2-1) Gamma(1-a/2) exists;
    its printed sign is negative on 2<alpha<4 while the integral is positive,
    so the magnitude is reported and ``sign_mismatch`` records the flip.
    """

    value: float
    finite: bool
    alpha: float
    closed_form_magnitude: float = None
    sign_mismatch: bool = False


def eval_pcf_model(model, r):
    """Evaluate a pcf family at radius ``r`` (scalar or array, >= 0)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    f, p = model.family, model.params
    # -expm1(-x) instead of 1-exp(-x): exact to machine precision as r -> 0
    if f == "prototype_user":
        a, b, c = p
        out = -np.expm1(-a * r) + b * r**2 * np.exp(-c * r**2)
    elif f == "prototype_bs":
        a, b, c = p
        out = -np.expm1(-a * r**2) + b * r**2 * np.exp(-c * r**2)
    elif f == "exponential":
        out = -np.expm1(-p[0] * r)
    elif f == "exponential_r2":
        out = -np.expm1(-p[0] * r**2)
    elif f == "ginibre":
        out = -np.expm1(-math.pi * r**2 / p[0])
    else:  # singh
        out = -np.expm1(-p[0] * math.pi * r**2)
    return out if out.ndim else float(out)


def slope_constants():
    """Small-r slope constants of the pcfs, with their derivation chain.

    The square-cell estimate combines the boundary-layer factor
    ``p1_coeff * r`` with the segment-area factor ``p2_coeff * r^2`` and the
    K-to-g conversion ``3/(2 pi)``; the fitted slope comes from the prototype
    fit. The station-side coefficient multiplies r^2; the lattice slope is
    the user-process slope on the unit square lattice.
    """
    p1 = 32 * math.sqrt(14) / (15 * math.sqrt(math.pi))
    p2 = 14 / 15
    return {
        "g_slope_estimate": 3 * p1 * p2 / (2 * math.pi),
        "g_slope_fitted": 9 / 4,
        "gbs_r2_coeff": 14 * math.pi / 5,
        "lattice_slope": 4 / math.pi,
        "p1_coeff": p1,
        "p2_coeff": p2,
        "mean_inv_area": 7 / 5,
        "mean_inv_area_near_boundary": 14 / 5,
    }


def gamma_area_pdf(x):
    """Unit-mean gamma density (shape 7/2, rate 7/2) of the normalized cell area."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise ValueError("cell area must be positive")
    out = stats.gamma.pdf(x_arr, a=GAMMA_SHAPE, scale=1.0 / GAMMA_SHAPE)
    return out if out.ndim else float(out)


def vacancy_probability(eta):
    """Fraction of vacant cells at density ratio eta: (7/2 / (7/2 + eta))^(7/2)."""
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(eta_arr < 0):
        raise ValueError("eta must be nonnegative")
    out = (GAMMA_SHAPE / (GAMMA_SHAPE + eta_arr)) ** GAMMA_SHAPE
    return out if out.ndim else float(out)


def ppp_replacement_intensity(r, lam, variant):
    """Intensity function of the Poisson process that replaces the user process.

    ``lambda * g(r sqrt(lambda))`` for the chosen curve: ``user_full`` uses the
    fitted user prototype, ``user_coarse`` the simple exponential (rate 3),
    ``bs_full`` the fitted station-side prototype, and ``bs_coarse`` the best
    exponential in r^2 (rate 12 pi / 5). All rise from 0 at r=0 to lambda.
    """
    lam = check_positive(lam, "lam")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    s = r * math.sqrt(lam)
    if variant == "user_full":
        g = eval_pcf_model(PcfModel("prototype_user", PROTOTYPE_USER_PARAMS), s)
    elif variant == "user_coarse":
        g = eval_pcf_model(PcfModel("exponential", (BEST_EXP_USER_RATE,)), s)
    elif variant == "bs_full":
        g = eval_pcf_model(PcfModel("prototype_bs", PROTOTYPE_BS_PARAMS), s)
    elif variant == "bs_coarse":
        g = eval_pcf_model(PcfModel("exponential_r2", (BEST_EXP_BS_RATE,)), s)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return lam * g


def distance_pdf(r, kind, lam=1.0):
    """Distance densities of the type I model at intensity ``lam``.

    ``nearest_neighbor``: user-to-nearest-user density 50 r^3 e^(-5 r^2) at
    unit intensity, rescaled by sqrt(lam).  ``link``: user-to-station density,
    a Rayleigh with rate corrected by 13/10.  ``rayleigh``: the standard
    nearest-station Rayleigh (low-load limit).
    """
    lam = check_positive(lam, "lam")
    r = np.asarray(r, dtype=float)
    if kind == "nearest_neighbor":
        out = 50.0 * lam**2 * r**3 * np.exp(-5.0 * lam * r**2)
    elif kind == "link":
        c = 1.3
        out = 2.0 * c * math.pi * lam * r * np.exp(-c * lam * math.pi * r**2)
    elif kind == "rayleigh":
        out = 2.0 * lam * math.pi * r * np.exp(-lam * math.pi * r**2)
    else:
        raise ValueError(f"unknown distance kind {kind!r}")
    return out if out.ndim else float(out)


def _tail_integral(r_cut, alpha):
    # 2 pi int_{r_cut}^inf r^(1-alpha) dr with g ~ 1
    return 2.0 * math.pi * r_cut ** (2.0 - alpha) / (alpha - 2.0)


def _small_r_coeff(pcf):
    """Leading coefficient c in g(r) ~ c r^order as r -> 0."""
    f, p = pcf.family, pcf.params
    return {
        "prototype_user": lambda: p[0],
        "exponential": lambda: p[0],
        "prototype_bs": lambda: p[0] + p[1],
        "exponential_r2": lambda: p[0],
        "ginibre": lambda: math.pi / p[0],
        "singh": lambda: math.pi * p[0],
    }[f]()


def _g_over_r_order(pcf, r):
    """g(r) / r^order, extended continuously to r = 0."""
    if r < 1e-120:
        return _small_r_coeff(pcf)
    return eval_pcf_model(pcf, r) / r**pcf.small_r_order


def mean_interference(pcf, alpha, r_cut=20.0, small_r_order=None):
    """Mean interference 2 pi int_0^inf g(r) r^(1-alpha) dr at unit intensity.

    ``pcf`` is a ``PcfModel`` or a ``PcfEstimate``. The integral diverges at
    the origin unless alpha < 2 + (small-r order of g): order-r pcfs need
    alpha < 3, order-r^2 pcfs alpha < 4. Divergent cases return
    ``finite=False`` with value ``inf``. For empirical estimates the small-r
    order must be hinted (defaults to 1, the conservative choice). alpha <= 2
    raises (far-field divergence).

    For exponential-in-r^2 models the closed-form magnitude
    pi^(a/2) a^(a/2-1) |Gamma(1-a/2)| (rate = a pi) is reported alongside.
    """
    alpha = float(alpha)
    if alpha <= 2:
        raise ValueError("alpha must exceed 2 (interference diverges in the far field)")
    if isinstance(pcf, PcfEstimate):
        order = 1 if small_r_order is None else int(small_r_order)
        if alpha >= order + 2:
            return InterferenceResult(math.inf, False, alpha)
        r, g = pcf.r_grid, pcf.g_hat
        head = 2.0 * math.pi * g[0] * r[0] ** (2.0 - alpha) / (order + 2.0 - alpha)
        body = np.trapezoid(2.0 * math.pi * g * r ** (1.0 - alpha), r)
        return InterferenceResult(float(head + body + _tail_integral(r[-1], alpha)), True, alpha)

    order = pcf.small_r_order
    if alpha >= order + 2:
        return InterferenceResult(math.inf, False, alpha)
    # substitute t = r^gamma with gamma = order + 2 - alpha on [0, 1]: the
    # transformed integrand is g(r)/r^order evaluated at r = t^(1/gamma),
    # bounded and continuous at 0, so the quadrature sees no singularity
    gamma_exp = order + 2.0 - alpha
    head, _ = integrate.quad(
        lambda t: _g_over_r_order(pcf, t ** (1.0 / gamma_exp)) / gamma_exp,
        0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=400,
    )
    body, _ = integrate.quad(
        lambda r: eval_pcf_model(pcf, r) * r ** (1.0 - alpha),
        1.0, r_cut, epsabs=1e-13, epsrel=1e-11, limit=400,
    )
    value = 2.0 * math.pi * (head + body) + _tail_integral(r_cut, alpha)
    closed = None
    mismatch = False
    if pcf.family in ("exponential_r2", "ginibre", "singh"):
        rate = {
            "exponential_r2": pcf.params[0],
            "ginibre": math.pi / pcf.params[0],
            "singh": math.pi * pcf.params[0],
        }[pcf.family]
        a = rate / math.pi
        printed = math.pi ** (alpha / 2.0) * a ** (alpha / 2.0 - 1.0) * special.gamma(1.0 - alpha / 2.0)
        closed = abs(printed)
        mismatch = (printed < 0) != (value < 0)
    return InterferenceResult(value, True, alpha, closed, mismatch)


_INITIAL_GUESS = {
    "prototype_user": PROTOTYPE_USER_PARAMS,
    "prototype_bs": PROTOTYPE_BS_PARAMS,
    "exponential": (BEST_EXP_USER_RATE,),
    "exponential_r2": (BEST_EXP_BS_RATE,),
    "ginibre": (GINIBRE_BETA_BS,),
    "singh": (1.0,),
}


class PcfModelFit(BaseEstimator):
    """Least-squares fit of a pcf family to (r, g) samples.

    Damped least squares on log-transformed parameters (which enforces
    positivity), started from the published constants of the family.
    """

    def __init__(self, family="prototype_user", r_range=None):
        self.family = family
        self.r_range = r_range

    def fit(self, X, y):
        r = np.asarray(X, dtype=float).ravel()
        g = np.asarray(y, dtype=float).ravel()
        if self.r_range is not None:
            lo, hi = self.r_range
            keep = (r >= lo) & (r <= hi)
            r, g = r[keep], g[keep]
        if len(r) < 10:
            raise ValueError(f"need at least 10 grid points to fit, got {len(r)}")
        x0 = np.log(_INITIAL_GUESS[self.family])

        def residual(x):
            return eval_pcf_model(PcfModel(self.family, tuple(np.exp(x))), r) - g

        res = optimize.least_squares(residual, x0, method="lm", xtol=1e-14, ftol=1e-14, gtol=1e-14)
        self.model_ = PcfModel(self.family, tuple(np.exp(res.x)))
        self.sse_ = float(np.sum(res.fun**2))
        self.converged_ = bool(res.success)
        self.n_points_ = len(r)
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return eval_pcf_model(self.model_, np.asarray(X, dtype=float))

    def result(self):
        check_is_fitted(self, "model_")
        return FitResult(self.model_, self.sse_, self.converged_, self.n_points_)


#: (lo, hi, grid_max) of the default fit range at unit intensity
DEFAULT_FIT_SPAN = (0.1, 3.5, 4.0)


def fit_pcf(est, family, r_range=None):
    """Fit a pcf family to a ``PcfEstimate`` over ``r_range`` (default: the
    rise-overshoot-settle span [0.1, 3.5] rescaled to the estimate's grid)."""
    if r_range is None:
        scale = est.r_grid[-1] / DEFAULT_FIT_SPAN[2]
        r_range = (DEFAULT_FIT_SPAN[0] * scale, DEFAULT_FIT_SPAN[1] * scale)
    return PcfModelFit(family=family, r_range=r_range).fit(est.r_grid, est.g_hat).result()


def fit_to_csv(fits, path, header_comments=()):
    """Write fit results as CSV rows: family, a, b, c, sse, converged."""
    with open(path, "w", newline="") as f:
        for line in header_comments:
            f.write(f"# {line}\n")
        f.write("family,a,b,c,sse,converged\n")
        for fr in fits:
            p = list(fr.model.params) + [math.nan] * (3 - len(fr.model.params))
            f.write(
                f"{fr.model.family},{p[0]:.9g},{p[1]:.9g},{p[2]:.9g},"
                f"{fr.sse:.9g},{int(fr.converged)}\n"
            )
