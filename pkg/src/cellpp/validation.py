"""Input validation helpers shared across the package."""

import numbers

import numpy as np

#: Geometric tolerance for convexity/containment checks (double precision
#: headroom at window sizes up to ~100).
GEOM_TOL = 1e-9


class ConfigurationError(ValueError):
    """A structurally invalid configuration (as opposed to a bad value)."""


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_nonnegative(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
    return float(value)


def check_in_range(value, lo, hi, name, lo_open=False, hi_open=False):
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi):
        lob = "(" if lo_open else "["
        hib = ")" if hi_open else "]"
        raise ValueError(f"{name} must lie in {lob}{lo}, {hi}{hib}, got {value!r}")
    return v


def as_point(p):
    """Coerce to a finite (2,) float array."""
    a = np.asarray(p, dtype=float)
    if a.shape != (2,):
        raise ValueError(f"expected a planar point of shape (2,), got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"point coordinates must be finite, got {p!r}")
    return a


def as_points(pts):
    """Coerce to a finite (n, 2) float array."""
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, 2)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError(f"expected points of shape (n, 2), got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def check_r_grid(r_grid):
    """Validate a strictly increasing grid of positive radii."""
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or len(r) == 0:
        raise ValueError("r_grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(r)) or r[0] <= 0:
        raise ValueError("r_grid values must be finite and positive")
    if np.any(np.diff(r) <= 0):
        raise ValueError("r_grid must be strictly increasing")
    return r


def check_bandwidth(bandwidth, r_grid):
    """Validate a ring-estimator bandwidth against its grid spacing."""
    h = check_positive(bandwidth, "bandwidth")
    r = check_r_grid(r_grid)
    if len(r) > 1:
        step = np.min(np.diff(r))
        if h >= 5 * step:
            raise ValueError(
                f"bandwidth {h} too wide for grid spacing {step} (must be < 5x spacing)"
            )
    return h


def check_same_window(a, b, what="patterns"):
    wa, wb = a.window, b.window
    if (wa.width, wa.height, wa.periodic) != (wb.width, wb.height, wb.periodic):
        raise ConfigurationError(f"{what} must share the same window, got {wa} and {wb}")
