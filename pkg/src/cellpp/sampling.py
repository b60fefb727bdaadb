"""Generators for the base-station and user-population processes.

Samplers are pure given ``(params, seed)``: the same seed reproduces the same
pattern bit-for-bit regardless of execution order, so distinct realizations
can be drawn concurrently without coordination.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Window
from .random import as_generator
from .validation import (
    ConfigurationError,
    as_points,
    check_in_range,
    check_nonnegative,
    check_positive,
)


@dataclass(frozen=True)
class PointPattern:
    """A finite planar point set on a rectangular window.

    ``nominal_intensity`` is the process intensity the pattern was drawn at
    (points per unit area), which realized counts fluctuate around.
    """

    points: np.ndarray = field(repr=False)
    window: Window
    nominal_intensity: float

    def __post_init__(self):
        pts = as_points(self.points)
        w = self.window
        if len(pts) and (
            pts[:, 0].min() < 0
            or pts[:, 1].min() < 0
            or pts[:, 0].max() >= w.width
            or pts[:, 1].max() >= w.height
        ):
            raise ValueError("all points must lie inside [0, width) x [0, height)")
        if len(pts) > 0:
            check_nonnegative(self.nominal_intensity, "nominal_intensity")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def realized_intensity(self):
        return len(self.points) / self.window.area


@dataclass(frozen=True)
class RadialSample:
    """Sorted point moduli (distances from the origin) of a radial process."""

    radii: np.ndarray = field(repr=False)
    beta: float
    intensity: float

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or np.any(r < 0) or np.any(np.diff(r) < 0):
            raise ValueError("radii must be a nondecreasing 1-d array of nonnegative reals")
        check_in_range(self.beta, 0.0, 1.0, "beta", lo_open=True)
        check_positive(self.intensity, "intensity")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    def __len__(self):
        return len(self.radii)


def sample_ppp(intensity, window, seed):
    """Uniform Poisson point process on the window.

    The count is Poisson(intensity * area) and locations are i.i.d. uniform;
    ``intensity=0`` yields an empty pattern.
    """
    intensity = check_nonnegative(intensity, "intensity")
    rng = as_generator(seed)
    n = rng.poisson(intensity * window.area)
    pts = rng.random((n, 2)) * window.sides
    return PointPattern(pts, window, intensity)


def sample_square_lattice(intensity, window, seed):
    """Stationary square lattice: spacing ``1/sqrt(intensity)``, uniform random shift.

    Both window sides must be integer multiples of the spacing so the lattice
    wraps cleanly on the torus; otherwise a ``ConfigurationError`` is raised.
    The pattern has exactly ``intensity * area`` points.
    """
    intensity = check_positive(intensity, "intensity")
    spacing = 1.0 / math.sqrt(intensity)
    nx, ny = window.width / spacing, window.height / spacing
    if abs(nx - round(nx)) > 1e-9 or abs(ny - round(ny)) > 1e-9:
        raise ConfigurationError(
            f"window sides {window.width} x {window.height} are not integer "
            f"multiples of the lattice spacing {spacing}"
        )
    nx, ny = round(nx), round(ny)
    rng = as_generator(seed)
    shift = rng.random(2) * spacing
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = np.column_stack([ix.ravel(), iy.ravel()]) * spacing + shift
    pts %= window.sides
    return PointPattern(pts, window, intensity)


def sample_ginibre_radii(beta, intensity, n_max, seed, palm=False):
    """Radial representation of the beta-Ginibre process.

    Squared moduli are independent ``(beta / (pi * intensity)) * Gamma(k, 1)``
    variates for ``k = 1..n_max``, each retained with probability ``beta``
    (independent thinning with rescaling that preserves the intensity); the
    retained radii come back sorted. With ``palm=True`` the sample represents
    the process conditioned on one of its points sitting at the origin (that
    point removed): the shape-1 gamma is dropped, i.e. shapes ``2..n_max + 1``
    are used, which is what simulating interferer distances seen from a point
    of the process calls for.

    Parameters
    ----------
    beta : float
        Thinning retention in ``(0, 1]``; ``beta=1`` is the plain Ginibre.
    intensity : float
        Target intensity of the thinned-and-rescaled process.
    n_max : int
        Number of gamma shapes to generate; radii beyond the largest shape
        are not represented, so choose ``n_max`` well above
        ``intensity * pi * r_max**2`` for the radius range of interest.
    """
    beta = check_in_range(beta, 0.0, 1.0, "beta", lo_open=True)
    intensity = check_positive(intensity, "intensity")
    if int(n_max) < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rng = as_generator(seed)
    shapes = np.arange(1, int(n_max) + 1) + (1 if palm else 0)
    sq = rng.gamma(shape=shapes) * (beta / (math.pi * intensity))
    keep = rng.random(int(n_max)) <= beta
    return RadialSample(np.sort(np.sqrt(sq[keep])), beta, intensity)


def default_ginibre_n_max(intensity, r_max):
    """Shape count so that mass beyond ``b(o, r_max)`` is negligible."""
    return max(1, math.ceil(intensity * math.pi * r_max**2 * 3))
