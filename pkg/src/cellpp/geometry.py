"""Planar primitives: periodic distances, convex polygons, disk segments.

Everything in this module is a pure function on immutable values and safe for
concurrent use. Simulation windows are periodic (tori) by default, which
removes edge bias from all second-order statistics without explicit edge
corrections.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .validation import GEOM_TOL, as_point, as_points, check_positive


@dataclass(frozen=True)
class Window:
    """Rectangular simulation window, periodic (toroidal) by default."""

    width: float
    height: float
    periodic: bool = True

    def __post_init__(self):
        check_positive(self.width, "width")
        check_positive(self.height, "height")

    @property
    def area(self):
        return self.width * self.height

    @property
    def sides(self):
        return np.array([self.width, self.height])


@dataclass(frozen=True)
class ConvexPolygon:
    """A strictly convex polygon with counter-clockwise vertices.

    Clockwise input is reversed on construction; degenerate input (fewer than
    3 distinct vertices, reflex corners beyond tolerance, or zero area)
    raises ``ValueError``.
    """

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = as_points(self.vertices)
        # drop consecutive duplicates (within tolerance), including wraparound
        keep = np.linalg.norm(v - np.roll(v, 1, axis=0), axis=1) > GEOM_TOL
        v = v[keep]
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        area2 = _signed_area2(v)
        if area2 < 0:
            v = v[::-1]
            area2 = -area2
        if area2 <= GEOM_TOL**2:
            raise ValueError("degenerate polygon: vanishing area")
        cross = _corner_cross(v)
        if np.any(cross < -GEOM_TOL):
            raise ValueError("polygon is not convex within tolerance")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def area(self):
        return 0.5 * _signed_area2(self.vertices)

    @property
    def perimeter(self):
        v = self.vertices
        return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())

    @property
    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
        return (v + w).T @ cr / (3.0 * cr.sum())

    def contains(self, p, tol=GEOM_TOL):
        """True if ``p`` lies inside or on the boundary (within ``tol``)."""
        p = as_point(p)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        d = p - v
        return bool(np.all(e[:, 0] * d[:, 1] - e[:, 1] * d[:, 0] >= -tol))


def _signed_area2(v):
    x, y = v[:, 0], v[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _corner_cross(v):
    e = np.roll(v, -1, axis=0) - v
    f = np.roll(e, -1, axis=0)
    return e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]


def disk_segment_area(v, r):
    """Area of a disk of radius ``r`` cut off by a chord at distance ``v``.

    Equals ``r^2 acos(v/r) - v sqrt(r^2 - v^2)``: the area of
    ``b((-v, 0), r)`` intersected with the right half-plane. Decreases from
    ``pi r^2 / 2`` at ``v = 0`` to ``0`` at ``v = r``.

    Parameters
    ----------
    v : float or array
        Chord distance from the disk center, ``0 <= v <= r``.
    r : float
        Disk radius, ``> 0``.
    """
    r = check_positive(r, "r")
    v_arr = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v_arr)) or np.any(v_arr < 0) or np.any(v_arr > r):
        raise ValueError(f"v must lie in [0, r]={[0, r]}, got {v}")
    out = r**2 * np.arccos(v_arr / r) - v_arr * np.sqrt(np.maximum(r**2 - v_arr**2, 0.0))
    return out if out.ndim else float(out)


def mean_segment_area(r):
    """Mean of ``disk_segment_area(V, r)`` for ``V`` uniform on ``[0, r]``: ``2 r^2 / 3``."""
    r = check_positive(r, "r")
    return 2.0 * r**2 / 3.0


def mean_segment_area_quadrature(r):
    """Numerical cross-check of :func:`mean_segment_area` by adaptive quadrature."""
    r = check_positive(r, "r")
    val, _ = integrate.quad(lambda t: disk_segment_area(t, r), 0.0, r, epsabs=1e-12, epsrel=1e-12)
    return val / r


def torus_displacement(p, q, window):
    """Shortest displacement vector(s) from ``q`` to ``p`` under the window metric."""
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    if window.periodic:
        sides = window.sides
        d = (d + sides / 2.0) % sides - sides / 2.0
    return d


def torus_distance(p, q, window):
    """Distance between ``p`` and ``q``: wraparound when the window is periodic.

    Accepts single points or broadcastable arrays of points; symmetric, and
    bounded by half the window diagonal in the periodic case.
    """
    d = torus_displacement(p, q, window)
    out = np.hypot(d[..., 0], d[..., 1])
    return out if out.ndim else float(out)


def polygon_area_perimeter(poly):
    """Shoelace area and edge-length sum of a convex polygon."""
    return poly.area, poly.perimeter


def distance_to_boundary(p, poly):
    """Distance from an interior point to the nearest polygon edge.

    Raises ``ValueError`` when ``p`` lies outside ``poly``.
    """
    p = as_point(p)
    if not poly.contains(p):
        raise ValueError("point lies outside the polygon")
    return float(np.min(_edge_distances(p, poly)))


def nearest_edge(p, poly):
    """Index of the polygon edge nearest to interior point ``p``."""
    p = as_point(p)
    if not poly.contains(p):
        raise ValueError("point lies outside the polygon")
    return int(np.argmin(_edge_distances(p, poly)))


def _edge_distances(p, poly):
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    e = b - a
    t = np.einsum("ij,ij->i", p - a, e) / np.einsum("ij,ij->i", e, e)
    foot = a + np.clip(t, 0.0, 1.0)[:, None] * e
    return np.linalg.norm(p - foot, axis=1)


def sample_point_in_polygon(poly, rng):
    """Uniform point in a convex polygon.

    Fan-triangulates from the centroid, picks a triangle with probability
    proportional to area, then samples uniformly inside it - exact, with no
    rejection loop even for very elongated cells.
    """
    c = poly.centroid
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    tri_area = 0.5 * np.abs((a[:, 0] - c[0]) * (b[:, 1] - c[1]) - (a[:, 1] - c[1]) * (b[:, 0] - c[0]))
    cum = np.cumsum(tri_area)
    cum /= cum[-1]
    u0, u1, u2 = rng.random(3)
    k = min(np.searchsorted(cum, u0), len(a) - 1)
    if u1 + u2 > 1.0:
        u1, u2 = 1.0 - u1, 1.0 - u2
    return c + u1 * (a[k] - c) + u2 * (b[k] - c)
