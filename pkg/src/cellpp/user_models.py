"""The two one-user-per-cell processes built on a tessellation.

Type I places one uniform user in every cell (fully loaded network). Type II
draws the user of each cell uniformly from an independent population process
restricted to the cell, leaving cells without population points vacant; its
load is governed by the population-to-station density ratio eta.

Assignments are immutable after construction; vacant cells are retained (not
dropped) because vacant-cell area statistics are part of the model's output.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import sample_point_in_polygon
from .random import as_generator
from .sampling import PointPattern
from .tessellation import locate_cells
from .validation import check_same_window

VACANT = -1


@dataclass(frozen=True)
class UserAssignment:
    """Per-cell pairing of serving station and user point.

    ``users[i]`` is the user served by cell ``i`` (NaN row when vacant);
    ``vacant`` marks cells with no user. ``eta`` is the population-to-station
    density ratio (type II only).
    """

    tess: object
    users: np.ndarray = field(repr=False)
    vacant: np.ndarray = field(repr=False)
    model: str
    eta: float = None

    def __post_init__(self):
        users = np.asarray(self.users, dtype=float)
        vacant = np.asarray(self.vacant, dtype=bool)
        n = len(self.tess.cells)
        if users.shape != (n, 2) or vacant.shape != (n,):
            raise ValueError("need exactly one (user, vacancy flag) entry per cell")
        if self.model == "type1" and vacant.any():
            raise ValueError("a type I assignment cannot have vacant cells")
        occ = ~vacant
        if occ.any():
            owners = locate_cells(self.tess, users[occ])
            if not np.array_equal(owners, np.nonzero(occ)[0]):
                raise ValueError("every user must lie inside its serving cell")
        users.setflags(write=False)
        vacant.setflags(write=False)
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "vacant", vacant)

    def __len__(self):
        return len(self.vacant)

    @property
    def n_active(self):
        return int((~self.vacant).sum())

    def active_users(self):
        """Positions of all non-vacant users, in cell order."""
        return self.users[~self.vacant]

    def active_cell_indices(self):
        return np.nonzero(~self.vacant)[0]

    def active_position_of_cell(self):
        """Index of each cell's user within ``active_users()`` (-1 if vacant)."""
        pos = np.full(len(self.vacant), VACANT, dtype=np.int64)
        pos[~self.vacant] = np.arange(self.n_active)
        return pos

    def cell_areas(self):
        return self.tess.areas

    def user_pattern(self):
        """Active users as a ``PointPattern`` (intensity = realized density)."""
        users = self.active_users()
        w = self.tess.pattern.window
        return PointPattern(users, w, len(users) / w.area)


def type1_users(tess, seed):
    """One user uniformly placed in every Voronoi cell (same density as the
    stations)."""
    rng = as_generator(seed)
    w = tess.pattern.window
    users = np.empty((len(tess.cells), 2))
    for i, cell in enumerate(tess.cells):
        users[i] = sample_point_in_polygon(cell.polygon, rng) % w.sides
    vacant = np.zeros(len(tess.cells), dtype=bool)
    return UserAssignment(tess, users, vacant, "type1")


def type2_users(tess, population, seed):
    """One user per cell drawn uniformly from the population points inside it.

    Cells containing no population point stay vacant, so the active-user
    density is ``lambda_P * (1 - vacancy fraction)`` by construction. The
    draw is deterministic under seed replay: candidates are ranked in a
    fixed canonical (x, y) order before the uniform pick.
    """
    check_same_window(tess.pattern, population, "tessellation and population")
    rng = as_generator(seed)
    n = len(tess.cells)
    users = np.full((n, 2), np.nan)
    vacant = np.ones(n, dtype=bool)
    pop = population.points
    if len(pop):
        canonical = np.lexsort((pop[:, 1], pop[:, 0]))
        pop = pop[canonical]
        owner = locate_cells(tess, pop)
        grouped = np.argsort(owner, kind="stable")
        cells, starts = np.unique(owner[grouped], return_index=True)
        counts = np.diff(np.append(starts, len(owner)))
        for c, s, k in zip(cells, starts, counts):
            pick = rng.integers(0, k)
            users[c] = pop[grouped[s + pick]]
            vacant[c] = False
    eta = None
    if population.nominal_intensity and tess.pattern.nominal_intensity:
        eta = population.nominal_intensity / tess.pattern.nominal_intensity
    return UserAssignment(tess, users, vacant, "type2", eta)


def interferers_at_bs(assign, bs_index):
    """All active users except the one served by ``bs_index``, re-centered.

    Coordinates are shifted (with torus wrap) so the chosen station sits at
    the origin; the result is a pattern on the same window.
    """
    n = len(assign)
    if not 0 <= int(bs_index) < n:
        raise ValueError(f"bs_index {bs_index} out of range for {n} cells")
    bs_index = int(bs_index)
    keep = ~assign.vacant
    keep = keep.copy()
    keep[bs_index] = False
    w = assign.tess.pattern.window
    origin = assign.tess.pattern.points[bs_index]
    shifted = (assign.users[keep] - origin) % w.sides
    return PointPattern(shifted, w, len(shifted) / w.area)


def thin_users(assign, retain, seed):
    """Independent thinning of the active users (each kept with prob ``retain``).

    Thinned-away users leave their cells vacant; the model tag records the
    thinning so type I invariants are not asserted on the result.
    """
    if not 0 < retain <= 1:
        raise ValueError(f"retain probability must be in (0, 1], got {retain}")
    rng = as_generator(seed)
    keep_draw = rng.random(len(assign)) < retain
    vacant = assign.vacant | ~keep_draw
    users = np.where(vacant[:, None], np.nan, assign.users)
    return UserAssignment(assign.tess, users, vacant, f"{assign.model}-thinned", assign.eta)


def assignment_to_csv(assign, path):
    """Dump: bs_x, bs_y, user_x, user_y, vacant_flag, cell_area per cell."""
    bs = assign.tess.pattern.points
    with open(path, "w", newline="") as f:
        f.write("bs_x,bs_y,user_x,user_y,vacant_flag,cell_area\n")
        for i, cell in enumerate(assign.tess.cells):
            ux, uy = assign.users[i]
            f.write(
                f"{bs[i, 0]:.9g},{bs[i, 1]:.9g},{ux:.9g},{uy:.9g},"
                f"{int(assign.vacant[i])},{cell.area:.9g}\n"
            )
