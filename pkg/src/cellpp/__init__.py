"""cellpp: simulation and analytics for one-user-per-cell point processes.

Point patterns of concurrently active users in cellular networks are
soft-core processes, not Poisson. This package simulates the two standard
constructions (one uniform user per Voronoi cell; one user drawn from an
independent population per cell), estimates their pair correlation
functions, distance distributions and cell-occupancy statistics on periodic
windows, and evaluates the matching closed-form approximations.
"""

from .analytics import (
    ANALYTICAL_BS_RATE,
    BEST_EXP_BS_RATE,
    BEST_EXP_USER_RATE,
    GINIBRE_BETA_BS,
    PROTOTYPE_BS_PARAMS,
    PROTOTYPE_USER_PARAMS,
    FitResult,
    InterferenceResult,
    PcfModel,
    PcfModelFit,
    distance_pdf,
    eval_pcf_model,
    fit_pcf,
    gamma_area_pdf,
    mean_interference,
    ppp_replacement_intensity,
    slope_constants,
    vacancy_probability,
)
from .estimators import (
    BsUserPcfEstimator,
    CellStats,
    DistanceSample,
    PcfEstimate,
    PcfEstimator,
    cell_stats,
    conditional_cell_area,
    distance_samples,
    estimate_pcf,
    estimate_pcf_bs,
    radial_pcf,
)
from .geometry import (
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
from .random import as_generator, realization_rng
from .runner import ExperimentConfig, ExperimentResult, figure_command, run_experiment, run_eta_sweep
from .sampling import (
    PointPattern,
    RadialSample,
    sample_ginibre_radii,
    sample_ppp,
    sample_square_lattice,
)
from .tessellation import (
    Cell,
    Tessellation,
    boundary_distance,
    build_voronoi,
    cells_to_csv,
    locate_cell,
    nucleus_nn_distances,
)
from .user_models import (
    UserAssignment,
    assignment_to_csv,
    interferers_at_bs,
    thin_users,
    type1_users,
    type2_users,
)
from .validation import ConfigurationError

__version__ = "0.1.0"
