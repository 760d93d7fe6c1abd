"""Simulation and verification toolkit for random covering sets on the torus.

The covering process drops balls with prescribed diameters l_n at independent
uniform centers; the limsup set of the inflated balls is the random covering
set.  This package computes the analytic exponents of a diameter sequence,
realizes the process reproducibly from 64-bit seeds, and runs Monte Carlo
experiments that check the closed-form bounds (moments, coincidence,
covering, the hitting dichotomy, avoidance and intersection schedules)
against observed frequencies.

Hot loops run in a small compiled extension when it built, with a pure numpy
fallback producing bit-identical results; ``kernel_backend()`` names the one
in use.
"""

from ._kernels import BACKEND_NAME, available_backends
from .covering import (
    CoveringRealization,
    GridSet,
    StageWindow,
    ball_at,
    centers,
    count_window_centers_in_cube,
    diameter_band_window,
    first_hit_indices,
    realize,
    stage_gridset,
)
from .estimators import (
    LocalDimensionProfile,
    SlopeFit,
    binomial_standard_error,
    box_dimension_fit,
    fit_log2_counts,
    local_dimension_profile,
    wilson_interval,
)
from .experiments import (
    CheckResult,
    ExperimentReport,
    IntersectionStage,
    avoidance_experiment,
    build_report,
    census_regularity_experiment,
    derived_seed,
    dichotomy_experiment,
    exponent_crosscheck_experiment,
    hitting_theory,
    intersection_experiment,
    materialize_intersection_stage,
    monotone_toward,
    recompute_verdict,
    report_to_json,
    reports_to_csv,
    reports_to_json,
    verify_circle_cover_bound,
    verify_cube_coincidence_bound,
    verify_subcube_count_moments,
    window_miss_product,
)
from .geometry import DyadicCube, TorusBall, TorusPoint, torus_distance
from .lengths import (
    BlockConstantLengths,
    CensusDiagnosis,
    ExplicitLengths,
    PowerLawLengths,
    ScaleCensus,
    borel_cantelli_classify,
    critical_sum_exponent,
    diagnose_census_regularity,
    index_growth_exponent,
    scale_census,
    spec_from_dict,
    spec_to_dict,
)
from .targets import (
    AvoidanceSchedule,
    FullTorusTarget,
    InfeasibleScheduleError,
    IntersectionSchedule,
    IntervalFamily,
    ScheduledTarget,
    SelfSimilarCantorTarget,
    SinglePointTarget,
    analytic_dimensions,
    build_avoidance_schedule,
    build_intersection_schedule,
    family_from_text,
    family_to_gridset,
    family_to_text,
    interval_mass,
)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel backend ("compiled" or "python")."""
    return BACKEND_NAME


__all__ = [
    "AvoidanceSchedule",
    "BACKEND_NAME",
    "BlockConstantLengths",
    "CensusDiagnosis",
    "CheckResult",
    "CoveringRealization",
    "DyadicCube",
    "ExperimentReport",
    "ExplicitLengths",
    "FullTorusTarget",
    "GridSet",
    "InfeasibleScheduleError",
    "IntersectionSchedule",
    "IntersectionStage",
    "IntervalFamily",
    "LocalDimensionProfile",
    "PowerLawLengths",
    "ScaleCensus",
    "ScheduledTarget",
    "SelfSimilarCantorTarget",
    "SinglePointTarget",
    "SlopeFit",
    "StageWindow",
    "TorusBall",
    "TorusPoint",
    "analytic_dimensions",
    "available_backends",
    "avoidance_experiment",
    "ball_at",
    "binomial_standard_error",
    "borel_cantelli_classify",
    "box_dimension_fit",
    "build_avoidance_schedule",
    "build_intersection_schedule",
    "build_report",
    "census_regularity_experiment",
    "centers",
    "count_window_centers_in_cube",
    "critical_sum_exponent",
    "derived_seed",
    "diagnose_census_regularity",
    "diameter_band_window",
    "dichotomy_experiment",
    "exponent_crosscheck_experiment",
    "family_from_text",
    "family_to_gridset",
    "family_to_text",
    "first_hit_indices",
    "fit_log2_counts",
    "hitting_theory",
    "index_growth_exponent",
    "intersection_experiment",
    "interval_mass",
    "kernel_backend",
    "local_dimension_profile",
    "materialize_intersection_stage",
    "monotone_toward",
    "realize",
    "recompute_verdict",
    "report_to_json",
    "reports_to_csv",
    "reports_to_json",
    "scale_census",
    "spec_from_dict",
    "spec_to_dict",
    "stage_gridset",
    "torus_distance",
    "verify_circle_cover_bound",
    "verify_cube_coincidence_bound",
    "verify_subcube_count_moments",
    "wilson_interval",
    "window_miss_product",
    "__version__",
]
