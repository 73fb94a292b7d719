"""Numerical laboratory for counting interior critical points of planar
elliptic Dirichlet problems on disks and annuli."""

__version__ = "0.1.0"

from .boundary import (
    BoundaryExtremaSummary,
    BoundaryProfile,
    ScenarioClass,
    classify_scenario,
    count_extrema,
)
from .critical import (
    CriticalPointRecord,
    CriticalPointReport,
    boundary_degree_total,
    extract_critical_points,
)
from .errors import (
    ConvergenceFailureError,
    CritcountError,
    DegenerateClassError,
    DegenerateProfileError,
    EllipticityFailureError,
    IntegrityError,
    LoopThroughZeroError,
    SizingError,
    SplitLevelsError,
)
from .harness import (
    DEGENERATE,
    HOLDS,
    VIOLATED,
    ScenarioSpec,
    VerdictReport,
    analyze_scenario,
    evaluate_relation,
    oracle_for,
    run_suite,
    select_relation,
    solve_scenario,
    sweep_parameter,
    verdict_exit_code,
)
from .levelset import (
    LevelComponent,
    LevelSetAnalysis,
    check_counting_identity,
    critical_clusters,
    level_components,
)
from .mesh import (
    MeshedDomain,
    build_annulus_mesh,
    build_disk_mesh,
    euler_characteristic,
)
from .oracle import (
    HarmonicRepresentation,
    OracleReport,
    annulus_harmonic,
    argument_principle_count,
    disk_harmonic,
    eval_harmonic,
    oracle_critical_points,
)
from .solver import (
    FluxFamily,
    SolveResult,
    boundary_values_from_profile,
    custom_flux_family,
    family_by_name,
    laplace_family,
    minimal_surface_family,
    solve_dirichlet,
)

__all__ = [
    "__version__",
    "BoundaryExtremaSummary",
    "BoundaryProfile",
    "ScenarioClass",
    "classify_scenario",
    "count_extrema",
    "CriticalPointRecord",
    "CriticalPointReport",
    "boundary_degree_total",
    "extract_critical_points",
    "ConvergenceFailureError",
    "CritcountError",
    "DegenerateClassError",
    "DegenerateProfileError",
    "EllipticityFailureError",
    "IntegrityError",
    "LoopThroughZeroError",
    "SizingError",
    "SplitLevelsError",
    "DEGENERATE",
    "HOLDS",
    "VIOLATED",
    "ScenarioSpec",
    "VerdictReport",
    "analyze_scenario",
    "evaluate_relation",
    "oracle_for",
    "run_suite",
    "select_relation",
    "solve_scenario",
    "sweep_parameter",
    "verdict_exit_code",
    "LevelComponent",
    "LevelSetAnalysis",
    "check_counting_identity",
    "critical_clusters",
    "level_components",
    "MeshedDomain",
    "build_annulus_mesh",
    "build_disk_mesh",
    "euler_characteristic",
    "HarmonicRepresentation",
    "OracleReport",
    "annulus_harmonic",
    "argument_principle_count",
    "disk_harmonic",
    "eval_harmonic",
    "oracle_critical_points",
    "FluxFamily",
    "SolveResult",
    "boundary_values_from_profile",
    "custom_flux_family",
    "family_by_name",
    "laplace_family",
    "minimal_surface_family",
    "solve_dirichlet",
]
