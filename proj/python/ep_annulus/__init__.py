"""Steady axisymmetric Euler-Poisson flows in a concentric cylinder."""

from ._core import (
    BackgroundProfile,
    DeviationField,
    Grid2D,
    InletData,
    MachState,
    ProfileSpec,
    ResidualNorms,
    RunConfig,
    ScalarField2D,
    SolveReport,
    SolverError,
    background_equivalence,
    find_sonic_radius,
    integrate_background,
    load_config,
    mach_profile,
    parse_config,
    run_command,
    solve,
    swirl_equivalence,
    write_config,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundProfile",
    "DeviationField",
    "Grid2D",
    "InletData",
    "MachState",
    "ProfileSpec",
    "ResidualNorms",
    "RunConfig",
    "ScalarField2D",
    "SolveReport",
    "SolverError",
    "background_equivalence",
    "find_sonic_radius",
    "integrate_background",
    "load_config",
    "mach_profile",
    "parse_config",
    "run_command",
    "solve",
    "swirl_equivalence",
    "write_config",
    "__version__",
]
