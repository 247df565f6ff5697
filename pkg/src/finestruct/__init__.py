"""Fine structure of one-dimensional Coulomb point systems.

Multiprecision equilibrium solvers, finite-difference tables of arbitrary
order, exact generalized Stirling numbers, and numerical checks of the
asymptotic laws for the differences.
"""

from .analysis import (
    DifferenceTable,
    ScaleProfile,
    TheoremReport,
    Tolerances,
    difference_table,
    discretization_demo,
    epsilon_band_probe,
    gap_expansion_check,
    scale_profile,
    thm1_report,
    thm2_report,
    thm3_report,
)
from .equilibrium import (
    Configuration,
    ForceModel,
    SolverError,
    kkt_check,
    solve_newton,
    solve_shooting,
)
from .precision import PrecisionContext, agreed_digits, make_context

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "DifferenceTable",
    "ForceModel",
    "PrecisionContext",
    "ScaleProfile",
    "SolverError",
    "TheoremReport",
    "Tolerances",
    "agreed_digits",
    "difference_table",
    "discretization_demo",
    "epsilon_band_probe",
    "gap_expansion_check",
    "kkt_check",
    "make_context",
    "scale_profile",
    "solve_newton",
    "solve_shooting",
    "thm1_report",
    "thm2_report",
    "thm3_report",
]
