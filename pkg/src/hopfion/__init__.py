"""Exact toroidal hopfions of the O(3)^N sigma model with sum(alpha) = 3/4.

Builds the constant-q closed-form solutions and general-q tabulated profiles,
and cross-checks energies, Hopf charges and equations of motion by independent
numerical routes.
"""

from .ansatz import (
    ClosedFormProfile,
    HopfionSolution,
    IntegrationConstants,
    ModelSpec,
    ProfileError,
    SpecError,
    TabulatedProfile,
    boundary_constants,
    build_solution,
    eval_n,
    eval_u,
    general_profile,
    integration_constants,
    validate_spec,
)
from .dynamics import current_divergence, eom_residual, g_abs2, g_cross, g_linear
from .energetics import energy_closed, energy_grid, energy_profile, energy_reduced, energy_report
from .geometry import CartesianPoint, ToroidalPoint, to_cartesian, to_toroidal
from .kernels import BACKEND
from .topology import hopf_analytic, hopf_numeric, vk_bound, vk_ratio

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CartesianPoint",
    "ClosedFormProfile",
    "HopfionSolution",
    "IntegrationConstants",
    "ModelSpec",
    "ProfileError",
    "SpecError",
    "TabulatedProfile",
    "ToroidalPoint",
    "boundary_constants",
    "build_solution",
    "current_divergence",
    "energy_closed",
    "energy_grid",
    "energy_profile",
    "energy_reduced",
    "energy_report",
    "eom_residual",
    "eval_n",
    "eval_u",
    "g_abs2",
    "g_cross",
    "g_linear",
    "general_profile",
    "hopf_analytic",
    "hopf_numeric",
    "integration_constants",
    "to_cartesian",
    "to_toroidal",
    "validate_spec",
    "vk_bound",
    "vk_ratio",
]
