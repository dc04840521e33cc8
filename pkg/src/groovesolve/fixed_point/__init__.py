"""Nonlinear fixed-point solver for the self-similar groove profile."""

from __future__ import annotations

from .config import ConfigError, ProfileResult, SmallnessError, SolveConfig
from .duhamel import DuhamelOperator, DuhamelSettings, cached_operator, duhamel
from .nonlinearity import (Profile, SlopeCapError, SourceProfile, flux_factor, phi1,
                           phi2, phi_bounds, phi_lipschitz, source)
from .solver import (contraction_probe, contraction_ratio, interpolation_constant,
                     linear_profile, picard_step, solve_profile, update_norm)
from .spacetime import solve_spacetime
from .weak import weak_residual

__all__ = [
    "ConfigError", "ProfileResult", "SmallnessError", "SolveConfig",
    "DuhamelOperator", "DuhamelSettings", "cached_operator", "duhamel",
    "Profile", "SlopeCapError", "SourceProfile", "flux_factor", "phi1", "phi2",
    "phi_bounds", "phi_lipschitz", "source",
    "contraction_probe", "contraction_ratio", "interpolation_constant", "linear_profile",
    "picard_step", "solve_profile", "update_norm", "solve_spacetime",
    "weak_residual",
]
