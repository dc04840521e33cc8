"""Solver configuration and result containers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..norms import NormReport, SpaceTimeField
from .nonlinearity import Profile

MODES = ("profile", "spacetime")


class ConfigError(ValueError):
    pass


class SmallnessError(RuntimeError):
    """tan(beta) is above the configured smallness threshold."""


@dataclass(frozen=True)
class SolveConfig:
    beta: float
    gamma: float = 0.5
    L: float = 12.0
    n_y: int = 400
    tol: float = 1e-8
    max_iter: int = 50
    mode: str = "profile"
    T: float = 1.0
    n_t: int = 12
    M_cap: float = 1.0
    slope_cap_factor: float = 4.0
    smallness: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta < math.pi / 2:
            raise ConfigError(f"beta must lie in [0, pi/2), got {self.beta}")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not self.L >= 8.0:
            raise ConfigError(f"L must be at least 8, got {self.L}")
        if self.n_y < 16:
            raise ConfigError("n_y must be at least 16")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if self.n_t < 2:
            raise ConfigError("n_t must be at least 2")
        if not self.M_cap > 0:
            raise ConfigError("M_cap must be positive")

    @classmethod
    def from_tan_beta(cls, tan_beta: float, **kwargs) -> "SolveConfig":
        return cls(beta=math.atan(tan_beta), **kwargs)

    @property
    def tan_beta(self) -> float:
        return math.tan(self.beta)

    @property
    def slope_cap(self) -> float:
        return self.slope_cap_factor * self.tan_beta

    @property
    def y_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n_y)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class ProfileResult:
    profile: Profile
    iterations: int
    contraction_history: np.ndarray
    residual_bc_angle: float
    residual_noflux: float
    depth_coefficient: float
    collapse_error: float = math.nan
    weak_residuals: np.ndarray = field(default_factory=lambda: np.empty(0))
    converged: bool = False
    update_norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    norm_report: NormReport | None = None
    config: SolveConfig | None = None
    source_values: np.ndarray | None = None
    message: str = ""
    field: SpaceTimeField | None = None     # space-time mode only
