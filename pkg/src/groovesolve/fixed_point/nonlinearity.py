"""The nonlinearity Xi = Phi1(w_x) w_xxx - Phi2(w_x) w_xx^2 and profile types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SlopeCapError(RuntimeError):
    """The iterate left the small-slope ball |W'| <= m."""


def phi1(p):
    """1 / (1 + p^2)^2 - 1."""
    p = np.asarray(p, dtype=float)
    q = 1.0 + p * p
    out = 1.0 / (q * q) - 1.0
    return float(out) if out.ndim == 0 else out


def phi2(p):
    """3 p / (1 + p^2)^3."""
    p = np.asarray(p, dtype=float)
    q = 1.0 + p * p
    out = 3.0 * p / (q * q * q)
    return float(out) if out.ndim == 0 else out


def phi_bounds(m: float) -> tuple[float, float]:
    """Sup bounds on |p| <= m: |Phi1| <= 4 m^2, |Phi2| <= 3 (1 + 5 m^2) m."""
    return 4.0 * m * m, 3.0 * (1.0 + 5.0 * m * m) * m


def phi_lipschitz(m: float) -> tuple[float, float]:
    """Lipschitz constants on |p| <= m: 4 m for Phi1, 3 (1 + 5 m^2) for Phi2."""
    return 4.0 * m, 3.0 * (1.0 + 5.0 * m * m)


@dataclass(frozen=True)
class Profile:
    """Self-similar iterate: W and its first three derivatives on a y grid."""

    y_nodes: np.ndarray
    W: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    B: float

    def __post_init__(self) -> None:
        n = np.asarray(self.y_nodes).size
        for name in ("W", "W1", "W2", "W3"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)
        if self.B != float(self.W2[0]) ** 2:
            raise ValueError("B must equal W2[0]**2")

    @classmethod
    def from_derivs(cls, y: np.ndarray, derivs: np.ndarray) -> "Profile":
        d = np.asarray(derivs, dtype=float)
        return cls(np.asarray(y, dtype=float), d[0], d[1], d[2], d[3], float(d[2, 0]) ** 2)

    @classmethod
    def zero(cls, y: np.ndarray) -> "Profile":
        return cls.from_derivs(y, np.zeros((4, np.size(y))))

    @property
    def derivs(self) -> np.ndarray:
        return np.vstack([self.W, self.W1, self.W2, self.W3])

    def max_slope(self) -> float:
        return float(np.max(np.abs(self.W1)))

    def derivative_mismatch(self) -> float:
        """max |dW/dy - W1| with a 4th-order difference (diagnostic only)."""
        W, h = self.W, self.y_nodes[1] - self.y_nodes[0]
        d = np.gradient(W, h, edge_order=2)
        d[2:-2] = (W[:-4] - 8 * W[1:-3] + 8 * W[3:-1] - W[4:]) / (12.0 * h)
        return float(np.max(np.abs(d - self.W1)))


@dataclass(frozen=True)
class SourceProfile:
    y_nodes: np.ndarray
    F: np.ndarray
    F0: float

    def bound(self, profile: Profile) -> float:
        """4 m^2 |W'''| + 3 (1 + 5 m^2) m |W''|^2 with m = max |W'|."""
        m = profile.max_slope()
        b1, b2 = phi_bounds(m)
        return b1 * float(np.max(np.abs(profile.W3))) + b2 * float(np.max(np.abs(profile.W2))) ** 2


def source(profile: Profile, slope_cap: float | None = None) -> SourceProfile:
    """Pointwise F = Phi1(W') W''' - Phi2(W') W''^2."""
    if slope_cap is not None and profile.max_slope() > slope_cap:
        raise SlopeCapError(
            f"max |W'| = {profile.max_slope():.3e} exceeds slope cap {slope_cap:.3e}")
    F = phi1(profile.W1) * profile.W3 - phi2(profile.W1) * profile.W2 ** 2
    F = np.asarray(F, dtype=float)
    return SourceProfile(profile.y_nodes, F, float(F[0]))


def flux_factor(p, second, third):
    """Xi written without the Phi split (used as an algebraic cross-check).

    The surface-diffusion flux derivative (1+p^2)^(-1/2) d/dx(w_xx (1+p^2)^(-3/2))
    equals w_xxx/(1+p^2)^2 - 3 p w_xx^2/(1+p^2)^3; subtracting the linear
    part w_xxx leaves Xi.
    """
    q = 1.0 + np.asarray(p, dtype=float) ** 2
    return third / q ** 2 - 3.0 * p * second ** 2 / q ** 3 - third
