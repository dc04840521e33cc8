"""Defect of the weak formulation for self-similar solutions.

For w = t^(1/4) W(x t^(-1/4)) with zero initial data the weak identity reads

    int_0^T <w, phi_t> dt + int_0^T <Q, phi_x> dt = 0,

where Q = (1+w_x^2)^(-1/2) d/dx(w_xx (1+w_x^2)^(-3/2)) = t^(-1/2) (W''' + F)(y).
Both space integrals are taken in the similarity variable y on the profile grid
and the time integral uses t = T theta^4, which removes the t^(-1/4) endpoint
singularity of the flux term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .._quad import gauss_legendre
from .config import ProfileResult
from .nonlinearity import flux_factor

Field = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """phi(x, t) with phi(., T) = 0, given through phi_t and phi_x."""

    name: str
    phi_t: Field
    phi_x: Field


def _gauss_in_time(T: float):
    def dt(x, t, T_):
        return np.exp(-x * x) * (-2.0 / T_) * (1.0 - t / T_)

    def dx(x, t, T_):
        return -2.0 * x * np.exp(-x * x) * (1.0 - t / T_) ** 2
    return TestFunction("gauss", dt, dx)


def _moment_quadratic():
    def dt(x, t, T_):
        return x * x * np.exp(-0.5 * x * x) * (-2.0 * t / T_ ** 2)

    def dx(x, t, T_):
        return (2.0 * x - x ** 3) * np.exp(-0.5 * x * x) * (1.0 - (t / T_) ** 2)
    return TestFunction("x2-gauss", dt, dx)


def _cosine_packet():
    def dt(x, t, T_):
        return np.cos(x) * np.exp(-0.25 * x * x) * (-3.0 / T_) * (1.0 - t / T_) ** 2

    def dx(x, t, T_):
        g = np.exp(-0.25 * x * x)
        return (-np.sin(x) - 0.5 * x * np.cos(x)) * g * (1.0 - t / T_) ** 3
    return TestFunction("cos-packet", dt, dx)


# phi_1 = e^{-x^2}(1-t/T)^2, phi_2 = x^2 e^{-x^2/2}(1-(t/T)^2),
# phi_3 = cos(x) e^{-x^2/4}(1-t/T)^3
TEST_FUNCTIONS: tuple[TestFunction, ...] = (
    _gauss_in_time(1.0), _moment_quadratic(), _cosine_packet())


@dataclass(frozen=True)
class WeakDefect:
    storage: float      # int <w, phi_t>
    flux: float         # int <Q, phi_x>

    @property
    def absolute(self) -> float:
        return abs(self.storage + self.flux)

    @property
    def scale(self) -> float:
        return max(abs(self.storage), abs(self.flux))

    @property
    def relative(self) -> float:
        s = self.scale
        return self.absolute / s if s > 0 else 0.0


def weak_terms(y: np.ndarray, W: np.ndarray, flux_profile: np.ndarray, phi: TestFunction,
               T: float = 1.0, n_theta: int = 48) -> WeakDefect:
    """The two space-time integrals of the weak identity for one test function."""
    theta, wt = gauss_legendre(n_theta)
    storage = flux = 0.0
    for th, w in zip(theta, wt):
        t = T * th ** 4
        jac = 4.0 * T * th ** 3 * w
        x = y * t ** 0.25
        storage += jac * t ** 0.5 * simpson(W * phi.phi_t(x, t, T), x=y)
        flux += jac * t ** -0.25 * simpson(flux_profile * phi.phi_x(x, t, T), x=y)
    return WeakDefect(float(storage), float(flux))


def profile_flux(result: ProfileResult) -> np.ndarray:
    """(W''' + Xi)(y), the flux profile evaluated directly from the curvature form."""
    p = result.profile
    return p.W3 + flux_factor(p.W1, p.W2, p.W3)


def weak_defect(result: ProfileResult, test_fn_id: int, n_theta: int = 48) -> WeakDefect:
    if test_fn_id not in range(len(TEST_FUNCTIONS)):
        raise ValueError(f"test_fn_id must be 0..{len(TEST_FUNCTIONS) - 1}")
    T = result.config.T if result.config is not None else 1.0
    p = result.profile
    return weak_terms(p.y_nodes, p.W, profile_flux(result), TEST_FUNCTIONS[test_fn_id], T, n_theta)


def weak_residual(result: ProfileResult, test_fn_id: int) -> float:
    """Absolute defect of the weak identity for built-in test function ``test_fn_id``."""
    return weak_defect(result, test_fn_id).absolute
