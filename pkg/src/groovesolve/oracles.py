"""Brute-force reference values that share no code with the solver.

They are slow and only meant for verification (tests and ``selftest``).
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special


def _quad(f, a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)[0]


def gauss_source_duhamel(k: int, y: float, epsabs: float = 1e-13) -> float:
    """I_k(y) for the source F(u) = exp(-u^2) - 1 by nested adaptive quadrature.

    The space integral is done in Fourier form. The odd extension of
    exp(-u^2) - 1 has sine transform involving Dawson's function, and the
    kernel derivative contributes eta^(k+1) exp(-eta^4 (1 - tau)). The
    tau^(-1/2) endpoint weight is handled by QUADPACK's algebraic weight.
    """
    phase = (k + 1) * math.pi / 2.0

    def inner(tau: float) -> float:
        s = tau ** 0.25
        rest = 1.0 - tau

        def f(eta: float) -> float:
            bracket = s * special.dawsn(0.5 * s * eta) - 1.0 / eta
            return eta ** (k + 1) * math.exp(-eta ** 4 * rest) * math.sin(y * eta + phase) * bracket

        top = min((40.0 / max(rest, 1e-300)) ** 0.25, 1e4)
        edges = np.linspace(1e-12, top, 64)
        return sum(integrate.quad(f, a, b, epsabs=epsabs / 64, epsrel=1e-13, limit=200)[0]
                   for a, b in zip(edges[:-1], edges[1:]))

    with warnings.catch_warnings():
        # roundoff notices at the requested 1e-13 level are expected
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(inner, 0.0, 1.0, weight="alg", wvar=(-0.5, 0.0),
                                epsabs=epsabs, epsrel=1e-12, limit=200)
    return -(2.0 / math.pi) * val


def kernel_fourier(k: int, r: float) -> float:
    """g_k(r) = (1/pi) int_0^inf eta^k exp(-eta^4) cos(r eta + k pi/2) d eta (QUADPACK)."""
    shift = k * math.pi / 2.0
    f = lambda eta: eta ** k * math.exp(-eta ** 4) * math.cos(r * eta + shift)
    return _quad(f, 0.0, 8.0) / math.pi


def u1_fourier(k: int, y: float) -> float:
    """k-th derivative of the contact-angle profile by direct quadrature in eta."""
    gamma34 = math.gamma(0.75)
    if k == 0:
        f = lambda eta: 2.0 * math.sin(0.5 * y * eta) ** 2 / eta ** 2 * math.exp(-eta ** 4)
        base, extra = -(2.0 / math.pi) * gamma34 + y, -(2.0 / math.pi)
    elif k == 1:
        f = lambda eta: math.sin(y * eta) / eta * math.exp(-eta ** 4)
        base, extra = 1.0, -(2.0 / math.pi)
    elif k == 2:
        f = lambda eta: math.cos(y * eta) * math.exp(-eta ** 4)
        base, extra = 0.0, -(2.0 / math.pi)
    else:
        f = lambda eta: eta * math.sin(y * eta) * math.exp(-eta ** 4)
        base, extra = 0.0, 2.0 / math.pi
    return base + extra * _quad(f, 0.0, 8.0)
