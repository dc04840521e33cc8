"""Gamma and Beta functions and the quartic Gaussian moment identity.

The moment identity

    integral_0^inf xi^p exp(-xi^4 sigma) d xi = Gamma((p+1)/4) sigma^(-(p+1)/4) / 4

is used throughout as the closed form behind boundary values of the linear
profiles. ``quartic_moment_quadrature`` is an independent check of it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._quad import adaptive_gl


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE_ORACLE = "quadrature_oracle"


@dataclass(frozen=True)
class SpecialValue:
    value: float
    method: Method

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"special value must be finite and positive, got {self.value}")


def gamma(p: float) -> float:
    """Gamma function for p > 0 (libm, relative error near machine precision)."""
    if not p > 0:
        raise ValueError(f"gamma requires p > 0, got {p}")
    return math.gamma(p)


def beta_fn(a: float, b: float) -> float:
    """Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    if not (a > 0 and b > 0):
        raise ValueError(f"beta_fn requires a, b > 0, got ({a}, {b})")
    # log form avoids overflow for large arguments
    if a + b > 100:
        return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    return math.gamma(a) * math.gamma(b) / math.gamma(a + b)


def quartic_moment(p: float, sigma: float) -> float:
    """Closed form of the quartic Gaussian moment of order p."""
    if not p > -1:
        raise ValueError(f"quartic_moment requires p > -1, got {p}")
    if not sigma > 0:
        raise ValueError(f"quartic_moment requires sigma > 0, got {sigma}")
    e = (p + 1.0) / 4.0
    return 0.25 * math.gamma(e) * sigma ** (-e)


def quartic_moment_special(p: float, sigma: float) -> SpecialValue:
    return SpecialValue(quartic_moment(p, sigma), Method.CLOSED_FORM)


def gamma_quadrature(p: float) -> float:
    """Gamma(p) by direct quadrature of eta^(p-1) e^(-eta).

    The substitution eta = u^4 on [0, 1] turns the endpoint factor into the
    smooth 4 u^(4p-1), which is bounded for p >= 1/4; the tail runs on [1, 60].
    """
    if not p > 0:
        raise ValueError(f"gamma_quadrature requires p > 0, got {p}")
    if p < 0.25:
        # recurrence keeps the substituted integrand bounded
        return gamma_quadrature(p + 1.0) / p
    head = adaptive_gl(lambda u: 4.0 * u ** (4.0 * p - 1.0) * np.exp(-u ** 4), 0.0, 1.0)
    tail = adaptive_gl(lambda x: x ** (p - 1.0) * np.exp(-x), 1.0, 60.0 + 2.0 * p)
    return head + tail


def quartic_moment_quadrature(p: float, sigma: float) -> float:
    """Direct adaptive quadrature of the quartic Gaussian moment.

    Rescaling xi = sigma^(-1/4) x moves the decay scale to O(1). Near 0 the
    factor x^p is removed with x = u^m, m >= 4 and m (p + 1) >= 1, which gives
    the bounded integrand m u^(m(p+1)-1) exp(-u^(4m)).
    """
    if not p > -1:
        raise ValueError(f"quartic_moment_quadrature requires p > -1, got {p}")
    if not sigma > 0:
        raise ValueError(f"quartic_moment_quadrature requires sigma > 0, got {sigma}")
    m = max(4, math.ceil(1.0 / (p + 1.0)))
    head = adaptive_gl(lambda u: m * u ** (m * (p + 1.0) - 1.0) * np.exp(-u ** (4 * m)), 0.0, 1.0)
    tail = adaptive_gl(lambda x: x ** p * np.exp(-x ** 4), 1.0, 8.0)
    return (head + tail) * sigma ** (-(p + 1.0) / 4.0)


def quartic_moment_oracle(p: float, sigma: float) -> SpecialValue:
    return SpecialValue(quartic_moment_quadrature(p, sigma), Method.QUADRATURE_ORACLE)
