"""Linear problem: the contact-angle part U1 and the boundary-trace part U2.

Self-similar forms at t = 1, with y = x t^(-1/4):

    U1(y)   = -(2/pi) Gamma(3/4) + y - (2/pi) int e^(-eta^4) (1 - cos(y eta)) / eta^2
    U1'(y)  = 1 - (2/pi) int e^(-eta^4) sin(y eta) / eta
    U1''(y) = -(2/pi) int e^(-eta^4) cos(y eta)          (= -2 g_0)
    U1'''(y)= (2/pi) int eta e^(-eta^4) sin(y eta)        (= -2 g_1)

and, for the unit trace b(tau) = tau^(-1/2),

    U2^(k)(y) = 2 int_0^1 s^(-1/2) (1-s)^(-(k+1)/4) g_k(y (1-s)^(-1/4)) ds,  k <= 2,
    U2'''(y)  = U1'(y) + 2 int_0^1 (s^(-1/2) - 1) (1-s)^(-1) g_3(y (1-s)^(-1/4)) ds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._quad import composite_rule, gauss_legendre
from .kernel import KernelBank, default_bank
from .specfun import beta_fn, gamma

ETA_MAX = 2.9
U1_ZERO = -(2.0 / math.pi) * gamma(0.75)
U2_ZERO = gamma(0.25) * beta_fn(0.5, 0.75) / (2.0 * math.pi)


def c_beta(beta: float) -> float:
    """Coefficient 3 tan(beta) / (1 + tan(beta)^2) of the boundary trace term."""
    if not 0.0 < beta < math.pi / 2:
        raise ValueError(f"beta must lie in (0, pi/2), got {beta}")
    tb = math.tan(beta)
    return 3.0 * tb / (1.0 + tb * tb)


def c_beta_from_tan(tan_beta: float) -> float:
    return 3.0 * tan_beta / (1.0 + tan_beta * tan_beta)


# -- U1 -----------------------------------------------------------------------

def _eta_rule(y_max: float) -> tuple[np.ndarray, np.ndarray]:
    width = math.pi / (4.0 * max(1.0, y_max))
    n_panels = int(math.ceil(ETA_MAX / width))
    return composite_rule(np.linspace(0.0, ETA_MAX, n_panels + 1), 16)


def u1_profile(k: int, y):
    """k-th derivative of the scaled contact-angle profile at y >= 0."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be 0..3, got {k}")
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ya < 0):
        raise ValueError("u1_profile requires y >= 0")
    eta, w = _eta_rule(float(ya.max(initial=0.0)))
    amp = w * np.exp(-eta ** 4) * (2.0 / math.pi)
    out = np.empty(ya.size)
    chunk = 256
    for start in range(0, ya.size, chunk):
        yy = ya[start:start + chunk, None]
        phase = yy * eta
        if k == 0:
            half = np.sin(0.5 * phase) / eta
            val = U1_ZERO + yy[:, 0] - (2.0 * half * half) @ amp
        elif k == 1:
            val = 1.0 - (np.sin(phase) / eta) @ amp
        elif k == 2:
            val = -(np.cos(phase) @ amp)
        else:
            val = np.sin(phase) @ (amp * eta)
        out[start:start + chunk] = val
    return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))


# -- sigma rule ---------------------------------------------------------------
#
# Integrals  int_a^b s^(-1/2) (1 - s)^(-c) phi(s) g(y (1 - s)^(-1/4)) ds  are
# split at s = 1/2 and at any interior breakpoints. Below 1/2 the substitution
# s = q^2 removes s^(-1/2); above 1/2 the variable is r = y (1 - s)^(-1/4)
# for y > 0 (the kernel's own argument, which keeps oscillations resolved) or
# v = (1 - s)^(1/4) for y = 0.

N_GL = 12
R_PANEL = 0.5


@dataclass(frozen=True)
class SigmaRule:
    sigma: np.ndarray     # node positions in (0, 1)
    weight: np.ndarray    # quadrature weight including s^(-1/2) (1-s)^(-c)
    arg: np.ndarray       # kernel argument y (1-s)^(-1/4)


def _q_segment(a: float, b: float, y: float, c: float):
    qa, qb = math.sqrt(a), math.sqrt(b)
    n_panels = max(1, int(math.ceil((qb - qa) / 0.1)))
    # the kernel argument spans y ((1-a)^(-1/4) .. (1-b)^(-1/4))
    span = y * ((1.0 - b) ** -0.25 - (1.0 - a) ** -0.25)
    n_panels = max(n_panels, int(math.ceil(span / R_PANEL)))
    q, w = composite_rule(np.linspace(qa, qb, n_panels + 1), N_GL)
    s = q * q
    return s, 2.0 * w * (1.0 - s) ** (-c), y * (1.0 - s) ** -0.25


def _v_segment(a: float, b: float, c: float, graded: bool):
    # 1 - s = v^4: ds = 4 v^3 dv, so s^(-1/2)(1-s)^(-c) ds = 4 v^(3-4c) s^(-1/2) dv
    va, vb = (1.0 - b) ** 0.25, (1.0 - a) ** 0.25
    if graded and va == 0.0:
        edges = np.concatenate(([0.0], vb * 0.5 ** np.arange(30, -1, -1)))
    else:
        edges = np.linspace(va, vb, 3)
    v, w = composite_rule(edges, N_GL)
    s = 1.0 - v ** 4
    return s, 4.0 * w * v ** (3.0 - 4.0 * c) / np.sqrt(s), v


def _r_segment(a: float, b: float, y: float, c: float, r_cut: float):
    # r = y (1-s)^(-1/4): ds = 4 y^4 r^(-5) dr, (1-s)^(-c) = (r/y)^(4c)
    ra = y * (1.0 - a) ** -0.25
    rb = r_cut if b >= 1.0 else y * (1.0 - b) ** -0.25
    rb = min(rb, r_cut)
    if rb <= ra:
        empty = np.empty(0)
        return empty, empty, empty
    edges = [ra]
    # geometric refinement where r^(4c-5) varies quickly (small y)
    while edges[-1] < min(2.0 * ra, rb) and edges[-1] < 1.0:
        edges.append(min(2.0 * edges[-1], rb))
    rest = np.linspace(edges[-1], rb, max(1, int(math.ceil((rb - edges[-1]) / R_PANEL))) + 1)
    r, w = composite_rule(np.concatenate((edges[:-1], rest)), N_GL)
    s = 1.0 - (y / r) ** 4
    weight = 4.0 * w * y ** (4.0 - 4.0 * c) * r ** (4.0 * c - 5.0) / np.sqrt(s)
    return s, weight, r


def sigma_rule(y: float, c: float, breaks=(), r_cut: float | None = None) -> SigmaRule:
    """Quadrature for s^(-1/2)(1-s)^(-c) ds on (0, 1) with kernel argument.

    ``breaks`` are extra panel boundaries (trace knots); the rule is exact for
    piecewise-smooth phi with kinks only there.
    """
    r_cut = default_bank().r_max if r_cut is None else r_cut
    pts = sorted({0.0, 0.5, 1.0, *[float(b) for b in breaks if 0.0 < b < 1.0]})
    parts = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= 0.5:
            parts.append(_q_segment(a, b, y, c))
        elif y > 0.0:
            parts.append(_r_segment(a, b, y, c, r_cut))
        else:
            parts.append(_v_segment(a, b, c, graded=(b >= 1.0)))
    s = np.concatenate([p[0] for p in parts])
    w = np.concatenate([p[1] for p in parts])
    arg = np.concatenate([p[2] for p in parts])
    if y == 0.0:
        arg = np.zeros_like(s)
    return SigmaRule(s, w, arg)


def _u2_exponent(k: int) -> float:
    return 1.0 if k == 3 else (k + 1) / 4.0


def u2_profile(k: int, y, bank: KernelBank | None = None):
    """k-th derivative of the scaled unit-trace profile at y >= 0."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be 0..3, got {k}")
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ya < 0):
        raise ValueError("u2_profile requires y >= 0")
    bank = bank or default_bank()
    out = np.empty(ya.size)
    c = _u2_exponent(k)
    for i, yi in enumerate(ya):
        rule = sigma_rule(float(yi), c)
        g = bank.eval(k, rule.arg)
        if k < 3:
            out[i] = 2.0 * np.dot(rule.weight, g)
        else:
            # s^(-1/2) (1-s)^(-1) (1 - s^(1/2)) = (s^(-1/2) - 1) (1-s)^(-1)
            phi = 1.0 - np.sqrt(rule.sigma)
            out[i] = 2.0 * np.dot(rule.weight * phi, g)
    if k == 3:
        out += u1_profile(1, ya)
    return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))


def u_linear(k: int, y, beta: float, B: float):
    """Linear profile tan(beta) U1^(k) + c_beta B U2^(k)."""
    if B < 0:
        raise ValueError("B must be non-negative")
    if beta == 0.0:
        return 0.0 * np.asarray(y, dtype=float) if np.ndim(y) else 0.0
    return math.tan(beta) * u1_profile(k, y) + c_beta(beta) * B * u2_profile(k, y)


@dataclass(frozen=True)
class LinearProfiles:
    """U1^(k), U2^(k) for k = 0..3 sampled on a y grid."""

    y_nodes: np.ndarray
    u1: np.ndarray   # shape (4, n)
    u2: np.ndarray   # shape (4, n)

    def __post_init__(self) -> None:
        n = self.y_nodes.size
        if self.u1.shape != (4, n) or self.u2.shape != (4, n):
            raise ValueError("profile arrays must have shape (4, len(y_nodes))")

    @classmethod
    def build(cls, y_nodes: np.ndarray, bank: KernelBank | None = None) -> "LinearProfiles":
        y = np.asarray(y_nodes, dtype=float)
        u1 = np.vstack([u1_profile(k, y) for k in range(4)])
        u2 = np.vstack([u2_profile(k, y, bank) for k in range(4)])
        return cls(y, u1, u2)

    def tail_magnitude(self) -> float:
        """Largest |value| at the last node over all arrays (decay diagnostic)."""
        return float(max(np.abs(self.u1[:, -1]).max(), np.abs(self.u2[:, -1]).max()))


@lru_cache(maxsize=8)
def linear_profiles(length: float, n_y: int) -> LinearProfiles:
    return LinearProfiles.build(np.linspace(0.0, length, n_y))


# -- general traces -------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryTrace:
    """Regularized trace h(t) = t^(1/2) b(t), piecewise linear in t.

    Below the first node h is held at its first value.
    """

    t_nodes: np.ndarray
    h_values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t_nodes, dtype=float)
        h = np.asarray(self.h_values, dtype=float)
        if t.ndim != 1 or t.shape != h.shape or t.size < 1:
            raise ValueError("t_nodes and h_values must be 1-D of equal length")
        if np.any(np.diff(t) <= 0) or t[0] <= 0:
            raise ValueError("t_nodes must be positive and strictly increasing")
        if not np.all(np.isfinite(h)):
            raise ValueError("h_values must be finite")
        if np.any(h < 0):
            raise ValueError("h_values must be non-negative (b is a square)")
        object.__setattr__(self, "t_nodes", t)
        object.__setattr__(self, "h_values", h)

    @classmethod
    def constant(cls, value: float, t_end: float) -> "BoundaryTrace":
        return cls(np.array([t_end]), np.array([value]))

    def h(self, t):
        return np.interp(t, self.t_nodes, self.h_values)

    def b(self, t):
        return self.h(t) / np.sqrt(t)


def _hat_matrix(t_nodes: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rows give the linear-interpolation weights of each knot at times t."""
    n = t_nodes.size
    out = np.zeros((np.size(t), n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        out[:, j] = np.interp(t, t_nodes, e)
    return out


def u2_general_operator(t_nodes: np.ndarray, k: int, x, t: float,
                        bank: KernelBank | None = None) -> np.ndarray:
    """Matrix A with d^k U2 / dx^k (x_i, t) = sum_m A[i, m] h_m.

    The trace enters linearly, so any trace on ``t_nodes`` is handled by one
    matrix-vector product.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be 0..3, got {k}")
    t_nodes = np.asarray(t_nodes, dtype=float)
    if not t > 0:
        raise ValueError("t must be positive")
    if t > t_nodes[-1] * (1.0 + 1e-12):
        raise ValueError(f"t = {t} exceeds the trace support (last node {t_nodes[-1]})")
    bank = bank or default_bank()
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise ValueError("x must be non-negative")
    y = xa * t ** -0.25
    breaks = t_nodes[t_nodes < t] / t
    c = _u2_exponent(k)
    h_at_t = _hat_matrix(t_nodes, np.array([t]))[0]
    out = np.empty((xa.size, t_nodes.size))
    for i, yi in enumerate(y):
        rule = sigma_rule(float(yi), c, breaks)
        g = bank.eval(k, rule.arg)
        hat = _hat_matrix(t_nodes, t * rule.sigma)
        if k < 3:
            out[i] = 2.0 * (rule.weight * g) @ hat
        else:
            # (s^(-1/2) h(t s) - h(t)) (1-s)^(-1) = s^(-1/2)(1-s)^(-1)(h(ts) - s^(1/2) h(t))
            wg = 2.0 * rule.weight * g
            out[i] = wg @ hat - np.dot(wg, np.sqrt(rule.sigma)) * h_at_t
    if k == 3:
        out += u1_profile(1, y)[:, None] * h_at_t[None, :]
    return out * t ** ((1.0 - k) / 4.0)


def u2_general(trace: BoundaryTrace, k: int, x, t: float, bank: KernelBank | None = None):
    """d^k U2 / dx^k at (x, t) for the piecewise-linear regularized trace."""
    val = u2_general_operator(trace.t_nodes, k, x, t, bank) @ trace.h_values
    return float(val[0]) if np.ndim(x) == 0 else val.reshape(np.shape(x))
