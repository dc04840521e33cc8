"""Space-time Picard iteration on a tensor (x, t) grid.

The mild formulation is solved without assuming self-similarity. With
tau = sigma t and x - z = delta r, delta = ((1 - sigma) t)^(1/4),

    d^k D / dx^k (x, t) = -t^((1-k)/4) int_0^1 sigma^(-1/2)(1-sigma)^(-(k+1)/4)
                          int g_{k+1}(r) [PH(x - delta r, sigma t) - PH(x, sigma t)] dr dsigma

where H(z, tau) = tau^(1/2) Xi(z, tau) and P is the odd extension. H is linear
in theta = (tau/T)^(1/4) between time nodes and held at its first value below
t_1. On the uniform x grid the inner integral is a discrete convolution whose
coefficients c_d = int g_{k+1}(r) l(d h - delta r) dr come from the 6-point
Lagrange cardinal function l, so each (t, sigma) pair costs one FFT
convolution per derivative order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import fftconvolve

from .._fallback import lagrange_weights
from .._quad import composite_rule
from ..kernel import KernelBank, default_bank
from ..linear_solver import c_beta_from_tan, u1_profile, u2_general_operator
from ..norms import SpaceTimeField, norm_report
from .config import ProfileResult, SmallnessError, SolveConfig
from .duhamel import DuhamelSettings, sigma_nodes
from .nonlinearity import Profile, SlopeCapError, phi1, phi2

R_EXTENT = 44.0
CELL_POINTS = 6
R_PANEL = 0.5
R_POINTS = 8
SPACETIME_SIGMA = DuhamelSettings(q_panels=3, v_levels=6, v_panels=2, sigma_order=6)


# -- convolution coefficients -------------------------------------------------

def cardinal(s: np.ndarray) -> np.ndarray:
    """6-point Lagrange cardinal function of node 0 at offsets s (grid units)."""
    s = np.asarray(s, dtype=float)
    c = np.floor(s).astype(np.intp)
    inside = (c >= -3) & (c <= 2)
    cc = np.clip(c, -3, 2)
    w = lagrange_weights(s - cc + 2.0)
    val = np.take_along_axis(w, (2 - cc)[..., None], axis=-1)[..., 0]
    return np.where(inside, val, 0.0)


def convolution_coefficients(delta: float, h: float, orders, bank: KernelBank) -> np.ndarray:
    """c[k, d + D] = int g_k(r) l(d h - delta r) dr for d = -D..D."""
    orders = tuple(orders)
    if delta >= h:
        # integrate over the support of l: z = d h - delta r in [-3h, 3h]
        D = int(math.ceil(R_EXTENT * delta / h)) + 3
        s, ws = composite_rule(np.arange(-3.0, 4.0), CELL_POINTS)
        d = np.arange(-D, D + 1)
        arg = (d[:, None] - s[None, :]) * (h / delta)
        g = bank.eval_many(orders, arg.ravel()).reshape(len(orders), d.size, s.size)
        return (h / delta) * g @ (ws * cardinal(s))
    # narrow kernel: r panels aligned with the breakpoints of l
    rho = h / delta
    D = int(math.ceil(R_EXTENT / rho)) + 3
    m = np.arange(-math.floor(R_EXTENT / rho), math.floor(R_EXTENT / rho) + 1)
    edges = np.unique(np.concatenate(([-R_EXTENT, R_EXTENT], rho * m)))
    pieces = np.maximum(1, np.ceil(np.diff(edges) / R_PANEL).astype(int))
    fine = np.concatenate([np.linspace(a, b, p + 1)[:-1]
                           for a, b, p in zip(edges[:-1], edges[1:], pieces)] + [[edges[-1]]])
    r, wr = composite_rule(fine, R_POINTS)
    d = np.arange(-D, D + 1)
    g = bank.eval_many(orders, r) * wr[None, :]
    ell = cardinal(d[:, None] - r[None, :] / rho)
    return g @ ell.T


def odd_extension(values: np.ndarray, pad: int) -> np.ndarray:
    """[P v] on nodes -(n-1)-pad .. (n-1)+pad, held constant beyond the data."""
    p = values - values[0]
    right = np.concatenate((p, np.full(pad, p[-1])))
    return np.concatenate((-right[:0:-1], right))


def convolve_odd(values: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """sum_d c_d ([P v](x_i - x_d) - [P v](x_i)) for each row of coeffs."""
    n = values.size
    D = (coeffs.shape[-1] - 1) // 2
    ext = odd_extension(values, D + 1)
    off = (n - 1) + D + 1
    out = np.empty((coeffs.shape[0], n))
    pv = ext[off:off + n]
    for k, c in enumerate(coeffs):
        full = fftconvolve(ext, c, mode="full")
        out[k] = full[off + D: off + D + n] - c.sum() * pv
    return out


# -- time discretization ------------------------------------------------------

def time_nodes(T: float, n_t: int) -> np.ndarray:
    return T * (np.arange(1, n_t + 1) / n_t) ** 4


def _blend(tau: float, T: float, n_t: int) -> tuple[int, int, float]:
    """Source indices (0-based into time_nodes) and weight of the upper one."""
    pos = n_t * (tau / T) ** 0.25
    m = int(math.floor(pos))
    if m < 1:
        return 0, 0, 0.0
    if m >= n_t:
        return n_t - 1, n_t - 1, 0.0
    return m - 1, m, pos - m


@dataclass
class SpaceTimeDuhamel:
    """Precomputed convolution data for the target times of one grid."""

    x_nodes: np.ndarray
    t_nodes: np.ndarray
    targets: np.ndarray
    T: float
    plan: list            # per target: list of (lo, hi, frac, weights (4,), coeffs (4, 2D+1))

    @classmethod
    def build(cls, x_nodes: np.ndarray, t_nodes: np.ndarray, targets: np.ndarray, T: float,
              settings: DuhamelSettings = SPACETIME_SIGMA,
              bank: KernelBank | None = None) -> "SpaceTimeDuhamel":
        bank = bank or default_bank()
        h = float(x_nodes[1] - x_nodes[0])
        nodes = sigma_nodes(settings)
        plan = []
        for t in targets:
            entries = []
            for node in nodes:
                sigma = node.s4 ** 4
                delta = t ** 0.25 * node.e4
                lo, hi, frac = _blend(sigma * t, T, t_nodes.size)
                coeffs = convolution_coefficients(delta, h, (1, 2, 3, 4), bank)
                entries.append((lo, hi, frac, -node.weight * t ** ((1.0 - np.arange(4)) / 4.0), coeffs))
            plan.append(entries)
        return cls(x_nodes, t_nodes, np.asarray(targets, dtype=float), T, plan)

    def apply(self, sources: np.ndarray) -> np.ndarray:
        """D[j, k, i] for the target times from H sampled on (t_nodes, x_nodes)."""
        out = np.zeros((self.targets.size, 4, self.x_nodes.size))
        for j, entries in enumerate(self.plan):
            for lo, hi, frac, weight, coeffs in entries:
                src = (1.0 - frac) * sources[lo] + frac * sources[hi] if frac else sources[lo]
                out[j] += weight[:, None] * convolve_odd(src, coeffs)
        return out


# -- iteration ----------------------------------------------------------------

def _source_field(derivs: np.ndarray, t_nodes: np.ndarray, slope_cap: float | None) -> np.ndarray:
    p, second, third = derivs[:, 1], derivs[:, 2], derivs[:, 3]
    if slope_cap is not None and np.max(np.abs(p)) > slope_cap:
        raise SlopeCapError(f"max |w_x| = {np.max(np.abs(p)):.3e} exceeds slope cap {slope_cap:.3e}")
    xi = phi1(p) * third - phi2(p) * second ** 2
    return np.sqrt(t_nodes)[:, None] * xi


def _linear_part(x: np.ndarray, times: np.ndarray, tan_beta: float) -> np.ndarray:
    out = np.empty((times.size, 4, x.size))
    for j, t in enumerate(times):
        y = x * t ** -0.25
        for k in range(4):
            out[j, k] = tan_beta * t ** ((1.0 - k) / 4.0) * u1_profile(k, y)
    return out


def _u2_operators(t_nodes: np.ndarray, x: np.ndarray, times: np.ndarray) -> np.ndarray:
    return np.array([[u2_general_operator(t_nodes, k, x, float(t)) for k in range(4)]
                     for t in times])           # (n_times, 4, n_x, n_t)


def _interp_uniform(values: np.ndarray, h: float, points: np.ndarray) -> np.ndarray:
    n = values.size
    pos = points / h
    cell = np.minimum(pos.astype(np.intp), n - 2)
    j0 = np.clip(cell - 2, 0, n - 6)
    w = lagrange_weights(pos - j0)
    return np.einsum("ij,ij->i", w, values[j0[:, None] + np.arange(6)])


def rescale_to_profile(x: np.ndarray, derivs_t: np.ndarray, t: float, y: np.ndarray) -> np.ndarray:
    """t^((k-1)/4) d^k w(y t^(1/4), t) on the profile grid, shape (4, n_y)."""
    pts = y * t ** 0.25
    if pts[-1] > x[-1] * (1.0 + 1e-12):
        raise ValueError("profile grid exceeds the spatial grid at this time")
    h = float(x[1] - x[0])
    return np.array([t ** ((k - 1.0) / 4.0) * _interp_uniform(derivs_t[k], h, pts)
                     for k in range(4)])


def collapse_error(x: np.ndarray, field_at: dict, profile: Profile) -> float:
    """max over times of sup_y |t^(-1/4) w(y t^(1/4), t) - W(y)| / |W|_inf."""
    scale = float(np.max(np.abs(profile.W)))
    if scale == 0.0:
        worst = max(float(np.max(np.abs(d[0]))) for d in field_at.values())
        return 0.0 if worst == 0.0 else math.inf
    err = 0.0
    for t, d in field_at.items():
        W_t = rescale_to_profile(x, d, t, profile.y_nodes)[0]
        err = max(err, float(np.max(np.abs(W_t - profile.W))))
    return err / scale


@dataclass
class SpaceTimeRun:
    field: SpaceTimeField
    extra: dict               # t -> (4, n_x) derivatives at the collapse times
    iterations: int
    update_norms: np.ndarray
    converged: bool


def iterate_spacetime(cfg: SolveConfig, n_x: int | None = None, linear_only: bool = False,
                      bank: KernelBank | None = None) -> SpaceTimeRun:
    """Picard iteration on x_i in [0, L T^(1/4)], t_j = T (j / n_t)^4."""
    n_x = n_x or cfg.n_y
    T = cfg.T
    x = np.linspace(0.0, cfg.L * T ** 0.25, n_x)
    t = time_nodes(T, cfg.n_t)
    extra_t = np.array([T / 4.0, T / 2.0, T])
    if cfg.beta == 0.0:
        zero = np.zeros((t.size, 4, n_x))
        return SpaceTimeRun(SpaceTimeField(t, x, zero),
                            {float(s): np.zeros((4, n_x)) for s in extra_t}, 0, np.empty(0), True)
    tb = cfg.tan_beta
    cb = c_beta_from_tan(tb)
    times = np.concatenate((t, extra_t))
    linear = _linear_part(x, times, tb)
    field = linear[:t.size].copy()
    norms: list[float] = []
    if linear_only:
        return SpaceTimeRun(SpaceTimeField(t, x, field),
                            {float(s): linear[t.size + i] for i, s in enumerate(extra_t)},
                            0, np.empty(0), True)
    bank = bank or default_bank()
    duh = SpaceTimeDuhamel.build(x, t, times, T, bank=bank)
    u2 = _u2_operators(t, x, times)
    converged = False
    full = linear
    for _ in range(cfg.max_iter):
        H = _source_field(field, t, cfg.slope_cap)
        trace = np.sqrt(t) * field[:, 2, 0] ** 2
        full = linear + cb * (u2 @ trace) + duh.apply(H)
        new = full[:t.size]
        diff = SpaceTimeField(t, x, new - field)
        norms.append(norm_report(diff, cfg.gamma, T).z_norm)
        field = new
        if norms[-1] < cfg.tol:
            converged = True
            break
    extra = {float(s): full[t.size + i] for i, s in enumerate(extra_t)}
    return SpaceTimeRun(SpaceTimeField(t, x, field), extra, len(norms), np.array(norms), converged)


def solve_spacetime(cfg: SolveConfig, n_x: int | None = None, linear_only: bool = False,
                    reference: ProfileResult | None = None) -> ProfileResult:
    """Space-time solve plus the collapse check against the profile solver.

    The returned profile is the space-time field rescaled at t = T.
    """
    from .solver import solve_profile

    if cfg.beta > 0.0 and cfg.tan_beta > cfg.smallness:
        raise SmallnessError(
            f"tan(beta) = {cfg.tan_beta:.4g} exceeds the smallness threshold {cfg.smallness}")
    prof_cfg = replace(cfg, mode="profile")
    if reference is None:
        if linear_only:
            from .solver import linear_profile
            ref_profile = linear_profile(prof_cfg) if cfg.beta else Profile.zero(cfg.y_nodes)
        else:
            ref_profile = solve_profile(prof_cfg, weak=False).profile
    else:
        ref_profile = reference.profile
    run = iterate_spacetime(cfg, n_x, linear_only)
    x = run.field.x_nodes
    at_T = Profile.from_derivs(cfg.y_nodes,
                               rescale_to_profile(x, run.extra[float(cfg.T)], cfg.T, cfg.y_nodes))
    tb = cfg.tan_beta
    upd = run.update_norms
    result = ProfileResult(
        at_T, run.iterations,
        upd[1:] / upd[:-1] if upd.size > 1 else np.empty(0),
        float(abs(at_T.W1[0] - tb)) if cfg.beta else 0.0,
        float(abs(at_T.W3[0] - c_beta_from_tan(tb) * at_T.W2[0] ** 2)) if cfg.beta else 0.0,
        float(-at_T.W[0]),
        collapse_error=collapse_error(x, run.extra, ref_profile),
        converged=run.converged, update_norms=upd, config=cfg,
        norm_report=norm_report(run.field, cfg.gamma, cfg.T),
        message="converged" if run.converged else "update norm above tol after max_iter",
        field=run.field)
    return result
