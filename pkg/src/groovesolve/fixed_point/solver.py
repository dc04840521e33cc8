"""Picard iteration for the self-similar profile and the contraction probe."""

from __future__ import annotations

import math

import numpy as np

from ..linear_solver import LinearProfiles, c_beta_from_tan, linear_profiles
from ..norms import profile_norms
from .config import ProfileResult, SmallnessError, SolveConfig
from .duhamel import DuhamelOperator, cached_operator
from .nonlinearity import Profile, source


def _ingredients(cfg: SolveConfig, lin: LinearProfiles | None,
                 op: DuhamelOperator | None) -> tuple[LinearProfiles, DuhamelOperator]:
    lin = lin or linear_profiles(float(cfg.L), int(cfg.n_y))
    op = op or cached_operator(float(cfg.L), int(cfg.n_y))
    return lin, op


def linear_profile(cfg: SolveConfig, lin: LinearProfiles | None = None) -> Profile:
    """tan(beta) U1 on the configured grid (the initial iterate)."""
    lin = lin or linear_profiles(float(cfg.L), int(cfg.n_y))
    return Profile.from_derivs(lin.y_nodes, cfg.tan_beta * lin.u1)


def picard_step(profile: Profile, cfg: SolveConfig, lin: LinearProfiles | None = None,
                op: DuhamelOperator | None = None, nonlinear: bool = True) -> Profile:
    """One application of the solution map.

    New W^(k) = tan(beta) U1^(k) + c_beta B U2^(k) + I_k[F] with B and F taken
    from the input profile.
    """
    if cfg.beta == 0.0:
        return Profile.zero(profile.y_nodes)
    lin, op = _ingredients(cfg, lin, op)
    tb = cfg.tan_beta
    derivs = tb * lin.u1
    if nonlinear:
        src = source(profile, cfg.slope_cap)
        derivs = derivs + c_beta_from_tan(tb) * profile.B * lin.u2 + op.apply_all(src.F)
    return Profile.from_derivs(lin.y_nodes, derivs)


def update_norm(a: Profile, b: Profile, gamma: float) -> float:
    return profile_norms(a.y_nodes, a.derivs - b.derivs, gamma).z_norm


def _diagnostics(profile: Profile, cfg: SolveConfig) -> tuple[float, float, float]:
    tb = cfg.tan_beta
    angle = abs(profile.W1[0] - tb)
    noflux = abs(profile.W3[0] - c_beta_from_tan(tb) * profile.W2[0] ** 2)
    return float(angle), float(noflux), float(-profile.W[0])


def solve_profile(cfg: SolveConfig, initial: Profile | None = None,
                  lin: LinearProfiles | None = None, op: DuhamelOperator | None = None,
                  weak: bool = True) -> ProfileResult:
    """Iterate the solution map from tan(beta) U1 until the update is below tol."""
    y = cfg.y_nodes
    if cfg.beta == 0.0:
        zero = Profile.zero(y)
        return ProfileResult(zero, 0, np.empty(0), 0.0, 0.0, 0.0, converged=True,
                             weak_residuals=np.zeros(3), config=cfg,
                             norm_report=profile_norms(y, zero.derivs, cfg.gamma, cfg.T),
                             source_values=np.zeros(y.size), message="zero angle")
    if cfg.tan_beta > cfg.smallness:
        raise SmallnessError(
            f"tan(beta) = {cfg.tan_beta:.4g} exceeds the smallness threshold {cfg.smallness}")
    lin, op = _ingredients(cfg, lin, op)
    current = initial if initial is not None else linear_profile(cfg, lin)
    updates: list[float] = []
    converged = False
    for _ in range(cfg.max_iter):
        new = picard_step(current, cfg, lin, op)
        updates.append(update_norm(new, current, cfg.gamma))
        current = new
        if updates[-1] < cfg.tol:
            converged = True
            break
    upd = np.array(updates)
    history = upd[1:] / upd[:-1] if upd.size > 1 else np.empty(0)
    angle, noflux, depth = _diagnostics(current, cfg)
    result = ProfileResult(
        current, len(updates), history, angle, noflux, depth, converged=converged,
        update_norms=upd, config=cfg,
        norm_report=profile_norms(y, current.derivs, cfg.gamma, cfg.T),
        source_values=source(current).F,
        message="converged" if converged else "update norm above tol after max_iter")
    if weak:
        from .weak import weak_residual
        result.weak_residuals = np.array([weak_residual(result, i) for i in range(3)])
    return result


# -- contraction probe ----------------------------------------------------------

def _gaussian_bumps(y: np.ndarray, rng: np.random.Generator, n_bumps: int = 3) -> np.ndarray:
    """Random sum of Gaussian bumps with exact derivatives 0..3."""
    out = np.zeros((4, y.size))
    for _ in range(n_bumps):
        c = rng.uniform(0.0, 4.0)
        w = rng.uniform(0.5, 2.0)
        a = rng.normal()
        z = (y - c) / w
        g = np.exp(-0.5 * z * z)
        # derivatives of exp(-z^2/2) in y: Hermite polynomials He_k(z) (-1/w)^k
        he = (np.ones_like(z), z, z * z - 1.0, z ** 3 - 3.0 * z)
        for k in range(4):
            out[k] += a * (-1.0 / w) ** k * he[k] * g
    return out


def sample_ball_pair(cfg: SolveConfig, rng: np.random.Generator,
                     lin: LinearProfiles) -> tuple[Profile, Profile]:
    """Two profiles tan(beta) U1 + d with random bumps d, |d'| <= tan(beta).

    Pairs whose weighted norm exceeds M_cap are rescaled into the ball.
    """
    tb = cfg.tan_beta
    out = []
    for _ in range(2):
        d = _gaussian_bumps(lin.y_nodes, rng)
        d *= rng.uniform(0.1, 1.0) * tb / np.max(np.abs(d[1]))
        derivs = tb * lin.u1 + d
        z = profile_norms(lin.y_nodes, derivs, cfg.gamma).z_norm
        if z > cfg.M_cap:
            derivs *= cfg.M_cap / z
        out.append(Profile.from_derivs(lin.y_nodes, derivs))
    return out[0], out[1]


def contraction_ratio(w1: Profile, w2: Profile, cfg: SolveConfig,
                      lin: LinearProfiles | None = None,
                      op: DuhamelOperator | None = None) -> float | None:
    """|P(w1) - P(w2)|_Z / |w1 - w2|_Z, or None for an identical pair."""
    den = update_norm(w1, w2, cfg.gamma)
    if den == 0.0:
        return None
    lin, op = _ingredients(cfg, lin, op)
    return update_norm(picard_step(w1, cfg, lin, op), picard_step(w2, cfg, lin, op), cfg.gamma) / den


def contraction_probe(cfg: SolveConfig, n_pairs: int, seed: int = 0,
                      lin: LinearProfiles | None = None,
                      op: DuhamelOperator | None = None) -> np.ndarray:
    """Ratios |P(w1) - P(w2)|_Z / |w1 - w2|_Z over random pairs in the ball."""
    lin, op = _ingredients(cfg, lin, op)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n_pairs):
        w1, w2 = sample_ball_pair(cfg, rng, lin)
        ratio = contraction_ratio(w1, w2, cfg, lin, op)
        if ratio is not None:
            ratios.append(ratio)
    return np.array(ratios)


def interpolation_constant(profile: Profile) -> float:
    """c with |W''| = c |W'|^(1/2) |W'''|^(1/2) for the given profile."""
    num = float(np.max(np.abs(profile.W2)))
    den = math.sqrt(float(np.max(np.abs(profile.W1))) * float(np.max(np.abs(profile.W3))))
    return num / den if den > 0 else math.inf
