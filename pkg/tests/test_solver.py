from __future__ import annotations

import numpy as np
import pytest

from groovesolve.fixed_point import (ConfigError, SlopeCapError, SmallnessError, SolveConfig,
                                     contraction_probe, contraction_ratio, interpolation_constant,
                                     linear_profile, picard_step, solve_profile, update_norm)
from groovesolve.fixed_point.nonlinearity import Profile
from groovesolve.fixed_point.solver import sample_ball_pair
from groovesolve.linear_solver import c_beta_from_tan, linear_profiles


@pytest.fixture(scope="module")
def cfg():
    return SolveConfig.from_tan_beta(0.05)


def test_config_validation():
    for bad in (dict(beta=-0.1), dict(beta=2.0), dict(beta=0.1, gamma=1.0), dict(beta=0.1, tol=0.0),
                dict(beta=0.1, L=4.0), dict(beta=0.1, n_y=8), dict(beta=0.1, mode="both"),
                dict(beta=0.1, n_t=1), dict(beta=0.1, T=0.0)):
        with pytest.raises(ConfigError):
            SolveConfig(**bad)
    cfg = SolveConfig.from_tan_beta(0.05, n_y=123)
    assert cfg.tan_beta == pytest.approx(0.05, rel=1e-15)
    assert cfg.y_nodes.size == 123 and cfg.y_nodes[-1] == cfg.L
    assert set(cfg.as_dict()) == set(SolveConfig.field_names())


def test_step_from_zero_is_linear_profile(cfg):
    zero = Profile.zero(cfg.y_nodes)
    lin = linear_profiles(cfg.L, cfg.n_y)
    assert np.array_equal(picard_step(zero, cfg).derivs, 0.05 * lin.u1)
    assert np.array_equal(linear_profile(cfg).derivs, 0.05 * lin.u1)


def test_zero_angle_maps_zero_to_zero():
    cfg = SolveConfig(beta=0.0)
    zero = Profile.zero(cfg.y_nodes)
    assert np.all(picard_step(zero, cfg).derivs == 0.0)
    res = solve_profile(cfg)
    assert res.iterations == 0 and res.converged and np.all(res.profile.W == 0.0)


def test_fixed_point_is_fixed(solved_005, cfg):
    res = solved_005
    assert res.converged
    again = picard_step(res.profile, cfg)
    assert update_norm(again, res.profile, cfg.gamma) < cfg.tol
    assert np.all(res.contraction_history < 1.0)


def test_every_output_meets_boundary_conditions(cfg):
    rng = np.random.default_rng(3)
    lin = linear_profiles(cfg.L, cfg.n_y)
    cb = c_beta_from_tan(0.05)
    for _ in range(4):
        w, _ = sample_ball_pair(cfg, rng, lin)
        out = picard_step(w, cfg, lin)
        assert abs(out.W1[0] - 0.05) <= 1e-12
        # no-flux uses the input curvature at the wall: W'''(0) = c_beta W''_in(0)^2
        assert abs(out.W3[0] - cb * w.W2[0] ** 2) <= 1e-10


def test_uniqueness_from_different_starts(solved_005, cfg):
    other = solve_profile(cfg, initial=Profile.zero(cfg.y_nodes), weak=False)
    assert other.converged
    assert update_norm(other.profile, solved_005.profile, cfg.gamma) < 10 * cfg.tol


def test_smallness_and_slope_cap():
    with pytest.raises(SmallnessError):
        solve_profile(SolveConfig.from_tan_beta(0.5))
    cfg = SolveConfig.from_tan_beta(0.05)
    y = cfg.y_nodes
    steep = Profile.from_derivs(y, np.vstack([y, np.ones_like(y), np.zeros_like(y), np.zeros_like(y)]))
    with pytest.raises(SlopeCapError):
        picard_step(steep, cfg)


def test_contraction_probe_below_one(cfg):
    ratios = contraction_probe(cfg, 6, seed=1)
    assert ratios.size == 6 and np.all(ratios < 1.0) and np.all(ratios > 0.0)
    w = linear_profile(cfg)
    assert contraction_ratio(w, w, cfg) is None


def test_probe_ratio_grows_with_angle():
    small = np.median(contraction_probe(SolveConfig.from_tan_beta(0.02), 6, seed=2))
    large = np.median(contraction_probe(SolveConfig.from_tan_beta(0.04), 6, seed=2))
    assert large > small


def test_interpolation_constant_finite(solved_005):
    c = interpolation_constant(solved_005.profile)
    assert np.isfinite(c) and c > 0.0
    assert interpolation_constant(Profile.zero(solved_005.profile.y_nodes)) == np.inf
