from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from groovesolve.acceptance import converged
from groovesolve.fixed_point import SolveConfig, cached_operator, solve_spacetime, source
from groovesolve.fixed_point.spacetime import (SpaceTimeDuhamel, _interp_uniform, cardinal,
                                               convolution_coefficients, convolve_odd,
                                               iterate_spacetime, time_nodes)
from groovesolve.linear_solver import u1_profile


def test_cardinal_function():
    assert np.allclose(cardinal(np.arange(-4, 5)), [0, 0, 0, 0, 1, 0, 0, 0, 0], atol=1e-15)
    s = np.linspace(-0.49, 0.49, 11)
    total = sum(cardinal(s - d) for d in range(-4, 5))
    assert np.allclose(total, 1.0, atol=1e-14)


@pytest.mark.parametrize("delta", [0.02, 0.5, 2.0])
def test_convolution_coefficients_against_quad(bank, delta):
    h = 0.1
    c = convolution_coefficients(delta, h, (1, 3), bank)
    D = (c.shape[1] - 1) // 2
    for k_row, k in enumerate((1, 3)):
        for d in (0, 1, -2, 5):
            lo, hi = (d * h - 3 * h) / delta, (d * h + 3 * h) / delta
            lo, hi = max(lo, -44.0), min(hi, 44.0)
            brk = [(d * h - j * h) / delta for j in range(-3, 4)]
            f = lambda r: float(bank.eval(k, np.array([r]))[0]) * float(cardinal(np.array([(d * h - delta * r) / h]))[0])
            ref = integrate.quad(f, lo, hi, points=[b for b in brk if lo < b < hi], limit=400,
                                 epsabs=1e-13)[0]
            assert abs(c[k_row, d + D] - ref) <= 1e-9


def test_convolve_odd_constant_is_zero():
    c = np.random.default_rng(0).normal(size=(2, 21))
    out = convolve_odd(np.full(50, 3.0), c)
    assert np.max(np.abs(out)) <= 1e-12


def test_zero_angle_gives_zero_field():
    res = solve_spacetime(SolveConfig(beta=0.0, mode="spacetime", n_y=64))
    assert res.iterations == 0 and res.collapse_error == 0.0
    assert np.all(res.field.derivs == 0.0)


def test_linear_only_matches_similarity_form():
    cfg = SolveConfig.from_tan_beta(0.05, mode="spacetime", n_y=101, n_t=6)
    run = iterate_spacetime(cfg, linear_only=True)
    for j, t in enumerate(run.field.t_nodes):
        y = run.field.x_nodes * t ** -0.25
        ref = 0.05 * t ** 0.25 * u1_profile(0, y)
        assert np.allclose(run.field.derivs[j, 0], ref, rtol=0, atol=1e-15)
    res = solve_spacetime(cfg, linear_only=True)
    assert res.collapse_error <= 1e-6      # 6-point interpolation on h = 0.12


def test_spacetime_duhamel_matches_profile_operator():
    # self-similar source H(x, t) = F(x t^(-1/4)) must reproduce the profile operator at t = 1
    res, _ = converged(0.05, 201)
    y = res.profile.y_nodes
    F = source(res.profile).F
    ref = cached_operator(12.0, 201).apply_all(F)
    x = np.linspace(0.0, 12.0, 201)
    t = time_nodes(1.0, 12)
    H = np.array([np.where(x * tm ** -0.25 <= 12.0,
                           _interp_uniform(F, y[1] - y[0], np.minimum(x * tm ** -0.25, 12.0)), F[-1])
                  for tm in t])
    got = SpaceTimeDuhamel.build(x, t, np.array([1.0]), 1.0).apply(H)[0]
    for k in range(4):
        assert np.max(np.abs(got[k] - ref[k])) <= 1e-3 * np.max(np.abs(ref[k]))
