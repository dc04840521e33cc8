from __future__ import annotations

import math

import numpy as np
import pytest

from groovesolve.kernel import scaled_kernel
from groovesolve.linear_solver import (U1_ZERO, U2_ZERO, BoundaryTrace, LinearProfiles, c_beta,
                                       c_beta_from_tan, linear_profiles, u1_profile, u2_general,
                                       u2_general_operator, u2_profile, u_linear)
from groovesolve.oracles import u1_fourier
from groovesolve.specfun import beta_fn, gamma


def test_c_beta_examples():
    assert c_beta(math.pi / 4) == pytest.approx(1.5, rel=1e-15)
    assert c_beta(0.1) == pytest.approx(0.29801, abs=1e-5)
    assert c_beta(1e-9) == pytest.approx(3e-9, rel=1e-9)
    assert c_beta_from_tan(math.tan(0.3)) == pytest.approx(c_beta(0.3), rel=1e-15)
    for b in (0.01, 0.5, 1.2):
        assert c_beta(b) < 3 * math.tan(b)


@pytest.mark.parametrize("beta", [0.0, -0.1, math.pi / 2, 2.0])
def test_c_beta_domain(beta):
    with pytest.raises(ValueError):
        c_beta(beta)


def test_u1_boundary_limits():
    assert u1_profile(0, 0.0) == pytest.approx(-0.7801245022, abs=1e-10)
    assert abs(u1_profile(0, 0.0) + 2 / math.pi * gamma(0.75)) <= 1e-8
    assert abs(u1_profile(1, 0.0) - 1.0) <= 1e-6
    assert abs(u1_profile(3, 0.0)) <= 1e-6


def test_u2_boundary_limits():
    closed = gamma(0.25) / (2 * math.pi) * beta_fn(0.5, 0.75)
    assert closed == pytest.approx(1.3827346781, abs=1e-10)
    assert abs(u2_profile(0, 0.0) - closed) <= 1e-6
    assert abs(u2_profile(1, 0.0)) <= 1e-6
    assert abs(u2_profile(3, 0.0) - 1.0) <= 1e-5


@pytest.mark.parametrize("k", range(4))
def test_u1_matches_direct_quadrature(k):
    for y in (0.0, 0.4, 1.5, 3.0, 7.5, 11.0):
        assert u1_profile(k, y) == pytest.approx(u1_fourier(k, y), abs=1e-11)


def test_u1_second_derivative_is_kernel():
    y = np.linspace(0.0, 10.0, 401)
    assert np.max(np.abs(u1_profile(2, y) + 2.0 * scaled_kernel(0, y))) <= 1e-10


def test_profile_bounds():
    y = np.linspace(0.0, 20.0, 201)
    assert np.all(np.abs(u1_profile(0, y)) <= 2 / math.pi * gamma(0.75) + 1e-12)
    assert np.all(np.abs(u2_profile(0, y)) <= U2_ZERO + 1e-10)


def _diff6(f, y, h=1e-2):
    c = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
    return sum(c[j] * f(y + (j - 3) * h) for j in range(7)) / h


@pytest.mark.parametrize("k", range(3))
def test_derivative_consistency(k):
    y = np.array([0.5, 1.3, 2.9, 5.0, 8.2])
    assert np.max(np.abs(_diff6(lambda s: u1_profile(k, s), y) - u1_profile(k + 1, y))) <= 1e-7
    assert np.max(np.abs(_diff6(lambda s: u2_profile(k, s), y) - u2_profile(k + 1, y))) <= 1e-7


def test_u_linear_examples():
    beta = 0.2
    tb, cb = math.tan(beta), c_beta(beta)
    for B in (0.0, 0.3, 2.0):
        assert u_linear(1, 0.0, beta, B) == pytest.approx(tb, abs=1e-12)
        assert u_linear(3, 0.0, beta, B) == pytest.approx(cb * B, abs=1e-6)
    y = np.linspace(0.0, 5.0, 11)
    for k in range(4):
        assert np.allclose(u_linear(k, y, beta, 0.0), tb * u1_profile(k, y), rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        u_linear(0, 0.0, beta, -1.0)


def test_linear_profiles_shapes_and_caching():
    lp = linear_profiles(12.0, 50)
    assert lp.u1.shape == lp.u2.shape == (4, 50)
    assert linear_profiles(12.0, 50) is lp
    with pytest.raises(ValueError):
        LinearProfiles(lp.y_nodes, lp.u1[:3], lp.u2)


def test_linear_profiles_decay_on_long_domain():
    # the 1e-10 far-field decay needs y of about 30; the default L = 12 leaves ~1e-3
    lp = LinearProfiles.build(np.linspace(0.0, 32.0, 33))
    assert lp.tail_magnitude() < 1e-10
    assert linear_profiles(12.0, 50).tail_magnitude() > 1e-10


def test_u2_general_self_similar_trace():
    trace = BoundaryTrace.constant(1.0, 16.0)
    assert u2_general(trace, 0, 0.0, 1.0) == pytest.approx(U2_ZERO, abs=1e-8)
    assert u2_general(trace, 0, 0.0, 16.0) == pytest.approx(2 * U2_ZERO, abs=1e-8)
    assert 2 * U2_ZERO == pytest.approx(2.7654693561, abs=1e-10)
    for k in range(4):
        for x in (0.0, 0.8, 2.0):
            t = 3.0
            expect = t ** ((1 - k) / 4) * u2_profile(k, x * t ** -0.25)
            assert u2_general(trace, k, x, t) == pytest.approx(expect, abs=1e-7)


def test_u2_general_zero_trace():
    trace = BoundaryTrace(np.array([0.5, 1.0]), np.zeros(2))
    for k in range(4):
        assert u2_general(trace, k, 0.7, 0.8) == 0.0


def test_u2_general_is_linear():
    rng = np.random.default_rng(5)
    t_nodes = np.array([0.1, 0.3, 0.6, 1.0])
    h1, h2 = rng.uniform(0, 1, 4), rng.uniform(0, 1, 4)
    a, b = 0.7, 1.9
    for k in range(4):
        A = u2_general_operator(t_nodes, k, np.array([0.0, 0.5, 1.5]), 0.9)
        lhs = A @ (a * h1 + b * h2)
        rhs = a * (A @ h1) + b * (A @ h2)
        assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-15)
        tr = BoundaryTrace(t_nodes, a * h1 + b * h2)
        assert np.allclose(u2_general(tr, k, np.array([0.0, 0.5, 1.5]), 0.9), lhs, atol=1e-14)


def test_u2_general_errors():
    trace = BoundaryTrace.constant(1.0, 1.0)
    with pytest.raises(ValueError):
        u2_general(trace, 0, 0.0, 2.0)
    with pytest.raises(ValueError):
        u2_general(trace, 4, 0.0, 0.5)
    with pytest.raises(ValueError):
        BoundaryTrace(np.array([0.5, 1.0]), np.array([1.0, -0.1]))
    with pytest.raises(ValueError):
        BoundaryTrace(np.array([1.0, 0.5]), np.array([1.0, 1.0]))
