from __future__ import annotations

import math

import numpy as np
import pytest

from groovesolve import specfun
from groovesolve.specfun import (Method, SpecialValue, beta_fn, gamma, gamma_quadrature,
                                 quartic_moment, quartic_moment_oracle, quartic_moment_quadrature)


def test_gamma_known_values():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_quarter_against_quadrature():
    # reference from direct quadrature of eta^(-3/4) e^(-eta)
    assert gamma(0.25) == pytest.approx(gamma_quadrature(0.25), rel=1e-12)
    assert gamma(0.25) == pytest.approx(3.6256099082219083, rel=1e-13)


@pytest.mark.parametrize("p", [0.05, 0.25, 0.5, 0.75, 1.3, 2.0, 4.5, 7.0])
def test_gamma_matches_quadrature(p):
    assert gamma(p) == pytest.approx(gamma_quadrature(p), rel=1e-12)


@pytest.mark.parametrize("p", [0.0, -1.0, -0.5])
def test_gamma_domain(p):
    with pytest.raises(ValueError):
        gamma(p)


def test_beta_known_values():
    assert beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert beta_fn(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    ref = gamma_quadrature(0.5) * gamma_quadrature(0.75) / gamma_quadrature(1.25)
    assert beta_fn(0.5, 0.75) == pytest.approx(ref, rel=1e-12)
    assert beta_fn(0.5, 0.75) == pytest.approx(2.3963, abs=1e-4)


def test_beta_gamma_relation_random():
    rng = np.random.default_rng(3)
    for a, b in rng.uniform(1e-3, 5.0, size=(50, 2)):
        assert beta_fn(a, b) * gamma(a + b) == pytest.approx(gamma(a) * gamma(b), rel=1e-10)


def test_beta_large_arguments_use_log_form():
    val = beta_fn(80.0, 70.0)
    ref = math.exp(math.lgamma(80) + math.lgamma(70) - math.lgamma(150))
    assert val == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, -2.0)])
def test_beta_domain(a, b):
    with pytest.raises(ValueError):
        beta_fn(a, b)


def test_quartic_moment_examples():
    assert quartic_moment(0, 1) == pytest.approx(0.25 * gamma(0.25), rel=1e-15)
    assert quartic_moment(0, 1) == pytest.approx(0.90640248, abs=1e-8)
    assert quartic_moment(2, 1) == pytest.approx(0.30635417, abs=1e-8)
    # sigma = 16 scales by 16^(-1/4) = 1/2
    assert quartic_moment(0, 16) == pytest.approx(0.45320124, abs=1e-8)


@pytest.mark.parametrize("lam", [2.0, 16.0])
@pytest.mark.parametrize("p", [0.0, 1.5, 3.0])
def test_quartic_moment_scaling(lam, p):
    lhs = quartic_moment(p, lam * 0.7)
    rhs = lam ** (-(p + 1) / 4) * quartic_moment(p, 0.7)
    assert lhs == pytest.approx(rhs, rel=1e-14)


@pytest.mark.parametrize("p", [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.5, 6.0])
@pytest.mark.parametrize("sigma", [0.1, 1.0, 10.0])
def test_quartic_moment_closed_form_vs_quadrature(p, sigma):
    exact = quartic_moment(p, sigma)
    assert abs(quartic_moment_quadrature(p, sigma) - exact) <= 1e-10 * exact


@pytest.mark.parametrize("p,sigma", [(-1.0, 1.0), (0.0, 0.0), (1.0, -1.0)])
def test_quartic_moment_domain(p, sigma):
    with pytest.raises(ValueError):
        quartic_moment(p, sigma)
    with pytest.raises(ValueError):
        quartic_moment_quadrature(p, sigma)


def test_special_value_tags_and_invariants():
    assert specfun.quartic_moment_special(0, 1).method is Method.CLOSED_FORM
    assert quartic_moment_oracle(0, 1).method is Method.QUADRATURE_ORACLE
    with pytest.raises(ValueError):
        SpecialValue(-1.0, Method.CLOSED_FORM)
    with pytest.raises(ValueError):
        SpecialValue(math.inf, Method.CLOSED_FORM)
