from __future__ import annotations

import numpy as np
import pytest

from groovesolve.fixed_point.duhamel import (DuhamelOperator, DuhamelSettings, cached_operator,
                                             duhamel, sigma_nodes)
from groovesolve.fixed_point.nonlinearity import SourceProfile
from groovesolve.oracles import gauss_source_duhamel


@pytest.fixture(scope="module")
def op():
    return cached_operator(12.0, 400)


def test_constant_source_gives_zero(op):
    for c in (0.0, 1.0, -3.5):
        out = op.apply_all(np.full(op.y_nodes.size, c))
        assert np.max(np.abs(out)) <= 1e-12 * max(1.0, abs(c))


@pytest.mark.parametrize("k,i", [(0, 0), (1, 17), (2, 66), (3, 33)])
def test_gaussian_source_against_2d_quadrature(op, k, i):
    F = np.exp(-op.y_nodes ** 2) - 1.0
    got = op.apply(F, k)[i]
    ref = gauss_source_duhamel(k, float(op.y_nodes[i]))
    assert abs(got - ref) <= 1e-6


def test_odd_orders_vanish_at_origin(op):
    rng = np.random.default_rng(8)
    y = op.y_nodes
    for _ in range(3):
        c, w = rng.uniform(0, 3), rng.uniform(0.5, 2)
        F = rng.normal() * np.exp(-((y - c) / w) ** 2) + rng.normal() * y * np.exp(-y)
        out = op.apply_all(F)
        assert abs(out[1, 0]) <= 1e-12 * np.max(np.abs(F))
        assert abs(out[3, 0]) <= 1e-12 * np.max(np.abs(F))


def test_duhamel_function(op):
    y = op.y_nodes
    src = SourceProfile(y, np.exp(-y ** 2) - 1.0, 0.0)
    assert np.array_equal(duhamel(src, 2, op), op.apply(src.F, 2))
    with pytest.raises(ValueError):
        duhamel(src, 4, op)


def test_sigma_rule_integrates_weights():
    # sum of weights approximates int_0^1 s^(-1/2) (1-s)^(-(k+1)/4) ds = B(1/2, (3-k)/4)
    from groovesolve.specfun import beta_fn
    nodes = sigma_nodes(DuhamelSettings())
    for k in range(3):
        total = sum(n.weight[k] for n in nodes)
        assert total == pytest.approx(beta_fn(0.5, (3 - k) / 4), rel=1e-6)


def test_build_rejects_nonuniform_grid():
    with pytest.raises(ValueError):
        DuhamelOperator.build(np.array([0.0, 0.1, 0.3, 0.6]))
