from __future__ import annotations

import math

import numpy as np
import pytest

from groovesolve import kernel
from groovesolve.kernel import (KernelBank, fit_envelope, g_eval, k_eval, moment,
                                pde_residual, scaled_kernel)
from groovesolve.oracles import kernel_fourier

G0_ORIGIN = math.gamma(0.25) / (4 * math.pi)       # 0.2885168693...
G2_ORIGIN = -math.gamma(0.75) / (4 * math.pi)      # -0.0975155628...


def test_origin_values():
    assert scaled_kernel(0, 0.0) == pytest.approx(G0_ORIGIN, abs=1e-12)
    assert scaled_kernel(1, 0.0) == 0.0
    assert scaled_kernel(2, 0.0) == pytest.approx(G2_ORIGIN, abs=1e-12)
    assert g_eval(0, 0.0, 1.0) == pytest.approx(G0_ORIGIN, abs=1e-12)
    assert g_eval(0, 0.0, 16.0) == pytest.approx(G0_ORIGIN / 2, abs=1e-12)
    assert g_eval(3, 0.0, 1.0) == 0.0
    assert k_eval(0.0, 0.0, 1.0) == pytest.approx(2 * G0_ORIGIN, abs=1e-12)


@pytest.mark.parametrize("k", range(6))
def test_table_matches_fourier_quadrature(k):
    rng = np.random.default_rng(k)
    for r in np.concatenate(([0.0, 0.37, 5.0, 11.9], rng.uniform(0, 20, 8))):
        assert scaled_kernel(k, r) == pytest.approx(kernel_fourier(k, r), abs=1e-12)


@pytest.mark.parametrize("k", range(6))
def test_parity(k):
    r = np.linspace(0.0, 15.0, 301)
    assert np.array_equal(scaled_kernel(k, -r), (-1) ** k * scaled_kernel(k, r))


def test_zero_beyond_table(bank):
    assert scaled_kernel(0, bank.r_max + 1.0) == 0.0
    assert abs(bank.table[:6, -1]).max() < 1e-15


def test_order_checked():
    with pytest.raises(ValueError):
        scaled_kernel(6, 0.0)
    with pytest.raises(ValueError):
        g_eval(0, 0.0, 0.0)
    with pytest.raises(ValueError):
        k_eval(0.0, 0.0, -1.0)


def test_k_eval_symmetry():
    rng = np.random.default_rng(1)
    for x, y, t in rng.uniform(0.01, 5.0, size=(20, 3)):
        assert k_eval(x, y, t) == pytest.approx(k_eval(y, x, t), rel=1e-14)
    assert k_eval(1.0, 0.0, 1.0) == pytest.approx(2 * scaled_kernel(0, 1.0), rel=1e-14)


@pytest.mark.parametrize("k", range(1, 6))
def test_moment_zero(k):
    assert abs(moment(k)) <= 1e-10


@pytest.mark.parametrize("k", range(5))
def test_derivative_consistency(bank, k):
    # 6th-order central differences on the uniform table
    g, h = bank.table[k], bank.dr
    c = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
    i = np.arange(3, int(8.0 / h))
    d = sum(c[j] * g[i + j - 3] for j in range(7)) / h
    assert np.max(np.abs(d - bank.table[k + 1][i])) <= 1e-8


@pytest.mark.parametrize("lam", [2.0, 3.0])
@pytest.mark.parametrize("k", range(6))
def test_scaling(lam, k):
    for x, t in [(0.3, 0.5), (1.7, 2.0), (4.0, 1.3)]:
        lhs = g_eval(k, lam * x, lam ** 4 * t)
        rhs = lam ** (-(k + 1)) * g_eval(k, x, t)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("x,t", [(0.0, 1.0), (2.5, 0.5), (7.0, 3.0)])
def test_pde_residual(x, t):
    assert abs(pde_residual(x, t)) <= 1e-8 * t ** -1.25


@pytest.mark.parametrize("k", range(5))
@pytest.mark.parametrize("ell", [0, 1])
def test_envelope_dominates(bank, k, ell):
    c, nu = fit_envelope(k, ell)
    n = 4 * ell + k
    r = bank.r_nodes[bank.r_nodes <= 10.0]
    g = np.abs(bank.table[n][: r.size])
    assert nu >= 0.05
    assert np.all(g <= c * (1 + r ** (n / 3)) * np.exp(-nu * r ** (4 / 3)) * (1 + 1e-12))


def test_envelope_on_zero_tail(bank):
    # beyond r_max every table value is zero, so any envelope dominates
    assert scaled_kernel(3, bank.r_max * 1.5) == 0.0


def test_cache_roundtrip_is_bit_identical(tmp_path, bank):
    path = tmp_path / "kernel.bin"
    bank.save(path)
    loaded = KernelBank.load(path)
    assert loaded.r_max == bank.r_max
    assert np.array_equal(loaded.table, bank.table)
    r = np.linspace(-20, 20, 999)
    assert np.array_equal(loaded.eval_many((0, 3, 5), r), bank.eval_many((0, 3, 5), r))
    raw = path.read_bytes()
    assert raw[:4] == b"GKT1"


def test_cache_rejects_bad_magic(tmp_path, bank):
    path = tmp_path / "bad.bin"
    bank.save(path)
    data = bytearray(path.read_bytes())
    data[:4] = b"XXXX"
    path.write_bytes(bytes(data))
    with pytest.raises(ValueError):
        KernelBank.load(path)


def test_set_kernel_cache_creates_file(tmp_path):
    path = tmp_path / "cache.bin"
    try:
        kernel.set_kernel_cache(path)
        first = kernel.default_bank()
        assert path.exists()
        kernel.set_kernel_cache(path)
        second = kernel.default_bank()
        assert np.array_equal(first.table, second.table)
    finally:
        kernel.set_kernel_cache(None)
