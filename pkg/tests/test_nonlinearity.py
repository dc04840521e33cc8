from __future__ import annotations

import numpy as np
import pytest

from groovesolve.fixed_point.nonlinearity import (Profile, SlopeCapError, flux_factor, phi1, phi2,
                                                  phi_bounds, phi_lipschitz, source)


def test_phi_examples():
    assert phi1(0.0) == 0.0 and phi2(0.0) == 0.0
    assert phi1(1.0) == pytest.approx(-0.75, abs=1e-16)
    assert phi2(1.0) == pytest.approx(0.375, abs=1e-16)


@pytest.mark.parametrize("m", [0.1, 0.5, 1.0])
def test_phi_bounds_and_lipschitz(m):
    rng = np.random.default_rng(int(10 * m))
    p = rng.uniform(-m, m, 10_000)
    q = rng.uniform(-m, m, 10_000)
    b1, b2 = phi_bounds(m)
    l1, l2 = phi_lipschitz(m)
    assert np.all(np.abs(phi1(p)) <= b1)
    assert np.all(np.abs(phi2(p)) <= b2)
    assert np.all(np.abs(phi1(p) - phi1(q)) <= l1 * np.abs(p - q))
    assert np.all(np.abs(phi2(p) - phi2(q)) <= l2 * np.abs(p - q))


def _profile(y, W, W1, W2, W3):
    return Profile(y, W, W1, W2, W3, float(W2[0]) ** 2)


def test_source_zero_and_constant_slope():
    y = np.linspace(0, 5, 20)
    assert np.all(source(Profile.zero(y)).F == 0.0)
    c, d = 0.3, -1.7
    prof = _profile(y, c * y, np.full(20, c), np.zeros(20), np.full(20, d))
    assert np.allclose(source(prof).F, phi1(c) * d, rtol=1e-15, atol=0)


def test_source_matches_unsplit_flux():
    rng = np.random.default_rng(4)
    y = np.linspace(0, 6, 200)
    a = rng.normal(size=4) * 0.2
    W = a[0] * np.sin(y) + a[1] * np.exp(-y ** 2) + a[2] * y * np.exp(-y)
    W1 = a[0] * np.cos(y) - 2 * a[1] * y * np.exp(-y ** 2) + a[2] * (1 - y) * np.exp(-y)
    W2 = -a[0] * np.sin(y) + a[1] * (4 * y ** 2 - 2) * np.exp(-y ** 2) + a[2] * (y - 2) * np.exp(-y)
    W3 = (-a[0] * np.cos(y) + a[1] * (12 * y - 8 * y ** 3) * np.exp(-y ** 2)
          + a[2] * (3 - y) * np.exp(-y))
    prof = _profile(y, W, W1, W2, W3)
    assert np.max(np.abs(source(prof).F - flux_factor(W1, W2, W3))) <= 1e-14


def test_source_bound_and_slope_cap():
    y = np.linspace(0, 3, 50)
    prof = _profile(y, 0.2 * np.sin(y), 0.2 * np.cos(y), -0.2 * np.sin(y), -0.2 * np.cos(y))
    src = source(prof)
    assert np.max(np.abs(src.F)) <= src.bound(prof)
    assert src.F0 == src.F[0]
    with pytest.raises(SlopeCapError):
        source(prof, slope_cap=0.1)


def test_profile_invariants():
    y = np.linspace(0, 1, 10)
    z = np.zeros(10)
    with pytest.raises(ValueError):
        Profile(y, z, z, z + 1.0, z, 0.5)
    with pytest.raises(ValueError):
        Profile(y, z + np.nan, z, z, z, 0.0)
    with pytest.raises(ValueError):
        Profile(y, z[:5], z, z, z, 0.0)
    p = Profile.from_derivs(y, np.vstack([z, z, z + 2.0, z]))
    assert p.B == 4.0
