"""Acceptance suite: fifteen numbered checks at fixed tolerances.

Each check returns a ``CriterionResult``; ``run_all`` prints one line per
check. Expensive solves are shared through a small cache.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, TextIO

import numpy as np


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.1f} s)"


@lru_cache(maxsize=8)
def converged(tan_beta: float, n_y: int = 400, L: float = 12.0):
    from .fixed_point import SolveConfig, solve_profile
    cfg = SolveConfig.from_tan_beta(tan_beta, gamma=0.5, L=L, n_y=n_y, tol=1e-8)
    t0 = time.perf_counter()
    result = solve_profile(cfg)
    return result, time.perf_counter() - t0


# -- criteria -------------------------------------------------------------------

def quartic_moment_identity() -> tuple[bool, str]:
    from .specfun import quartic_moment, quartic_moment_quadrature
    t0 = time.perf_counter()
    worst = 0.0
    for p in (0.0, 1.0, 2.0, 3.5):
        for sigma in (0.1, 1.0, 10.0):
            exact = quartic_moment(p, sigma)
            worst = max(worst, abs(quartic_moment_quadrature(p, sigma) - exact) / exact)
    elapsed = time.perf_counter() - t0
    return worst <= 1e-10 and elapsed < 1.0, f"max rel err {worst:.2e} (<= 1e-10), {elapsed:.3f} s (< 1 s)"


def kernel_pde_identity() -> tuple[bool, str]:
    from .kernel import default_bank, pde_residual
    default_bank()
    rng = np.random.default_rng(20240601)
    xs = rng.uniform(0.0, 10.0, 100)
    ts = rng.uniform(0.1, 4.0, 100)
    t0 = time.perf_counter()
    ratio = max(abs(pde_residual(float(x), float(t))) * t ** 1.25 for x, t in zip(xs, ts))
    elapsed = time.perf_counter() - t0
    return ratio <= 1e-8 and elapsed < 10.0, \
        f"max |G_t + G_xxxx| t^(5/4) = {ratio:.2e} (<= 1e-8), {elapsed:.2f} s (< 10 s)"


def kernel_envelope() -> tuple[bool, str]:
    from .kernel import EnvelopeFitError, fit_envelope
    worst = math.inf
    for k in range(5):
        for ell in (0, 1):
            try:
                _, nu = fit_envelope(k, ell, r_upper=10.0)
            except EnvelopeFitError:
                return False, f"no envelope for k={k}, l={ell}"
            worst = min(worst, nu)
    return worst >= 0.05, f"smallest fitted nu = {worst:.3f} (>= 0.05)"


def boundary_limits() -> tuple[bool, str]:
    from .linear_solver import u1_profile, u2_profile
    from .specfun import beta_fn, gamma
    checks = [
        ("U1(0)", abs(u1_profile(0, 0.0) + 2.0 / math.pi * gamma(0.75)), 1e-8),
        ("U1'(0)", abs(u1_profile(1, 0.0) - 1.0), 1e-6),
        ("U1'''(0)", abs(u1_profile(3, 0.0)), 1e-6),
        ("U2'(0)", abs(u2_profile(1, 0.0)), 1e-6),
        ("U2'''(0)", abs(u2_profile(3, 0.0) - 1.0), 1e-5),
        ("U2(0)", abs(u2_profile(0, 0.0) - gamma(0.25) / (2 * math.pi) * beta_fn(0.5, 0.75)), 1e-6),
    ]
    ok = all(err <= tol for _, err, tol in checks)
    return ok, ", ".join(f"{name} err {err:.1e}" for name, err, _ in checks)


def second_derivative_identity() -> tuple[bool, str]:
    from .kernel import scaled_kernel
    from .linear_solver import u1_profile
    y = np.linspace(0.0, 10.0, 1001)
    err = float(np.max(np.abs(u1_profile(2, y) + 2.0 * scaled_kernel(0, y))))
    return err <= 1e-10, f"max |U1'' + 2 g0| = {err:.2e} (<= 1e-10)"


def fixed_point_convergence() -> tuple[bool, str]:
    res, seconds = converged(0.05)
    hist = res.contraction_history
    ok = res.converged and res.iterations <= 20 and bool(np.all(hist <= 0.5)) and seconds <= 300
    ratios = ", ".join(f"{v:.3g}" for v in hist)
    return ok, f"{res.iterations} iterations, ratios [{ratios}], {seconds:.1f} s"


def converged_residuals() -> tuple[bool, str]:
    from .linear_solver import c_beta_from_tan
    res, _ = converged(0.05)
    p = res.profile
    angle = abs(p.W1[0] - 0.05)
    noflux = abs(p.W3[0] - c_beta_from_tan(0.05) * p.W2[0] ** 2)
    bound = 1e-4 * max(1.0, p.W2[0] ** 2)
    return angle <= 1e-6 and noflux <= bound, f"angle {angle:.1e} (<= 1e-6), no-flux {noflux:.1e} (<= {bound:.0e})"


def depth_bound() -> tuple[bool, str]:
    parts, ok = [], True
    for tb in (0.01, 0.02, 0.05):
        res, _ = converged(tb)
        bound = -(tb / math.pi) * math.gamma(0.75)
        w0 = float(res.profile.W[0])
        ok &= res.converged and w0 <= bound
        parts.append(f"tan={tb}: W(0)={w0:.6f} <= {bound:.6f}")
    return ok, "; ".join(parts)


def linearization() -> tuple[bool, str]:
    from .linear_solver import u1_profile
    res, _ = converged(1e-3)
    y = res.profile.y_nodes
    u1 = u1_profile(0, y)
    dev = float(np.max(np.abs(res.profile.W / 1e-3 - u1)) / np.max(np.abs(u1)))
    return res.converged and dev <= 1e-2, f"sup-relative deviation {dev:.2e} (<= 1e-2)"


def contraction_scaling() -> tuple[bool, str]:
    from .fixed_point import SolveConfig, contraction_probe
    med = {}
    for tb in (0.02, 0.04):
        med[tb] = float(np.median(contraction_probe(SolveConfig.from_tan_beta(tb), 20, seed=7)))
    q = med[0.04] / med[0.02]
    return 1.5 <= q <= 2.5, \
        f"median ratios {med[0.02]:.3e} / {med[0.04]:.3e}, quotient {q:.3f} (in [1.5, 2.5])"


def self_similar_collapse() -> tuple[bool, str]:
    from .fixed_point import SolveConfig, solve_spacetime
    cfg = SolveConfig.from_tan_beta(0.05, mode="spacetime", T=1.0, n_y=201, n_t=12)
    res = solve_spacetime(cfg)
    return res.converged and res.collapse_error <= 1e-3, \
        f"collapse error {res.collapse_error:.2e} (<= 1e-3), {res.iterations} iterations"


def duhamel_oracle() -> tuple[bool, str]:
    from .fixed_point.duhamel import cached_operator
    from .oracles import gauss_source_duhamel
    op = cached_operator(12.0, 400)
    F = np.exp(-op.y_nodes ** 2) - 1.0
    got = float(op.apply(F, 0)[0])
    ref = gauss_source_duhamel(0, 0.0)
    err = abs(got - ref)
    return err <= 1e-6, f"I0(0) = {got:.12f}, reference {ref:.12f}, diff {err:.1e} (<= 1e-6)"


def phi_inequalities() -> tuple[bool, str]:
    from .fixed_point.nonlinearity import phi1, phi2, phi_bounds, phi_lipschitz
    rng = np.random.default_rng(11)
    violations = 0
    for m in (0.1, 0.5, 1.0):
        p = rng.uniform(-m, m, 10_000)
        q = rng.uniform(-m, m, 10_000)
        b1, b2 = phi_bounds(m)
        l1, l2 = phi_lipschitz(m)
        violations += int(np.sum(np.abs(phi1(p)) > b1)) + int(np.sum(np.abs(phi2(p)) > b2))
        violations += int(np.sum(np.abs(phi1(p) - phi1(q)) > l1 * np.abs(p - q)))
        violations += int(np.sum(np.abs(phi2(p) - phi2(q)) > l2 * np.abs(p - q)))
    return violations == 0, f"{violations} violations in 3 x 10^4 samples"


def weak_defect() -> tuple[bool, str]:
    from .fixed_point.weak import TEST_FUNCTIONS, weak_defect as defect
    res, _ = converged(0.05)
    rel = [defect(res, i).relative for i in range(len(TEST_FUNCTIONS))]
    return max(rel) <= 1e-4, "relative defects " + ", ".join(f"{v:.1e}" for v in rel) + " (<= 1e-4)"


def determinism() -> tuple[bool, str]:
    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for threads in ("1", "3"):
            out = Path(tmp) / f"threads{threads}"
            env = dict(os.environ, GROOVESOLVE_THREADS=threads)
            cmd = [sys.executable, "-m", "groovesolve.cli", "solve", "--tan-beta", "0.05",
                   "--gamma", "0.5", "--ny", "400", "--L", "12", "--tol", "1e-8", "--out", str(out)]
            proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
            if proc.returncode != 0:
                return False, f"solve exited {proc.returncode}: {proc.stderr.strip()[-200:]}"
            outputs.append((out / "profile.csv").read_bytes())
    same = outputs[0] == outputs[1]
    from . import _backend
    return same, f"profile.csv {'identical' if same else 'differs'} for 1 vs 3 threads ({_backend.NAME} backend)"


CRITERIA: tuple[tuple[int, str, Callable[[], tuple[bool, str]]], ...] = (
    (1, "quartic moment identity", quartic_moment_identity),
    (2, "kernel PDE identity", kernel_pde_identity),
    (3, "kernel envelope", kernel_envelope),
    (4, "boundary limits", boundary_limits),
    (5, "U1'' = -2 g0", second_derivative_identity),
    (6, "fixed-point convergence", fixed_point_convergence),
    (7, "converged boundary residuals", converged_residuals),
    (8, "groove depth bound", depth_bound),
    (9, "linearization consistency", linearization),
    (10, "contraction scaling", contraction_scaling),
    (11, "self-similar collapse", self_similar_collapse),
    (12, "Duhamel vs 2-D quadrature", duhamel_oracle),
    (13, "Phi bounds and Lipschitz", phi_inequalities),
    (14, "weak-form defect", weak_defect),
    (15, "thread-count determinism", determinism),
)


def run_criterion(number: int) -> CriterionResult:
    for num, title, check in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                passed, detail = check()
            except Exception as exc:  # a crash is a failure with its message
                passed, detail = False, f"error: {type(exc).__name__}: {exc}"
            return CriterionResult(num, title, bool(passed), detail, time.perf_counter() - t0)
    raise ValueError(f"no criterion {number}")


def run_all(only: list[int] | None = None, stream: TextIO | None = None) -> list[CriterionResult]:
    out = []
    for num, _, _ in CRITERIA:
        if only and num not in only:
            continue
        result = run_criterion(num)
        out.append(result)
        if stream is not None:
            print(result.line(), file=stream, flush=True)
    if stream is not None:
        n_pass = sum(r.passed for r in out)
        print(f"{n_pass}/{len(out)} criteria passed", file=stream)
    return out
