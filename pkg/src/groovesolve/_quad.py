"""Gauss-Legendre building blocks shared by the quadrature routines."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite n-point Gauss-Legendre rule over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x0, w0 = gauss_legendre(n)
    width = np.diff(edges)
    nodes = edges[:-1, None] + width[:, None] * x0[None, :]
    weights = width[:, None] * w0[None, :]
    return nodes.ravel(), weights.ravel()


def graded_edges(a: float, b: float, n_geometric: int, ratio: float = 0.25,
                 n_uniform: int = 1) -> np.ndarray:
    """Panel edges on [a, b] refined geometrically toward ``a``."""
    inner = a + (b - a) * ratio ** np.arange(n_geometric, 0, -1)
    uniform = np.linspace(a + (b - a) * ratio if n_geometric else a, b, n_uniform + 1)
    return np.concatenate(([a], inner, uniform[1:])) if n_geometric else uniform


def adaptive_gl(func, a: float, b: float, rtol: float = 1e-13, atol: float = 0.0,
                n: int = 20, max_depth: int = 40) -> float:
    """Adaptive bisection with an n-point versus 2n-point error estimate.

    ``func`` is called on numpy arrays. The result is a plain float.
    """
    xs, ws = gauss_legendre(n)
    x2, w2 = gauss_legendre(2 * n)

    def rule(lo: float, hi: float, x: np.ndarray, w: np.ndarray) -> float:
        return float((hi - lo) * np.dot(w, func(lo + (hi - lo) * x)))

    total = 0.0
    stack = [(a, b, 0)]
    coarse_total = rule(a, b, x2, w2)
    scale = abs(coarse_total)
    while stack:
        lo, hi, depth = stack.pop()
        coarse = rule(lo, hi, xs, ws)
        fine = rule(lo, hi, x2, w2)
        tol = max(atol, rtol * scale) * (hi - lo) / (b - a)
        if abs(fine - coarse) <= tol or depth >= max_depth:
            total += fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    return total
