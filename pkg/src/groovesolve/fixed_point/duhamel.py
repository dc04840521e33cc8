"""Scaled Duhamel operator for self-similar sources.

For f(z, tau) = tau^(-1/2) F(z tau^(-1/4)) the k-th derivative of the Duhamel
term at t = 1 is

    I_k(y) = - int_0^1 s^(-1/2) (1-s)^(-(k+1)/4) J_k(y; s^(1/4), (1-s)^(1/4)) ds,
    J_k(y; a, e) = int_R g_{k+1}(r) [PF((y - e r)/a) - PF(y/a)] dr,

with PF the odd extension u -> sign(u) (F(|u|) - F(0)). The subtracted term
integrates to zero against g_{k+1}, which tempers the s -> 1 end.

J is evaluated in one of two equivalent forms per sigma node:

* wide kernel (e/a large): substitute u = (y - e r)/a and integrate over the
  data cells with Gauss-Legendre nodes; the constant continuation beyond L
  gives the closed-form tail (F_L - F_0) [g_k((y - aL)/e) + g_k((y + aL)/e)].
* narrow kernel: fixed r nodes on [-R, R] and interpolation of the data.

Everything is linear in F, so the operator is assembled once per grid as four
dense matrices and each Picard step costs four matrix-vector products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from .. import _backend
from .._quad import composite_rule
from ..kernel import KernelBank, default_bank

SPLIT = 2.0 ** -0.25     # s^(1/4) = (1-s)^(1/4) at s = 1/2


@dataclass(frozen=True)
class DuhamelSettings:
    """Discretization of the sigma and inner integrals."""

    q_panels: int = 6           # panels in s^(1/4) on (0, SPLIT]
    v_levels: int = 8           # geometric levels in (1-s)^(1/4) toward 0
    v_panels: int = 4           # uniform panels above the geometric part
    sigma_order: int = 8        # Gauss points per sigma panel
    cell_order: int = 3         # Gauss points per data cell (wide form)
    wide_cells: float = 6.0     # wide form when e/a >= wide_cells * h
    r_width: float = 0.5        # panel width in r (narrow form)
    r_order: int = 8
    r_extent: float = 44.0


@dataclass(frozen=True)
class SigmaNode:
    s4: float       # s^(1/4)
    e4: float       # (1-s)^(1/4)
    weight: np.ndarray   # per k: quadrature weight incl. the algebraic factors


def sigma_nodes(settings: DuhamelSettings) -> list[SigmaNode]:
    """Nodes for int_0^1 s^(-1/2)(1-s)^(-(k+1)/4) (.) ds.

    Near s = 0 use s = q^4 (weight 4 q (1-q^4)^(-(k+1)/4) dq); near s = 1 use
    1 - s = v^4 (weight 4 v^(2-k) (1-v^4)^(-1/2) dv), graded toward v = 0.
    """
    ks = np.arange(4)
    out: list[SigmaNode] = []
    q, wq = composite_rule(np.linspace(0.0, SPLIT, settings.q_panels + 1), settings.sigma_order)
    for qi, wi in zip(q, wq):
        e4 = (1.0 - qi ** 4) ** 0.25
        out.append(SigmaNode(qi, e4, 4.0 * qi * wi * (1.0 - qi ** 4) ** (-(ks + 1) / 4.0)))
    first = SPLIT * 0.5 ** settings.v_levels
    edges = np.concatenate(([0.0], first * 2.0 ** np.arange(settings.v_levels)))
    edges = np.concatenate((edges, np.linspace(SPLIT / 2.0, SPLIT, settings.v_panels + 1)))
    edges = np.unique(edges)
    v, wv = composite_rule(edges, settings.sigma_order)
    for vi, wi in zip(v, wv):
        s4 = (1.0 - vi ** 4) ** 0.25
        out.append(SigmaNode(s4, vi, 4.0 * wi * vi ** (2.0 - ks) / math.sqrt(1.0 - vi ** 4)))
    return out


def cell_nodes(h: float, n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    edges = h * np.arange(n)
    return composite_rule(edges, order)


def interpolation_matrix(u: np.ndarray, h: float, n: int) -> sparse.csr_matrix:
    """Sparse S with (S F)_q = F(u_q) - F_0 for u_q >= 0 (odd-stencil rows)."""
    idx, wts = _backend.odd_stencil(u, h, n)
    rows = np.repeat(np.arange(u.size), idx.shape[1])
    mat = sparse.coo_matrix((wts.ravel(), (rows, idx.ravel())), shape=(u.size, n))
    return mat.tocsr()


@dataclass
class DuhamelOperator:
    """Dense matrices M[k] with I_k = M[k] @ F on a uniform y grid."""

    y_nodes: np.ndarray
    matrices: np.ndarray       # shape (4, n, n)
    settings: DuhamelSettings

    @classmethod
    def build(cls, y_nodes, settings: DuhamelSettings | None = None,
              bank: KernelBank | None = None, nthreads: int | None = None) -> "DuhamelOperator":
        settings = settings or DuhamelSettings()
        bank = bank or default_bank()
        nthreads = _backend.thread_count() if nthreads is None else nthreads
        y = np.ascontiguousarray(y_nodes, dtype=float)
        n = y.size
        h = float(y[1] - y[0])
        if not np.allclose(np.diff(y), h, rtol=1e-12, atol=0.0) or y[0] != 0.0:
            raise ValueError("y_nodes must be a uniform grid starting at 0")
        length = float(y[-1])
        uq, wq = cell_nodes(h, n, settings.cell_order)
        abar = np.zeros((4, n, uq.size))
        tail = np.zeros((4, n))
        dense = np.zeros((4, n, n))
        r_nodes, r_w = composite_rule(
            np.arange(-settings.r_extent, settings.r_extent + 0.5 * settings.r_width,
                      settings.r_width), settings.r_order)
        g_r = bank.eval_many((1, 2, 3, 4), r_nodes)
        table = bank.table
        for node in sigma_nodes(settings):
            coef = np.ascontiguousarray(-node.weight)
            if node.e4 / node.s4 >= settings.wide_cells * h:
                _backend.uform_accumulate(table, bank.dr, y, uq, wq, node.s4, node.e4,
                                          length, coef, abar, tail, nthreads)
            else:
                gw = np.ascontiguousarray(coef[:, None] * g_r * r_w[None, :])
                _backend.rform_accumulate(y, h, n, node.s4, node.e4, r_nodes, gw,
                                          dense, nthreads)
        interp = interpolation_matrix(uq, h, n)
        for k in range(4):
            dense[k] += np.asarray((interp.T @ abar[k].T).T)
            dense[k, :, n - 1] += tail[k]
            dense[k, :, 0] -= tail[k]
        return cls(y, dense, settings)

    def apply(self, F: np.ndarray, k: int) -> np.ndarray:
        return self.matrices[k] @ np.asarray(F, dtype=float)

    def apply_all(self, F: np.ndarray) -> np.ndarray:
        return np.einsum("kij,j->ki", self.matrices, np.asarray(F, dtype=float))


@lru_cache(maxsize=4)
def cached_operator(length: float, n_y: int, settings: DuhamelSettings | None = None) -> DuhamelOperator:
    return DuhamelOperator.build(np.linspace(0.0, length, n_y), settings)


def duhamel(src, k: int, operator: DuhamelOperator | None = None) -> np.ndarray:
    """I_k on the source grid for a SourceProfile ``src``."""
    if k not in range(4):
        raise ValueError("k must be 0..3")
    y = np.asarray(src.y_nodes, dtype=float)
    op = operator or cached_operator(float(y[-1]), int(y.size))
    return op.apply(src.F, k)
