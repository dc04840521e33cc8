"""Pure numpy versions of the hot loops; reference semantics for ``_core``.

Every routine here has a twin in the compiled extension with the same
signature. Results agree to rounding; within one backend they are independent
of the thread count because rows are accumulated independently in a fixed
order.
"""

from __future__ import annotations

import numpy as np

STENCIL = 6


def _hermite_basis(t: np.ndarray):
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5
    h1 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    g0 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    g1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    k0 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
    k1 = 0.5 * (t3 - 2.0 * t4 + t5)
    return h0, h1, g0, g1, k0, k1


def eval_orders(table: np.ndarray, dr: float, orders, x) -> np.ndarray:
    """Evaluate g_k(x) for each k in ``orders`` from the node table.

    ``table[k, j]`` holds g_k(j dr); order k is interpolated with quintic
    Hermite data (g_k, g_{k+1}, g_{k+2}). Parity is applied for x < 0 and the
    result is zero beyond the last node.
    """
    x = np.asarray(x, dtype=float)
    orders = np.asarray(orders, dtype=np.intp)
    n_nodes = table.shape[1]
    r = np.abs(x).ravel()
    pos = r / dr
    inside = pos < (n_nodes - 1)
    cell = np.minimum(pos.astype(np.intp), n_nodes - 2)
    t = pos - cell
    basis = _hermite_basis(t)
    out = np.empty((orders.size, r.size))
    neg = x.ravel() < 0
    for row, k in enumerate(orders):
        f = table[k]
        d = table[k + 1]
        s = table[k + 2]
        val = (f[cell] * basis[0] + f[cell + 1] * basis[1]
               + dr * (d[cell] * basis[2] + d[cell + 1] * basis[3])
               + dr * dr * (s[cell] * basis[4] + s[cell + 1] * basis[5]))
        val = np.where(inside, val, 0.0)
        if k % 2:
            val = np.where(neg, -val, val)
        out[row] = val
    return out.reshape((orders.size,) + x.shape)


def lagrange_weights(t: np.ndarray) -> np.ndarray:
    """Weights of the 6-point Lagrange rule on nodes 0..5 at offsets ``t``."""
    t = np.asarray(t, dtype=float)
    w = np.ones(t.shape + (STENCIL,))
    for m in range(STENCIL):
        for l in range(STENCIL):
            if l != m:
                w[..., m] *= (t - l) / (m - l)
    return w


def odd_stencil(u: np.ndarray, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index/weight pairs representing the odd extension at points ``u``.

    The represented value is sign(u) (F(|u|) - F[0]) with F the 6-point
    interpolant of the grid data on [0, (n-1) h] and F held at F[n-1] beyond.
    Returns arrays of shape u.shape + (7,); column 6 carries the F[0] term.
    """
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    sgn = np.where(u < 0, -1.0, 1.0)
    sgn = np.where(u == 0, 0.0, sgn)
    pos = a / h
    beyond = pos >= (n - 1)
    cell = np.minimum(pos.astype(np.intp), n - 2)
    j0 = np.clip(cell - 2, 0, n - STENCIL)
    lw = lagrange_weights(pos - j0)
    idx = np.empty(u.shape + (STENCIL + 1,), dtype=np.intp)
    wts = np.empty(u.shape + (STENCIL + 1,))
    idx[..., :STENCIL] = j0[..., None] + np.arange(STENCIL)
    wts[..., :STENCIL] = lw * sgn[..., None]
    # constant continuation past the last node
    idx[..., :STENCIL] = np.where(beyond[..., None], n - 1, idx[..., :STENCIL])
    far = np.zeros(STENCIL)
    far[0] = 1.0
    wts[..., :STENCIL] = np.where(beyond[..., None], far * sgn[..., None], wts[..., :STENCIL])
    idx[..., STENCIL] = 0
    wts[..., STENCIL] = -sgn
    return idx, wts


def uform_accumulate(table, dr, y, uq, wq, s, eps, length, coef, abar, tail, nthreads=1):
    """Add one sigma node of the wide-kernel quadrature.

    abar[k, i, q] += coef[k] (s/eps) wq[q] (g_{k+1}(a-) - g_{k+1}(a+)),
    tail[k, i]    += coef[k] (g_k((y_i - s L)/eps) + g_k((y_i + s L)/eps)),
    with a-/+ = (y_i -/+ s uq[q]) / eps.
    """
    scale = s / eps
    rmax = dr * (table.shape[1] - 1)
    for i, yi in enumerate(y):
        am = (yi - s * uq) / eps
        ap = (yi + s * uq) / eps
        live = (np.abs(am) < rmax) | (ap < rmax)
        if live.any():
            q = np.nonzero(live)[0]
            gm = eval_orders(table, dr, (1, 2, 3, 4), am[q])
            gp = eval_orders(table, dr, (1, 2, 3, 4), ap[q])
            diff = (gm - gp) * (scale * wq[q])
            for k in range(4):
                abar[k, i, q] += coef[k] * diff[k]
        ends = np.array([(yi - s * length) / eps, (yi + s * length) / eps])
        gt = eval_orders(table, dr, (0, 1, 2, 3), ends)
        for k in range(4):
            tail[k, i] += coef[k] * (gt[k, 0] + gt[k, 1])


def rform_accumulate(y, h, n, s, eps, r_nodes, gw, matrix, nthreads=1):
    """Add one sigma node of the narrow-kernel quadrature.

    ``gw[k, p]`` already contains coef[k] w_p g_{k+1}(r_p). For each output
    row i this scatters sum_p gw[k, p] (P(y_i - eps r_p)/s) - P(y_i/s)) into
    matrix[k, i, :].
    """
    gsum = np.array([sum(row.tolist()) for row in gw])  # sequential, as in _core
    for i, yi in enumerate(y):
        idx, wts = odd_stencil((yi - eps * r_nodes) / s, h, n)
        idx0, wts0 = odd_stencil(np.array([yi / s]), h, n)
        for k in range(4):
            row = matrix[k, i]
            np.add.at(row, idx.ravel(), (gw[k][:, None] * wts).ravel())
            np.add.at(row, idx0.ravel(), -gsum[k] * wts0.ravel())
