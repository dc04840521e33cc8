"""Quartic heat kernel G(x, t) and its derivatives via tabulated scaled profiles.

With g_k(r) = (1/pi) int_0^inf eta^k exp(-eta^4) cos(r eta + k pi/2) d eta one
has d^k G / dx^k (x, t) = t^(-(k+1)/4) g_k(x t^(-1/4)). The profiles are
tabulated once on a uniform grid of [0, R_MAX] together with their next two
derivatives (which are simply g_{k+1}, g_{k+2}), so quintic Hermite
interpolation gives O(1) evaluation at ~1e-15 absolute accuracy.
"""

from __future__ import annotations

import math
import os
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from ._quad import adaptive_gl, composite_rule

R_MAX = 48.0
N_INTERVALS = 4096
N_ORDERS = 10          # stored orders 0..9
MAX_EVAL_ORDER = N_ORDERS - 3
ETA_MAX = 2.9
CACHE_MAGIC = b"GKT1"
_HEADER = struct.Struct("<4sIId")


@dataclass(frozen=True)
class KernelTable:
    """Samples of one scaled profile g_k on r >= 0."""

    order: int
    r_nodes: np.ndarray
    values: np.ndarray
    r_max: float
    envelope: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.r_nodes.shape != self.values.shape:
            raise ValueError("r_nodes and values must have equal shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("kernel table contains non-finite values")


def tabulate(r: np.ndarray, orders=range(N_ORDERS), eta_max: float = ETA_MAX) -> np.ndarray:
    """Evaluate g_k(r) for the requested orders by panel Gauss-Legendre in eta.

    Panels are at most pi / (4 max|r|) wide, an eighth of the shortest period
    of cos(r eta), with 16 nodes each.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rmax = max(1.0, float(np.max(np.abs(r))))
    n_panels = int(math.ceil(eta_max / (math.pi / (4.0 * rmax))))
    eta, w = composite_rule(np.linspace(0.0, eta_max, n_panels + 1), 16)
    amp = w * np.exp(-eta ** 4) / math.pi
    orders = list(orders)
    weights_cos = np.empty((eta.size, len(orders)))
    weights_sin = np.empty((eta.size, len(orders)))
    for col, k in enumerate(orders):
        base = amp * eta ** k
        # cos(x + k pi / 2) cycles through cos, -sin, -cos, sin
        c, sn = [(1.0, 0.0), (0.0, -1.0), (-1.0, 0.0), (0.0, 1.0)][k % 4]
        weights_cos[:, col] = c * base
        weights_sin[:, col] = sn * base
    out = np.empty((len(orders), r.size))
    chunk = 512
    for start in range(0, r.size, chunk):
        phase = np.outer(r[start:start + chunk], eta)
        block = np.cos(phase) @ weights_cos + np.sin(phase) @ weights_sin
        out[:, start:start + chunk] = block.T
    return out


@dataclass
class KernelBank:
    """All tabulated orders on one uniform grid, with fast evaluation."""

    table: np.ndarray
    r_max: float = R_MAX
    _envelopes: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.table = np.ascontiguousarray(self.table, dtype=float)
        self.table.setflags(write=False)
        self.n_nodes = self.table.shape[1]
        self.dr = self.r_max / (self.n_nodes - 1)

    @classmethod
    def build(cls, n_intervals: int = N_INTERVALS, r_max: float = R_MAX) -> "KernelBank":
        r = np.linspace(0.0, r_max, n_intervals + 1)
        return cls(tabulate(r), r_max)

    @property
    def r_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_nodes)

    def table_for(self, k: int) -> KernelTable:
        return KernelTable(k, self.r_nodes, np.array(self.table[k]), self.r_max,
                           self._envelopes.get((k, 0)))

    def eval(self, k: int, r) -> np.ndarray:
        return self.eval_many((k,), r)[0]

    def eval_many(self, orders, r) -> np.ndarray:
        orders = tuple(int(k) for k in orders)
        if any(k < 0 or k > MAX_EVAL_ORDER for k in orders):
            raise ValueError(f"orders must lie in 0..{MAX_EVAL_ORDER}, got {orders}")
        return _backend.eval_orders(self.table, self.dr, np.asarray(orders, dtype=np.intp), r)

    # -- persistence -------------------------------------------------------
    def save(self, path: str | os.PathLike) -> None:
        """Write the binary cache: per order a header then (r, g) pairs."""
        r = self.r_nodes
        with open(path, "wb") as fh:
            for k in range(self.table.shape[0]):
                fh.write(_HEADER.pack(CACHE_MAGIC, k, self.n_nodes, self.r_max))
                pairs = np.empty((self.n_nodes, 2), dtype="<f8")
                pairs[:, 0] = r
                pairs[:, 1] = self.table[k]
                fh.write(pairs.tobytes())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "KernelBank":
        data = Path(path).read_bytes()
        offset = 0
        rows = []
        r_max = None
        while offset < len(data):
            magic, k, n, rm = _HEADER.unpack_from(data, offset)
            if magic != CACHE_MAGIC:
                raise ValueError(f"{path}: bad kernel cache magic {magic!r}")
            if k != len(rows):
                raise ValueError(f"{path}: orders out of sequence")
            offset += _HEADER.size
            pairs = np.frombuffer(data, dtype="<f8", count=2 * n, offset=offset).reshape(n, 2)
            offset += 16 * n
            rows.append(pairs[:, 1].astype(float))
            r_max = rm
        if len(rows) < N_ORDERS:
            raise ValueError(f"{path}: cache holds {len(rows)} orders, need {N_ORDERS}")
        return cls(np.vstack(rows), float(r_max))


_bank_lock = threading.Lock()
_bank: KernelBank | None = None
_cache_path: str | None = os.environ.get("GROOVESOLVE_KERNEL_CACHE") or None


def set_kernel_cache(path: str | os.PathLike | None) -> None:
    """Use ``path`` as on-disk cache for the default bank (created if absent)."""
    global _cache_path, _bank
    with _bank_lock:
        _cache_path = None if path is None else str(path)
        _bank = None


def default_bank() -> KernelBank:
    global _bank
    with _bank_lock:
        if _bank is None:
            if _cache_path and Path(_cache_path).exists():
                _bank = KernelBank.load(_cache_path)
            else:
                _bank = KernelBank.build()
                if _cache_path:
                    _bank.save(_cache_path)
        return _bank


# -- public scalar/array API ------------------------------------------------

def _check_order(k: int) -> None:
    if not (0 <= int(k) <= 5) or int(k) != k:
        raise ValueError(f"kernel order must be an integer in 0..5, got {k}")


def _out(values: np.ndarray, like):
    return float(values) if np.ndim(like) == 0 else values


def scaled_kernel(k: int, r):
    """g_k(r); zero for |r| beyond the table range."""
    _check_order(k)
    return _out(default_bank().eval(k, r), r)


def g_eval(k: int, x, t: float):
    """d^k G / dx^k at (x, t)."""
    _check_order(k)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    q = t ** -0.25
    return _out(q ** (k + 1) * default_bank().eval(k, np.asarray(x, dtype=float) * q), x)


def k_eval(x, y, t: float):
    """Neumann kernel K(x, y, t) = G(x - y, t) + G(x + y, t) on the half-line."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("k_eval requires x, y >= 0")
    q = t ** -0.25
    bank = default_bank()
    val = q * (bank.eval(0, (x - y) * q) + bank.eval(0, (x + y) * q))
    return _out(val, x + y)


NU_GRID = np.round(np.arange(0.05, 1.0001, 0.05), 10)
ENVELOPE_C_MAX = 1e3


class EnvelopeFitError(RuntimeError):
    pass


def fit_envelope(k: int, ell: int, r_upper: float = 10.0,
                 bank: KernelBank | None = None) -> tuple[float, float]:
    """Fit |g_n(r)| <= C (1 + r^(n/3)) exp(-nu r^(4/3)) with n = 4 ell + k.

    Time derivatives reduce to space derivatives (d/dt = -d^4/dx^4), so the
    order-n profile is checked at every table node with r <= r_upper. The pair
    with the largest nu on a fixed grid whose C stays below 1e3 is returned.
    """
    if ell not in (0, 1):
        raise ValueError("ell must be 0 or 1")
    n = 4 * ell + k
    bank = bank or default_bank()
    if not 0 <= n < bank.table.shape[0]:
        raise ValueError(f"order {n} not tabulated")
    r = bank.r_nodes
    sel = r <= r_upper
    r = r[sel]
    g = np.abs(bank.table[n][sel])
    shape = 1.0 + r ** (n / 3.0)
    best = None
    for nu in NU_GRID:
        c = float(np.max(g / (shape * np.exp(-nu * r ** (4.0 / 3.0)))))
        if c <= ENVELOPE_C_MAX:
            best = (max(c, np.finfo(float).tiny), float(nu))
    if best is None:
        raise EnvelopeFitError(f"no envelope with nu >= {NU_GRID[0]} for order {n}")
    bank._envelopes[(k, ell)] = best
    return best


def time_derivative_direct(x: float, t: float) -> float:
    """dG/dt by its own Fourier quadrature, -(1/pi) int xi^4 exp(-xi^4 t) cos(x xi)."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    # after xi = eta t^(-1/4) the integrand lives on eta in [0, 3]
    q = t ** -0.25
    width = math.pi / (4.0 * max(1.0, abs(x) * q))
    edges = np.arange(0.0, 3.0 + width, width)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += adaptive_gl(lambda e: e ** 4 * np.exp(-e ** 4) * np.cos(x * q * e),
                             lo, hi, rtol=0.0, atol=1e-17, n=10)
    return -total * q ** 5 / math.pi


def pde_residual(x: float, t: float) -> float:
    """dG/dt + d^4G/dx^4 with the two terms computed by unrelated routes."""
    q = t ** -0.25
    fourth = q ** 5 * float(default_bank().eval(4, x * q))
    return time_derivative_direct(x, t) + fourth


def moment(k: int, bank: KernelBank | None = None) -> float:
    """Integral of g_k over the real line from the table nodes (Simpson)."""
    bank = bank or default_bank()
    half = bank.table[k]
    # symmetric node set -R..R, values mirrored with the parity of k
    g = np.concatenate(((-1.0) ** k * half[:0:-1], half))
    w = np.full(g.size, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return float(np.dot(w, g)) * bank.dr / 3.0


__all__ = [
    "KernelTable", "KernelBank", "tabulate", "default_bank", "set_kernel_cache",
    "scaled_kernel", "g_eval", "k_eval", "fit_envelope", "pde_residual",
    "time_derivative_direct", "moment", "R_MAX", "EnvelopeFitError",
]
