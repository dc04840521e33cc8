"""Discrete estimators of the weighted space-time norms used by the solver.

Space-time fields are sampled as ``derivs[j, k, i]`` = d^k w / dx^k (x_i, t_j)
for k = 0..3. The T-scaled equivalent norms are used, so a self-similar field
w = t^(1/4) W(x t^(-1/4)) has norms independent of T; ``profile_norms``
evaluates those values directly from the profile.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._fallback import lagrange_weights
from .linear_solver import BoundaryTrace

ALL_PAIRS_LIMIT = 64
NEIGHBOURS = 8


@dataclass(frozen=True)
class NormReport:
    b_norm: float
    c_norm: float
    z_norm: float
    gamma: float
    T: float

    def __post_init__(self) -> None:
        for name in ("b_norm", "c_norm", "z_norm"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_parts(cls, b_norm: float, c_norm: float, gamma: float, T: float) -> "NormReport":
        return cls(b_norm, c_norm, b_norm + c_norm, gamma, T)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpaceTimeField:
    t_nodes: np.ndarray      # (n_t,) ascending in (0, T]
    x_nodes: np.ndarray      # (n_x,) ascending
    derivs: np.ndarray       # (n_t, 4, n_x)

    def __post_init__(self) -> None:
        t = np.asarray(self.t_nodes, dtype=float)
        x = np.asarray(self.x_nodes, dtype=float)
        d = np.asarray(self.derivs, dtype=float)
        if d.shape != (t.size, 4, x.size):
            raise ValueError(f"derivs must have shape (n_t, 4, n_x), got {d.shape}")
        if np.any(np.diff(t) <= 0) or t[0] <= 0:
            raise ValueError("t_nodes must be positive and increasing")
        object.__setattr__(self, "t_nodes", t)
        object.__setattr__(self, "x_nodes", x)
        object.__setattr__(self, "derivs", d)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.t_nodes, self.x_nodes, self.derivs - other.derivs)

    def scaled(self, factor: float) -> "SpaceTimeField":
        return SpaceTimeField(self.t_nodes, self.x_nodes, factor * self.derivs)


def holder_seminorm(values, nodes, gamma: float) -> float:
    """sup over node pairs of |v_i - v_j| / |x_i - x_j|^gamma."""
    v = np.asarray(values, dtype=float)
    x = np.asarray(nodes, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two nodes")
    best = 0.0
    cols = np.arange(v.size)
    block = 256            # rows per block keeps memory at O(n * block)
    for start in range(0, v.size - 1, block):
        rows = np.arange(start, min(start + block, v.size - 1))
        dv = np.abs(v[rows, None] - v[None, :])
        dx = np.abs(x[rows, None] - x[None, :])
        upper = (cols[None, :] > rows[:, None]) & (dx > 0)
        ratio = np.divide(dv, dx ** gamma, out=np.zeros_like(dv), where=upper)
        best = max(best, float(ratio.max()))
    return best


def time_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (s, t) with s < t: all pairs up to 64 nodes, else 8 neighbours."""
    if n <= ALL_PAIRS_LIMIT:
        i, j = np.triu_indices(n, k=1)
        return i, j
    i = np.repeat(np.arange(n), NEIGHBOURS)
    j = i + np.tile(np.arange(1, NEIGHBOURS + 1), n)
    keep = j < n
    return i[keep], j[keep]


def _space_sup(d: np.ndarray) -> np.ndarray:
    return np.max(np.abs(d), axis=-1)


def weighted_b_norm(field: SpaceTimeField, gamma: float, T: float) -> float:
    """sup_t t^((2+g)/4) (sum_k T^(-(3-k+g)/4) |d^k w(t)| + [d^3 w(t)]_g)."""
    t = field.t_nodes
    sups = _space_sup(field.derivs)                       # (n_t, 4)
    scale = T ** (-(3.0 - np.arange(4) + gamma) / 4.0)
    semi = np.array([holder_seminorm(field.derivs[j, 3], field.x_nodes, gamma)
                     for j in range(t.size)])
    per_time = t ** ((2.0 + gamma) / 4.0) * (sups @ scale + semi)
    return float(per_time.max())


def weighted_c_norm(field: SpaceTimeField, gamma: float, T: float) -> float:
    """T-scaled sup of t^(1/4)|d^k w(t)| (k <= 2) plus the time-Hoelder seminorm."""
    t = field.t_nodes
    if t.size < 2:
        raise ValueError("need at least two time samples")
    scale = T ** (-(2.0 - np.arange(3)) / 4.0)
    sups = _space_sup(field.derivs[:, :3])                # (n_t, 3)
    sup_part = float(np.max(t ** 0.25 * (sups @ scale)))
    i, j = time_pairs(t.size)
    diff = _space_sup(field.derivs[j, :3] - field.derivs[i, :3]) @ scale
    semi = t[i] ** ((2.0 + gamma) / 4.0) * diff / (t[j] - t[i]) ** ((1.0 + gamma) / 4.0)
    return sup_part + float(semi.max(initial=0.0))


def norm_report(field: SpaceTimeField, gamma: float, T: float) -> NormReport:
    return NormReport.from_parts(weighted_b_norm(field, gamma, T),
                                 weighted_c_norm(field, gamma, T), gamma, T)


def trace_norm(trace: BoundaryTrace, gamma: float, T: float) -> float:
    """sup t^(1/2)|b| plus sup s^((3+g)/4)|b(t) - b(s)| / (t - s)^((1+g)/4)."""
    t = trace.t_nodes
    if t.size < 2:
        raise ValueError("trace needs at least two nodes")
    if t[-1] > T * (1.0 + 1e-12):
        raise ValueError("trace extends beyond T")
    b = trace.h_values / np.sqrt(t)
    sup_part = float(np.max(np.abs(trace.h_values)))
    i, j = time_pairs(t.size)
    semi = t[i] ** ((3.0 + gamma) / 4.0) * np.abs(b[j] - b[i]) / (t[j] - t[i]) ** ((1.0 + gamma) / 4.0)
    return sup_part + float(semi.max(initial=0.0))


# -- self-similar fields ---------------------------------------------------------

def _rescaled(values: np.ndarray, y: np.ndarray, factor: float) -> np.ndarray:
    """values(y * factor) by 6-point interpolation; zero beyond the grid."""
    h = y[1] - y[0]
    n = y.size
    pos = y * factor / h
    cell = np.minimum(pos.astype(np.intp), n - 2)
    j0 = np.clip(cell - 2, 0, n - 6)
    w = lagrange_weights(pos - j0)
    out = np.einsum("ij,ij->i", w, values[j0[:, None] + np.arange(6)])
    return np.where(pos <= n - 1, out, 0.0)


def rho_grid(n: int = 64) -> np.ndarray:
    """Ratios s/t in (0, 1), uniform in rho^(1/4) like the time grid."""
    return (np.arange(1, n) / n) ** 4


def profile_norms(y: np.ndarray, derivs: np.ndarray, gamma: float, T: float = 1.0,
                  rhos: np.ndarray | None = None) -> NormReport:
    """Norms of w = t^(1/4) W(x t^(-1/4)) from the profile arrays W^(k).

    b_norm = sum_k |W^(k)| + [W''']_g and, writing D_k(rho) for
    |W^(k) - rho^((1-k)/4) W^(k)(. rho^(-1/4))|,
    c_norm = sum_{k<=2} |W^(k)| + sup_rho rho^((2+g)/4)(1-rho)^(-(1+g)/4) sum_k D_k(rho).
    Both are independent of T for the T-scaled norms.
    """
    y = np.asarray(y, dtype=float)
    d = np.asarray(derivs, dtype=float)
    sups = np.max(np.abs(d), axis=1)
    b = float(sups.sum() + holder_seminorm(d[3], y, gamma))
    rhos = rho_grid() if rhos is None else np.asarray(rhos, dtype=float)
    semi = 0.0
    for rho in rhos:
        total = 0.0
        for k in range(3):
            moved = rho ** ((1.0 - k) / 4.0) * _rescaled(d[k], y, rho ** -0.25)
            total += float(np.max(np.abs(d[k] - moved)))
        semi = max(semi, rho ** ((2.0 + gamma) / 4.0) * total / (1.0 - rho) ** ((1.0 + gamma) / 4.0))
    c = float(sups[:3].sum() + semi)
    return NormReport.from_parts(b, c, gamma, T)


def sample_self_similar(y: np.ndarray, derivs: np.ndarray, t_nodes: np.ndarray,
                        x_nodes: np.ndarray) -> SpaceTimeField:
    """Space-time samples of t^((1-k)/4) W^(k)(x t^(-1/4)) on a tensor grid."""
    y = np.asarray(y, dtype=float)
    out = np.empty((t_nodes.size, 4, x_nodes.size))
    h = y[1] - y[0]
    for j, t in enumerate(t_nodes):
        q = t ** -0.25
        pos = x_nodes * q / h
        cell = np.minimum(pos.astype(np.intp), y.size - 2)
        j0 = np.clip(cell - 2, 0, y.size - 6)
        w = lagrange_weights(pos - j0)
        for k in range(4):
            vals = np.einsum("ij,ij->i", w, derivs[k][j0[:, None] + np.arange(6)])
            out[j, k] = t ** ((1.0 - k) / 4.0) * np.where(pos <= y.size - 1, vals, 0.0)
    return SpaceTimeField(t_nodes, x_nodes, out)
