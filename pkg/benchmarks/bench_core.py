"""Compiled core vs numpy fallback: timings and bitwise agreement.

    python benchmarks/bench_core.py [--ny 201] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time
from contextlib import contextmanager

import numpy as np

from groovesolve import _backend, _fallback
from groovesolve.fixed_point.duhamel import DuhamelOperator
from groovesolve.kernel import default_bank

try:
    from groovesolve import _core
except ImportError:
    _core = None


@contextmanager
def fallback_backend():
    saved = (_backend.uform_accumulate, _backend.rform_accumulate, _backend.eval_orders)
    _backend.uform_accumulate = _fallback.uform_accumulate
    _backend.rform_accumulate = _fallback.rform_accumulate
    _backend.eval_orders = _fallback.eval_orders
    try:
        yield
    finally:
        _backend.uform_accumulate, _backend.rform_accumulate, _backend.eval_orders = saved


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ny", type=int, default=201)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    bank = default_bank()
    rows = []

    r = np.linspace(-48.0, 48.0, 200_001)
    orders = np.arange(6, dtype=np.intp)
    tc, a = best_of(lambda: _core.eval_orders(bank.table, bank.dr, orders, r), args.repeat)
    tf, b = best_of(lambda: _fallback.eval_orders(bank.table, bank.dr, orders, r), args.repeat)
    rows.append(("kernel table lookup (6 orders x 2e5 points)", tc, tf, np.array_equal(a, b)))

    y = np.linspace(0.0, 12.0, args.ny)
    build = lambda: DuhamelOperator.build(y, bank=bank, nthreads=1).matrices
    tc, a = best_of(build, 1)
    with fallback_backend():
        tf, b = best_of(build, 1)
    rows.append((f"Duhamel operator build (n_y = {args.ny})", tc, tf, np.array_equal(a, b)))

    print(f"{'task':48s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}  identical")
    for name, tc, tf, same in rows:
        print(f"{name:48s} {tc:9.3f}s {tf:9.3f}s {tf / tc:7.1f}x  {same}")


if __name__ == "__main__":
    main()
