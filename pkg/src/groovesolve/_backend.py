"""Select the compiled hot loops when available, else the numpy versions.

Set GROOVESOLVE_BACKEND=python to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

NAME = "python"
_impl = _fallback

if os.environ.get("GROOVESOLVE_BACKEND", "").lower() != "python":
    try:
        from . import _core as _impl  # type: ignore[no-redef]
        NAME = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback

eval_orders = _impl.eval_orders
uform_accumulate = _impl.uform_accumulate
rform_accumulate = _impl.rform_accumulate
odd_stencil = _fallback.odd_stencil
lagrange_weights = _fallback.lagrange_weights


def thread_count() -> int:
    """Worker cap from GROOVESOLVE_THREADS (0 or unset means all cores)."""
    raw = os.environ.get("GROOVESOLVE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GROOVESOLVE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("GROOVESOLVE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)
