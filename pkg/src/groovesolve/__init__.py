"""Self-similar groove profiles for surface diffusion flow on the half-line."""

from __future__ import annotations

__version__ = "0.1.0"
