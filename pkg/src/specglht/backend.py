"""Selects the quadrature kernel implementation at import time.

Prefers the compiled extension ``specglht._quadcore``; falls back to the
chunked-numpy implementation with identical semantics when the extension is
unavailable (e.g. a source checkout without a build step). Which backend is
active is exposed for benchmarks and diagnostics.
"""

from __future__ import annotations

try:
    from ._quadcore import coupled_cauchy_sum

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised only in unbuilt checkouts
    from ._quadfallback import coupled_cauchy_sum

    BACKEND = "fallback"

__all__ = ["coupled_cauchy_sum", "BACKEND", "backend_name"]


def backend_name() -> str:
    """Return which coupled-sum kernel is active: 'compiled' or 'fallback'."""
    return BACKEND
