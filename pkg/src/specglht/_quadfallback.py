"""Pure-numpy fallback for the double-contour coupled sum.

Same contract as the compiled kernel in ``_quadcore``: evaluates

    sum_{i,j} a1[i] * a2[j] * q(i, j)

where ``q(i, j) = (g1[i] - g2[j]) / (z1[i] - z2[j])`` away from the diagonal
and the removable singularity is filled with the analytic limit ``gp1[i]``
when ``|z1[i] - z2[j]|`` drops below the coincidence tolerance.

Chunked over the first index to bound peak memory; summation order is fixed
(chunks in index order, numpy pairwise reduction within a chunk), so results
are deterministic.
"""

from __future__ import annotations

import numpy as np

from .spectrum import COINCIDENT_TOL

_CHUNK = 512


def coupled_cauchy_sum(
    z1: np.ndarray,
    a1: np.ndarray,
    g1: np.ndarray,
    gp1: np.ndarray,
    z2: np.ndarray,
    a2: np.ndarray,
    g2: np.ndarray,
) -> complex:
    total = 0.0 + 0.0j
    for start in range(0, z1.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        d = z1[sl, None] - z2[None, :]
        close = np.abs(d) < COINCIDENT_TOL
        quot = (g1[sl, None] - g2[None, :]) / np.where(close, 1.0, d)
        if close.any():
            quot = np.where(close, np.broadcast_to(gp1[sl, None], d.shape), quot)
        total += complex((a1[sl, None] * a2[None, :] * quot).sum())
    return total
