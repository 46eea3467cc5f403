"""Compiled vs pure-numpy quadrature kernels: identical semantics."""

from __future__ import annotations

import numpy as np
import pytest

from specglht import backend
from specglht._quadfallback import coupled_cauchy_sum as fallback_sum

compiled = pytest.importorskip(
    "specglht._quadcore", reason="compiled extension not built in this checkout"
)


def _random_inputs(rng, n1, n2):
    def cvec(n):
        return np.ascontiguousarray(rng.standard_normal(n) + 1j * rng.standard_normal(n))

    z1, a1, g1, gp1 = (cvec(n1) for _ in range(4))
    z2, a2, g2 = (cvec(n2) for _ in range(3))
    return z1, a1, g1, gp1, z2, a2, g2


def test_backend_reports_a_known_kernel():
    assert backend.backend_name() in ("compiled", "fallback")
    assert backend.backend_name() == backend.BACKEND


def test_compiled_and_fallback_agree_on_random_inputs(rng):
    args = _random_inputs(rng, 700, 500)
    a = compiled.coupled_cauchy_sum(*args)
    b = fallback_sum(*args)
    assert a == pytest.approx(b, rel=1e-12)


def test_agreement_with_coincident_nodes(rng):
    # duplicate some nodes across the two contours to force the diagonal
    # (removable-singularity) branch in both implementations
    z1, a1, g1, gp1, z2, a2, g2 = _random_inputs(rng, 64, 64)
    z2 = z2.copy()
    z2[:16] = z1[:16]
    g2 = g2.copy()
    g2[:16] = g1[:16]
    a = compiled.coupled_cauchy_sum(z1, a1, g1, gp1, z2, a2, g2)
    b = fallback_sum(z1, a1, g1, gp1, z2, a2, g2)
    assert a == pytest.approx(b, rel=1e-12)


def test_known_small_case():
    # two-by-one cross sum checked by hand:
    #   a1 = (1, 2), a2 = (3,), q(i, 0) = (g1[i] - g2[0]) / (z1[i] - z2[0])
    z1 = np.array([0.0 + 1.0j, 1.0 + 1.0j])
    a1 = np.array([1.0 + 0.0j, 2.0 + 0.0j])
    g1 = np.array([2.0 + 0.0j, 4.0 + 0.0j])
    gp1 = np.zeros(2, dtype=complex)
    z2 = np.array([2.0 + 1.0j])
    a2 = np.array([3.0 + 0.0j])
    g2 = np.array([8.0 + 0.0j])
    expect = 1 * 3 * (2 - 8) / (0 - 2) + 2 * 3 * (4 - 8) / (1 - 2)
    for func in (compiled.coupled_cauchy_sum, fallback_sum):
        assert func(z1, a1, g1, gp1, z2, a2, g2) == pytest.approx(expect, rel=1e-14)


def test_diagonal_branch_uses_supplied_limit():
    z = np.array([1.0 + 1.0j])
    a = np.array([1.0 + 0.0j])
    g = np.array([5.0 + 0.0j])
    gp = np.array([7.0 + 0.0j])
    for func in (compiled.coupled_cauchy_sum, fallback_sum):
        got = func(z, a, g, gp, z.copy(), a.copy(), g.copy())
        assert got == pytest.approx(7.0, rel=1e-14)


def test_deterministic_across_calls(rng):
    args = _random_inputs(rng, 300, 300)
    first = backend.coupled_cauchy_sum(*args)
    again = backend.coupled_cauchy_sum(*args)
    assert first == again
