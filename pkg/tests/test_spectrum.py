"""Resolvent transforms of the residual spectrum: frozen values, symmetry
and recursion properties, domain guards."""

from __future__ import annotations

import numpy as np
import pytest

import oracles
from specglht.errors import DegenerateDenominator, InvalidPrior, PoleProximity
from specglht.spectrum import (
    CANONICAL_PANEL,
    PriorWeights,
    SpectralSummary,
    as_prior,
    delta_kernel_hat,
    h_hat,
    rho_hat,
    stieltjes,
    stieltjes_deriv,
    theta_hat,
)


@pytest.fixture
def ones4():
    """Point-mass spectrum at 1 with p = n = 4 (ratio one)."""
    return SpectralSummary(np.ones(4), 4)


@pytest.fixture
def two_point():
    """Eigenvalues {1, 2} with n = 4, so the ratio is 0.5."""
    return SpectralSummary(np.array([1.0, 2.0]), 4)


@pytest.fixture
def one_three():
    """Eigenvalues {1, 3}; the plain transforms do not depend on n."""
    return SpectralSummary(np.array([1.0, 3.0]), 8)


@pytest.fixture
def random_spec(rng):
    eigs = oracles.sample_like_spectrum(rng, p=40, n=60)
    return SpectralSummary(eigs, 60)


class TestSpectralSummary:
    def test_sorts_descending_and_clamps_tiny_negatives(self):
        spec = SpectralSummary([0.5, -1e-11, 2.0, 1.0], 10)
        assert spec.eigenvalues.tolist() == [2.0, 1.0, 0.5, 0.0]

    def test_rejects_genuinely_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="PSD"):
            SpectralSummary([1.0, -1e-3], 10)

    def test_rejects_empty_and_bad_n(self):
        with pytest.raises(ValueError):
            SpectralSummary([], 10)
        with pytest.raises(ValueError):
            SpectralSummary([1.0], 0)

    def test_shape_properties(self, two_point):
        assert two_point.p == 2
        assert two_point.n == 4
        assert two_point.gamma_n == 0.5
        assert two_point.trace_mean == 1.5
        assert two_point.lambda_max == 2.0

    def test_eigenvalues_are_read_only(self, two_point):
        with pytest.raises(ValueError):
            two_point.eigenvalues[0] = 99.0


class TestStieltjes:
    def test_point_mass_at_minus_one(self, ones4):
        assert stieltjes(ones4, -1.0) == pytest.approx(0.5, rel=1e-14)

    def test_two_atom_value(self, one_three):
        assert stieltjes(one_three, -1.0) == pytest.approx(0.375, rel=1e-14)

    def test_complex_argument(self, ones4):
        assert stieltjes(ones4, 2.0 + 1.0j) == pytest.approx(-0.5 + 0.5j, rel=1e-14)

    def test_conjugate_symmetry(self, random_spec, rng):
        z = rng.uniform(-3, -0.1, 5) + 1j * rng.uniform(0.1, 2, 5)
        assert np.allclose(stieltjes(random_spec, np.conj(z)),
                           np.conj(stieltjes(random_spec, z)), rtol=1e-12)

    def test_array_shape_preserved(self, one_three):
        z = np.array([[-1.0, -2.0], [-3.0, -4.0]])
        out = stieltjes(one_three, z)
        assert out.shape == (2, 2)
        assert out[0, 0] == pytest.approx(0.375)

    def test_evaluation_at_an_eigenvalue_is_refused(self, two_point):
        with pytest.raises(PoleProximity):
            stieltjes(two_point, 1.0 + 1e-13)


class TestStieltjesDeriv:
    def test_point_mass(self, ones4):
        assert stieltjes_deriv(ones4, -1.0) == pytest.approx(0.25, rel=1e-14)

    def test_two_atom_value(self, one_three):
        assert stieltjes_deriv(one_three, -1.0) == pytest.approx(0.15625, rel=1e-14)

    def test_far_field_decay(self, two_point):
        z = -1e6
        assert stieltjes_deriv(two_point, z) == pytest.approx(1.0 / z**2, rel=1e-2)

    def test_matches_numerical_derivative(self, random_spec):
        z, h = -0.7, 1e-6
        numeric = (stieltjes(random_spec, z + h) - stieltjes(random_spec, z - h)) / (2 * h)
        assert stieltjes_deriv(random_spec, z) == pytest.approx(numeric, rel=1e-7)


class TestThetaHat:
    def test_point_mass_ratio_one(self, ones4):
        assert theta_hat(ones4, -1.0) == pytest.approx(2.0, rel=1e-14)

    def test_tiny_ratio_tends_to_one(self):
        spec = SpectralSummary(np.array([1.0, 2.0]), 2_000_000)
        assert theta_hat(spec, -1.0) == pytest.approx(1.0, abs=1e-5)

    def test_two_atom_value(self, two_point):
        assert theta_hat(two_point, -1.0) == pytest.approx(24.0 / 17.0, rel=1e-13)

    def test_matches_reciprocal_form_oracle(self, random_spec, rng):
        for z in rng.uniform(-5, -0.1, 8):
            expect = oracles.theta_d(random_spec.eigenvalues, random_spec.n, z)
            assert theta_hat(random_spec, z) == pytest.approx(expect, rel=1e-12)

    def test_degenerate_denominator_raises(self, ones4):
        # ratio one makes the denominator vanish exactly at the origin
        with pytest.raises(DegenerateDenominator):
            theta_hat(ones4, 0.0)


class TestDeltaKernel:
    def test_point_mass_vanishes_off_diagonal(self, ones4):
        assert delta_kernel_hat(ones4, -1.0, -2.0) == pytest.approx(0.0, abs=1e-12)

    def test_point_mass_vanishes_on_diagonal(self, ones4):
        assert delta_kernel_hat(ones4, -1.0, -1.0) == pytest.approx(0.0, abs=1e-12)

    def test_two_atom_off_diagonal_matches_oracle(self, two_point):
        got = delta_kernel_hat(two_point, -1.0, -1.5)
        expect = oracles.delta_two_point(two_point.eigenvalues, two_point.n, -1.0, -1.5)
        assert got == pytest.approx(expect, rel=1e-12)

    def test_diagonal_is_the_coincident_limit(self, two_point):
        diag = delta_kernel_hat(two_point, -1.0, -1.0)
        near = oracles.delta_diag_limit(two_point.eigenvalues, two_point.n, -1.0)
        assert diag == pytest.approx(near, abs=1e-4)
        assert diag > 0.0

    def test_symmetric_in_arguments(self, random_spec):
        a = delta_kernel_hat(random_spec, -0.5, -2.5)
        b = delta_kernel_hat(random_spec, -2.5, -0.5)
        assert a == pytest.approx(b, rel=1e-13)

    def test_real_for_real_complex_for_complex(self, two_point):
        assert not np.iscomplexobj(delta_kernel_hat(two_point, -1.0, -2.0))
        assert np.iscomplexobj(delta_kernel_hat(two_point, -1.0 + 0.5j, -2.0))

    def test_broadcasting(self, two_point):
        z = np.array([-1.0, -2.0, -3.0])
        out = delta_kernel_hat(two_point, z[:, None], z[None, :])
        assert out.shape == (3, 3)
        assert np.allclose(out, out.T, rtol=1e-13)

    def test_near_coincident_arguments_use_the_diagonal_branch(self, two_point):
        diag = delta_kernel_hat(two_point, -1.0, -1.0)
        near = delta_kernel_hat(two_point, -1.0, -1.0 + 5e-9)
        assert near == pytest.approx(diag, rel=1e-12)


class TestRhoHat:
    def test_point_mass_order_zero(self, ones4):
        assert rho_hat(ones4, -1.0, 0) == pytest.approx(0.5, rel=1e-14)

    def test_point_mass_order_one(self, ones4):
        assert rho_hat(ones4, -1.0, 1) == pytest.approx(1.0, rel=1e-14)

    def test_point_mass_order_two(self, ones4):
        assert rho_hat(ones4, -1.0, 2) == pytest.approx(0.0, abs=1e-14)

    def test_order_zero_is_stieltjes(self, random_spec, rng):
        for z in rng.uniform(-4, -0.2, 5):
            assert rho_hat(random_spec, z, 0) == stieltjes(random_spec, z)

    def test_recursion_identity(self, random_spec):
        z = -1.3
        th = theta_hat(random_spec, z)
        assert rho_hat(random_spec, z, 1) == pytest.approx(
            th * (1.0 + z * rho_hat(random_spec, z, 0)), rel=1e-13
        )
        assert rho_hat(random_spec, z, 2) == pytest.approx(
            th * (random_spec.trace_mean + z * rho_hat(random_spec, z, 1)), rel=1e-13
        )

    def test_order_out_of_range(self, ones4):
        with pytest.raises(ValueError):
            rho_hat(ones4, -1.0, 3)


class TestHHat:
    def test_pure_first_weight_is_stieltjes(self, random_spec, rng):
        for z in rng.uniform(-4, -0.2, 5):
            got = h_hat(random_spec, z, (1.0, 0.0, 0.0))
            assert got == pytest.approx(stieltjes(random_spec, z), rel=1e-14)

    def test_zero_weights_give_zero(self, two_point):
        assert h_hat(two_point, -1.0, (0.0, 0.0, 0.0)) == 0.0

    def test_point_mass_all_ones(self, ones4):
        assert h_hat(ones4, -1.0, (1.0, 1.0, 1.0)) == pytest.approx(1.5, rel=1e-14)

    def test_linear_in_the_weights(self, random_spec):
        z = -0.9
        total = h_hat(random_spec, z, (0.5, 1.5, 2.0))
        parts = (
            0.5 * h_hat(random_spec, z, (1, 0, 0))
            + 1.5 * h_hat(random_spec, z, (0, 1, 0))
            + 2.0 * h_hat(random_spec, z, (0, 0, 1))
        )
        assert total == pytest.approx(parts, rel=1e-12)

    def test_matches_rho_combination(self, random_spec):
        z = -2.2
        w = (0.3, 0.2, 0.1)
        expect = sum(w[j] * rho_hat(random_spec, z, j) for j in range(3))
        assert h_hat(random_spec, z, w) == pytest.approx(expect, rel=1e-13)

    def test_negative_prior_rejected(self, two_point):
        with pytest.raises(InvalidPrior):
            h_hat(two_point, -1.0, (-1.0, 0.0, 0.0))
        # x - x^2 dips negative before the top eigenvalue 2
        with pytest.raises(InvalidPrior):
            h_hat(two_point, -1.0, (0.0, 1.0, -1.0))


class TestPriorWeights:
    def test_as_prior_passthrough_and_coercion(self):
        w = PriorWeights(1.0, 2.0, 3.0)
        assert as_prior(w) is w
        assert as_prior((1, 2, 3)) == w

    def test_as_prior_wrong_length(self):
        with pytest.raises(InvalidPrior):
            as_prior((1.0, 2.0))

    def test_canonical_panel(self):
        assert CANONICAL_PANEL == (
            PriorWeights(1.0, 0.0, 0.0),
            PriorWeights(0.0, 1.0, 0.0),
            PriorWeights(0.0, 0.0, 1.0),
        )

    def test_scaled(self):
        assert PriorWeights(1.0, -2.0, 3.0).scaled(2.0) == PriorWeights(2.0, -4.0, 6.0)

    def test_interior_dip_is_caught(self):
        # (x - 1)^2 - 0.5 is negative strictly inside [0, 2] only
        w = PriorWeights(0.5, -2.0, 1.0)
        with pytest.raises(InvalidPrior):
            w.validate_on(2.0)
        w.validate_on(0.2)  # range that misses the dip is fine
