"""Shrinkage-function families applied to residual spectra.

A shrinkage function replaces the inverse residual covariance in classical
invariant test statistics. The families here are scalar functions applied
through the eigendecomposition:

* :class:`Ridge` -- ``1/(x - ell)`` with ``ell < 0``;
* :class:`RidgeMixture` -- a weighted sum of ridge terms;
* :class:`PolyInverse` -- the reciprocal of a cubic (or lower degree)
  polynomial with distinct real negative roots, reducible to a mixture by
  partial fractions;
* :class:`Identity` -- no shrinkage (the trace-statistic baseline);
* :class:`ClassicalInverse` -- the textbook inverse, usable only when the
  spectrum is nonsingular and excluded from standardization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PoleProximity, RootMultiplicity, SingularSpectrum
from .spectrum import POLE_GUARD

ROOT_SEPARATION = 1e-8  # min spacing between polynomial roots


@dataclass(frozen=True)
class Ridge:
    """f(x) = 1/(x - ell), ell < 0."""

    ell: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "ell", float(self.ell))
        if not self.ell < 0.0:
            raise ValueError(f"ridge parameter must be negative, got {self.ell}")

    @property
    def poles(self) -> tuple[float, ...]:
        return (self.ell,)


@dataclass(frozen=True)
class RidgeMixture:
    """f(x) = sum_j w_j / (x - r_j) with every root r_j < 0."""

    terms: tuple[tuple[float, float], ...]  # (root, weight) pairs

    def __post_init__(self) -> None:
        terms = tuple((float(r), float(w)) for r, w in self.terms)
        if not terms:
            raise ValueError("mixture needs at least one term")
        if any(r >= 0.0 for r, _ in terms):
            raise ValueError("all mixture roots must be negative")
        if all(w == 0.0 for _, w in terms):
            raise ValueError("mixture needs at least one nonzero weight")
        object.__setattr__(self, "terms", terms)

    @property
    def roots(self) -> np.ndarray:
        return np.array([r for r, _ in self.terms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.terms])

    @property
    def poles(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.terms)


@dataclass(frozen=True)
class PolyInverse:
    """f(x) = 1/(l0 + l1 x + l2 x^2 + l3 x^3).

    Validated at construction against a working spectral upper bound
    ``support_upper``: the polynomial must be strictly positive on
    ``[0, support_upper]`` and all its roots real and negative. That makes
    ``f`` positive and decreasing on the working range and guarantees a
    partial-fraction reduction to a :class:`RidgeMixture`.
    """

    coeffs: tuple[float, float, float, float]
    support_upper: float

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != 4:
            raise ValueError("coeffs must be (l0, l1, l2, l3)")
        if all(c == 0.0 for c in coeffs):
            raise ValueError("zero polynomial")
        upper = float(self.support_upper)
        if upper <= 0.0:
            raise ValueError("support_upper must be positive")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "support_upper", upper)

        roots = self._compute_roots(coeffs)
        if np.any(np.abs(roots.imag) > 1e-8 * (1.0 + np.abs(roots.real))):
            raise ValueError(f"polynomial has complex roots: {roots}")
        real_roots = np.sort(roots.real)
        if real_roots.size and real_roots.max() >= 0.0:
            raise ValueError(f"polynomial has a nonnegative root: {real_roots}")
        grid = np.linspace(0.0, upper, 257)
        if np.polyval(list(reversed(coeffs)), grid).min() <= 0.0:
            raise ValueError("polynomial is not strictly positive on [0, support_upper]")
        object.__setattr__(self, "_roots", tuple(real_roots))

    @staticmethod
    def _compute_roots(coeffs: tuple[float, ...]) -> np.ndarray:
        # numpy wants highest degree first, with exact-zero leading terms dropped
        desc = list(reversed(coeffs))
        while desc and desc[0] == 0.0:
            desc.pop(0)
        if len(desc) < 2:  # constant polynomial: no roots
            return np.array([], dtype=complex)
        return np.roots(desc)

    @property
    def degree(self) -> int:
        return max(j for j, c in enumerate(self.coeffs) if c != 0.0)

    @property
    def poles(self) -> tuple[float, ...]:
        return self._roots


@dataclass(frozen=True)
class Identity:
    """f(x) = 1; the unregularized trace-statistic baseline."""

    poles: tuple[float, ...] = field(default=(), init=False)


@dataclass(frozen=True)
class ClassicalInverse:
    """f(x) = 1/x; requires a nonsingular spectrum (p < n in practice)."""

    poles: tuple[float, ...] = field(default=(0.0,), init=False)


ShrinkageSpec = Ridge | RidgeMixture | PolyInverse | Identity | ClassicalInverse


def evaluate_f(f: ShrinkageSpec, x):
    """Evaluate the scalar shrinkage function at x (scalar or ndarray).

    Works on real and complex arguments; raises :class:`PoleProximity` when
    any evaluation point sits within the guard distance of a pole of ``f``.
    """
    xx = np.asarray(x)
    if isinstance(f, Identity):
        return np.ones_like(xx, dtype=float if not np.iscomplexobj(xx) else complex)[()]
    poles = np.asarray(f.poles, dtype=float)
    if poles.size:
        dist = np.abs(np.atleast_1d(xx).ravel()[:, None] - poles[None, :])
        if dist.min() <= POLE_GUARD:
            raise PoleProximity(f"evaluation within {POLE_GUARD:g} of a pole of {f}")
    if isinstance(f, Ridge):
        return 1.0 / (xx - f.ell)
    if isinstance(f, RidgeMixture):
        flat = np.atleast_1d(xx).ravel()
        vals = (f.weights[None, :] / (flat[:, None] - f.roots[None, :])).sum(axis=1)
        return vals.reshape(xx.shape) if xx.shape else vals[0]
    if isinstance(f, PolyInverse):
        l0, l1, l2, l3 = f.coeffs
        return 1.0 / (l0 + l1 * xx + l2 * xx**2 + l3 * xx**3)
    if isinstance(f, ClassicalInverse):
        return 1.0 / xx
    raise TypeError(f"not a shrinkage spec: {f!r}")


def shrink_spectrum(eigs: np.ndarray, f: ShrinkageSpec) -> np.ndarray:
    """Apply f elementwise to a vector of eigenvalues (order preserved)."""
    eigs = np.asarray(eigs, dtype=float)
    if isinstance(f, ClassicalInverse) and np.any(np.abs(eigs) <= POLE_GUARD):
        raise SingularSpectrum(
            "classical inverse requires strictly positive eigenvalues "
            "(spectrum has zeros; is p >= n?)"
        )
    return np.asarray(evaluate_f(f, eigs), dtype=float)


def partial_fractions(f: PolyInverse) -> RidgeMixture:
    """Reduce 1/poly to a ridge mixture over the polynomial's simple roots.

    For ``poly = c * prod_j (x - r_j)`` with distinct roots the weights are
    ``w_j = 1 / (c * prod_{i != j} (r_j - r_i))``.
    """
    roots = np.asarray(f.poles, dtype=float)
    if roots.size == 0:
        raise ValueError("constant polynomial has no partial-fraction form")
    diffs = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diffs, np.inf)
    if diffs.min() < ROOT_SEPARATION:
        raise RootMultiplicity(
            f"roots {roots} closer than {ROOT_SEPARATION:g}; repeated-root "
            "partial fractions are not supported"
        )
    lead = f.coeffs[f.degree]
    weights = []
    for j, r in enumerate(roots):
        others = np.delete(roots, j)
        weights.append(1.0 / (lead * np.prod(r - others)) if others.size else 1.0 / lead)
    return RidgeMixture(tuple(zip(roots.tolist(), weights)))
