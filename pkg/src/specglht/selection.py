"""Data-driven choice of the shrinkage parameter.

The selector maximizes the empirical local-power ratio ``xi = h / sqrt(delta)``
over a family of candidate shrinkage functions: a log-spaced grid of ridge
parameters refined by golden-section search (``select_ridge``), or reciprocal
cubics re-parametrized as three-term ridge mixtures whose weights admit a
closed-form generalized-Rayleigh optimum (``select_higher_order``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .contour import (
    Contour,
    contour_nodes,
    default_contour,
    delta_hat_ridge,
    omega_delta_for,
    validate_contour,
)
from .errors import NonPositiveVariance, SingularD, ZeroSpectrum
from .shrinkage import (
    ClassicalInverse,
    Ridge,
    RidgeMixture,
    ShrinkageSpec,
    evaluate_f,
)
from .spectrum import PriorWeights, SpectralSummary, as_prior, delta_kernel_hat, h_hat

VARIANCE_FLOOR = 1e-14      # delta below this is treated as degenerate
GOLDEN_TOL = 1e-9           # absolute window tolerance on log|ell|
DEFAULT_GRID_SIZE = 100
DEFAULT_ROOT_GRID = 12
ROOT_SEPARATION_FRACTION = 1e-3   # of |lo|, between roots within one triple


@dataclass(frozen=True)
class RidgeBounds:
    """Search interval [lo, hi] for the ridge parameter, both negative."""

    lo: float
    hi: float
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "grid_size", int(self.grid_size))
        if not (self.lo < self.hi < 0.0):
            raise ValueError(f"need lo < hi < 0, got lo={self.lo}, hi={self.hi}")
        if self.grid_size < 16:
            raise ValueError(f"grid_size must be >= 16, got {self.grid_size}")


@dataclass(frozen=True)
class SelectionResult:
    """Winning shrinkage, its ratio value, and every candidate evaluated."""

    f_star: ShrinkageSpec
    xi_star: float
    trace: tuple

    def best_parameter(self):
        if isinstance(self.f_star, Ridge):
            return self.f_star.ell
        return self.f_star


def xi_hat_ridge(spec: SpectralSummary, ell, weights: PriorWeights):
    """Local-power ratio of a ridge shrinkage: h(ell) / sqrt(delta(ell, ell)).

    Accepts a scalar or an array of ridge parameters (all negative).
    """
    weights = as_prior(weights)
    ell_arr = np.asarray(ell, dtype=float)
    if np.any(ell_arr >= 0.0):
        raise ValueError("ridge parameters must be negative")
    numer = np.real(h_hat(spec, ell_arr, weights))
    denom = np.real(2.0 * delta_kernel_hat(spec, ell_arr, ell_arr))
    if np.any(denom <= VARIANCE_FLOOR):
        raise NonPositiveVariance(
            f"variance functional at ell={ell_arr} fell below {VARIANCE_FLOOR:g}"
        )
    out = numer / np.sqrt(denom)
    return float(out) if np.isscalar(ell) or ell_arr.ndim == 0 else out


def xi_hat_general(
    spec: SpectralSummary,
    f: ShrinkageSpec,
    weights: PriorWeights,
    c: Contour | None = None,
) -> float:
    """Local-power ratio for any analytic shrinkage via contour quadrature.

    Ridge mixtures collapse by the Cauchy integral formula to the weighted
    sum of h at the mixture roots, skipping quadrature entirely.
    """
    weights = as_prior(weights)
    if isinstance(f, ClassicalInverse):
        raise ValueError("classical inverse has no variance functional to divide by")
    _, delta = omega_delta_for(f, spec)
    if delta <= VARIANCE_FLOOR:
        raise NonPositiveVariance(f"variance functional {delta:g} below {VARIANCE_FLOOR:g}")
    if isinstance(f, RidgeMixture):
        numer = float(f.weights @ np.real(h_hat(spec, f.roots, weights)))
        return numer / math.sqrt(delta)
    if c is None:
        c = default_contour(spec, f)
    validate_contour(c, spec, f)
    z, w = contour_nodes(c)
    integrand = evaluate_f(f, z) * h_hat(spec, z, weights)
    raw = complex(np.sum(w * integrand) * (-1.0 / (2j * math.pi)))
    numer = raw.real
    if abs(raw.imag) > 1e-6 * (1.0 + abs(raw)):
        from .errors import NonRealResult

        raise NonRealResult(f"ratio numerator kept imaginary residue {raw.imag:.3e}")
    return numer / math.sqrt(delta)


def default_ridge_bounds(spec: SpectralSummary, grid_size: int = DEFAULT_GRID_SIZE) -> RidgeBounds:
    """Scale-aware search window: 20x the top eigenvalue down to 1% of the
    mean eigenvalue."""
    if spec.lambda_max <= 0.0:
        raise ZeroSpectrum("all eigenvalues are zero; no scale for the search window")
    return RidgeBounds(-20.0 * spec.lambda_max, -spec.trace_mean / 100.0, grid_size)


def _better(xi_new: float, mag_new: float, xi_old: float, mag_old: float) -> bool:
    """Strict improvement, with exact ties resolved toward lighter shrinkage."""
    if xi_new > xi_old:
        return True
    return xi_new == xi_old and mag_new < mag_old


def select_ridge(
    spec: SpectralSummary,
    weights: PriorWeights,
    bounds: RidgeBounds | None = None,
) -> SelectionResult:
    """Grid-then-refine maximization of the ridge local-power ratio.

    A log-spaced grid over the parameter magnitude is scanned first; a
    golden-section search on log-magnitude then refines inside the cell
    bracketing the grid winner. The trace records the grid pass plus the one
    refined point, so the reported maximum is the maximum over the trace.
    """
    weights = as_prior(weights)
    if bounds is None:
        bounds = default_ridge_bounds(spec)
    mags = np.geomspace(abs(bounds.hi), abs(bounds.lo), bounds.grid_size)
    xi_grid = xi_hat_ridge(spec, -mags, weights)
    xi_grid = np.atleast_1d(xi_grid)

    best_i = 0
    for i in range(1, bounds.grid_size):
        if _better(xi_grid[i], mags[i], xi_grid[best_i], mags[best_i]):
            best_i = i
    grid_xi = float(xi_grid[best_i])
    grid_mag = float(mags[best_i])

    log_mags = np.log(mags)
    lo_u = log_mags[max(best_i - 1, 0)]
    hi_u = log_mags[min(best_i + 1, bounds.grid_size - 1)]
    ref_u, ref_xi = _golden_max(
        lambda u: float(xi_hat_ridge(spec, -math.exp(u), weights)),
        lo_u,
        hi_u,
        seed=(math.log(grid_mag), grid_xi),
    )
    ref_mag = math.exp(ref_u)

    trace = [(-float(m), float(x)) for m, x in zip(mags, xi_grid)]
    trace.append((-ref_mag, ref_xi))
    if _better(ref_xi, ref_mag, grid_xi, grid_mag):
        star_mag, star_xi = ref_mag, ref_xi
    else:
        star_mag, star_xi = grid_mag, grid_xi
    return SelectionResult(f_star=Ridge(-star_mag), xi_star=star_xi, trace=tuple(trace))


def _golden_max(fun, a: float, b: float, seed: tuple[float, float]) -> tuple[float, float]:
    """Golden-section maximization on [a, b], returning the best point ever
    evaluated (seeded with an already-known point so the result can never be
    worse than the incumbent)."""
    best_u, best_f = seed
    if b - a <= GOLDEN_TOL:
        return best_u, best_f
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for u, fv in ((x1, f1), (x2, f2)):
        if _better(fv, math.exp(u), best_f, math.exp(best_u)):
            best_u, best_f = u, fv
    while b - a > GOLDEN_TOL:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = fun(x1)
            u, fv = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = fun(x2)
            u, fv = x2, f2
        if _better(fv, math.exp(u), best_f, math.exp(best_u)):
            best_u, best_f = u, fv
    return best_u, best_f


def select_higher_order(
    spec: SpectralSummary,
    weights: PriorWeights,
    bounds: RidgeBounds | None = None,
    root_grid_size: int = DEFAULT_ROOT_GRID,
) -> SelectionResult:
    """Maximize the ratio over three-term ridge mixtures on a root grid.

    For a fixed root triple the ratio is a generalized Rayleigh quotient in
    the mixture weights, so the inner optimum is closed form:
    ``w proportional to D^{-1} h`` with value ``sqrt(h^T D^{-1} h)`` where
    ``D`` is the pairwise variance kernel. Pure single-root candidates are
    evaluated with the identical ridge formula and enter the same comparison,
    so the winner can never fall below the best single ridge on the grid.
    Triples with a numerically singular kernel are skipped.
    """
    weights = as_prior(weights)
    if bounds is None:
        bounds = default_ridge_bounds(spec)
    if root_grid_size < 1:
        raise ValueError("root_grid_size must be >= 1")
    mags = np.geomspace(abs(bounds.hi), abs(bounds.lo), root_grid_size)
    roots = -mags                      # ordered by increasing magnitude
    h_vec = np.real(h_hat(spec, roots, weights))
    kernel = np.real(2.0 * delta_kernel_hat(spec, roots[:, None], roots[None, :]))
    diag = np.diag(kernel).copy()
    if np.any(diag <= VARIANCE_FLOOR):
        raise NonPositiveVariance("variance functional degenerate on the root grid")

    trace: list = []
    best_f: ShrinkageSpec | None = None
    best_xi = -math.inf
    best_mag = math.inf

    for i in range(root_grid_size):
        xi = float(h_vec[i] / math.sqrt(diag[i]))
        trace.append((float(roots[i]), xi))
        if _better(xi, mags[i], best_xi, best_mag):
            best_xi, best_mag = xi, float(mags[i])
            best_f = Ridge(float(roots[i]))

    min_sep = ROOT_SEPARATION_FRACTION * abs(bounds.lo)
    for ix in combinations(range(root_grid_size), 3):
        r3 = roots[list(ix)]          # decreasing values (increasing magnitude)
        if r3[0] - r3[1] < min_sep or r3[1] - r3[2] < min_sep:
            continue
        try:
            w3, xi = _rayleigh_weights(kernel[np.ix_(ix, ix)], h_vec[list(ix)])
        except SingularD:
            continue
        trace.append((tuple(float(r) for r in r3), xi))
        mag = float(abs(r3).max())
        if _better(xi, mag, best_xi, best_mag):
            best_xi, best_mag = xi, mag
            terms = tuple(sorted(zip((float(r) for r in r3), (float(w) for w in w3))))
            best_f = RidgeMixture(terms)

    assert best_f is not None
    return SelectionResult(f_star=best_f, xi_star=best_xi, trace=tuple(trace))


def _rayleigh_weights(d3: np.ndarray, h3: np.ndarray) -> tuple[np.ndarray, float]:
    """Closed-form maximizer of (w.h) / sqrt(w.D.w) for one root triple."""
    eigs = np.linalg.eigvalsh(d3)
    if eigs[0] <= 1e-12 * max(eigs[-1], 0.0):
        raise SingularD(f"variance kernel eigenvalue {eigs[0]:.3e} is numerically singular")
    sol = np.linalg.solve(d3, h3)
    xi_sq = float(h3 @ sol)
    if not xi_sq > 0.0 or not math.isfinite(xi_sq):
        raise SingularD(f"quadratic form {xi_sq:g} is not positive")
    w = sol / np.max(np.abs(sol))
    return w, math.sqrt(xi_sq)
