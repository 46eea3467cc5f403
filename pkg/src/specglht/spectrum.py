"""Empirical spectral summaries and their plug-in resolvent transforms.

Everything downstream (centering constants, variances, selection objectives)
is a pure function of the residual spectrum through the transforms defined
here: the empirical Stieltjes transform, its derivative, the companion
transform ``theta_hat``, the two-point covariance kernel ``delta_kernel_hat``,
the moment recursion ``rho_hat`` and the prior-weighted combination ``h_hat``.

Only plug-in (finite ``n``, ``p``) versions exist; the corresponding
population limits are not computable from data and are deliberately not
represented.

All functions accept a real or complex scalar ``z`` (or an ndarray of them)
and broadcast; evaluation points must stay away from the sample eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, InvalidPrior, PoleProximity

# Numerical guards shared by the transform family.
POLE_GUARD = 1e-12        # min |z - eigenvalue| before refusing to evaluate
DENOM_GUARD = 1e-12       # min |companion denominator|
COINCIDENT_TOL = 1e-8     # |z1 - z2| below which the diagonal kernel is used
EIG_CLAMP_TOL = 1e-10     # eigenvalues in [-EIG_CLAMP_TOL, 0) clamp to 0


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of a residual covariance plus their sample-size context.

    Parameters
    ----------
    eigenvalues : array_like
        The ``p`` eigenvalues. Stored sorted descending; values in
        ``[-1e-10, 0)`` are clamped to zero, anything more negative is
        rejected.
    n : int
        Effective sample size (observations minus design rank).
    """

    eigenvalues: np.ndarray
    n: int

    def __post_init__(self) -> None:
        eigs = np.asarray(self.eigenvalues, dtype=float).ravel()
        if eigs.size == 0:
            raise ValueError("need at least one eigenvalue")
        if int(self.n) < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if np.any(eigs < -EIG_CLAMP_TOL):
            raise ValueError(
                f"eigenvalue {eigs.min():.3e} below the clamp tolerance "
                f"-{EIG_CLAMP_TOL:g}; not a PSD spectrum"
            )
        eigs = np.where(eigs < 0.0, 0.0, eigs)
        eigs = np.sort(eigs)[::-1].copy()
        eigs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", eigs)
        object.__setattr__(self, "n", int(self.n))

    @property
    def p(self) -> int:
        return self.eigenvalues.size

    @property
    def gamma_n(self) -> float:
        """Dimension-to-sample-size ratio p/n."""
        return self.p / self.n

    @property
    def trace_mean(self) -> float:
        """Mean eigenvalue, p^{-1} tr of the underlying matrix."""
        return float(self.eigenvalues.mean())

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])


@dataclass(frozen=True)
class PriorWeights:
    """Coefficients (t0, t1, t2) of the quadratic prior t0 + t1*x + t2*x^2.

    The quadratic must be nonnegative on the working spectral range
    ``[0, lambda_max]``; this is checked at use time via
    :meth:`validate_on`, because the range depends on the data.
    """

    t0: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for name in ("t0", "t1", "t2"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.t0, self.t1, self.t2])

    def poly(self, x: np.ndarray) -> np.ndarray:
        return self.t0 + self.t1 * np.asarray(x) + self.t2 * np.asarray(x) ** 2

    def validate_on(self, lam_max: float, tol: float = 1e-12) -> None:
        """Check nonnegativity of the quadratic on [0, lam_max]."""
        candidates = [0.0, float(lam_max)]
        if self.t2 != 0.0:
            vertex = -self.t1 / (2.0 * self.t2)
            if 0.0 < vertex < lam_max:
                candidates.append(vertex)
        low = min(self.poly(np.array(candidates)))
        if low < -tol:
            raise InvalidPrior(
                f"prior weights {(self.t0, self.t1, self.t2)} dip to "
                f"{low:.3e} on [0, {lam_max:g}]"
            )

    def scaled(self, c: float) -> "PriorWeights":
        return PriorWeights(c * self.t0, c * self.t1, c * self.t2)


#: The canonical three-weight panel: pure inverse-trace, linear, quadratic priors.
CANONICAL_PANEL: tuple[PriorWeights, ...] = (
    PriorWeights(1.0, 0.0, 0.0),
    PriorWeights(0.0, 1.0, 0.0),
    PriorWeights(0.0, 0.0, 1.0),
)


def as_prior(weights) -> PriorWeights:
    """Coerce a PriorWeights or length-3 sequence into PriorWeights."""
    if isinstance(weights, PriorWeights):
        return weights
    t = tuple(float(w) for w in weights)
    if len(t) != 3:
        raise InvalidPrior(f"prior weights need exactly 3 entries, got {len(t)}")
    return PriorWeights(*t)


def _check_poles(spec: SpectralSummary, z: np.ndarray) -> None:
    dist = np.abs(spec.eigenvalues[None, :] - np.atleast_1d(z).ravel()[:, None])
    if dist.min() <= POLE_GUARD:
        bad = np.atleast_1d(z).ravel()[np.argmin(dist.min(axis=1))]
        raise PoleProximity(
            f"evaluation point {bad} within {POLE_GUARD:g} of a sample eigenvalue"
        )


def stieltjes(spec: SpectralSummary, z):
    """Empirical Stieltjes transform p^{-1} sum_i 1/(lambda_i - z)."""
    zz = np.asarray(z, dtype=complex if np.iscomplexobj(z) else float)
    _check_poles(spec, zz)
    flat = np.atleast_1d(zz).ravel()
    vals = np.mean(1.0 / (spec.eigenvalues[None, :] - flat[:, None]), axis=1)
    return vals.reshape(zz.shape) if zz.shape else vals[0]


def stieltjes_deriv(spec: SpectralSummary, z):
    """Derivative of the empirical Stieltjes transform, p^{-1} sum 1/(lambda_i - z)^2."""
    zz = np.asarray(z, dtype=complex if np.iscomplexobj(z) else float)
    _check_poles(spec, zz)
    flat = np.atleast_1d(zz).ravel()
    vals = np.mean(1.0 / (spec.eigenvalues[None, :] - flat[:, None]) ** 2, axis=1)
    return vals.reshape(zz.shape) if zz.shape else vals[0]


def theta_hat(spec: SpectralSummary, z):
    """Companion transform 1 / (1 - gamma_n - gamma_n * z * m_{n,p}(z)).

    This is the deterministic-equivalent scaling that converts the resolvent
    of the residual covariance into the population one in trace functionals.
    """
    m = stieltjes(spec, z)
    den = 1.0 - spec.gamma_n - spec.gamma_n * np.asarray(z) * m
    if np.min(np.abs(np.atleast_1d(den))) <= DENOM_GUARD:
        raise DegenerateDenominator(
            f"companion denominator below {DENOM_GUARD:g} at z={z}"
        )
    return 1.0 / den


def delta_kernel_hat(spec: SpectralSummary, z1, z2):
    """Two-point covariance kernel of the limiting matrix fluctuation.

    For separated arguments this is
    ``Theta(z1) Theta(z2) [ (z1 Theta(z1) - z2 Theta(z2)) / (z1 - z2) - 1 ]``;
    within ``COINCIDENT_TOL`` of the diagonal the removable singularity is
    replaced by its analytic limit
    ``gamma (1 + z m) Theta^3 + gamma z (m + z m') Theta^4``.
    """
    a1 = np.asarray(z1)
    a2 = np.asarray(z2)
    shape = np.broadcast_shapes(a1.shape, a2.shape)
    b1 = np.broadcast_to(a1, shape).ravel()
    b2 = np.broadcast_to(a2, shape).ravel()
    out = np.empty(shape, dtype=complex).ravel()
    close = np.abs(b1 - b2) < COINCIDENT_TOL
    if np.any(close):
        zc = b1[close]
        out[close] = _delta_diag(spec, zc)
    if np.any(~close):
        za, zb = b1[~close], b2[~close]
        t1 = theta_hat(spec, za)
        t2 = theta_hat(spec, zb)
        out[~close] = t1 * t2 * ((za * t1 - zb * t2) / (za - zb) - 1.0)
    out = out.reshape(shape)
    if not (np.iscomplexobj(a1) or np.iscomplexobj(a2)):
        out = out.real
    return out if shape else out[()]


def _delta_diag(spec: SpectralSummary, z):
    """Diagonal limit of the two-point kernel."""
    g = spec.gamma_n
    m = stieltjes(spec, z)
    md = stieltjes_deriv(spec, z)
    th = theta_hat(spec, z)
    return g * (1.0 + z * m) * th**3 + g * z * (m + z * md) * th**4


def rho_hat(spec: SpectralSummary, z, j: int):
    """Plug-in moment transforms rho_0, rho_1, rho_2 at z.

    ``rho_0 = m_{n,p}(z)``, and ``rho_{j+1} = Theta(z) (tau_j + z rho_j)``
    where ``tau_j`` is the j-th spectral moment (``tau_0 = 1``,
    ``tau_1 = trace_mean``). These are the building blocks of the selection
    objective for polynomial priors.
    """
    if j == 0:
        return stieltjes(spec, z)
    if j == 1:
        return theta_hat(spec, z) * (1.0 + np.asarray(z) * stieltjes(spec, z))
    if j == 2:
        r1 = rho_hat(spec, z, 1)
        return theta_hat(spec, z) * (spec.trace_mean + np.asarray(z) * r1)
    raise ValueError(f"rho_hat defined for j in {{0,1,2}}, got {j}")


def h_hat(spec: SpectralSummary, z, weights):
    """Prior-weighted transform t0*rho_0 + t1*rho_1 + t2*rho_2 at z."""
    w = as_prior(weights)
    w.validate_on(spec.lambda_max)
    m = stieltjes(spec, z)
    th = theta_hat(spec, z)
    zz = np.asarray(z)
    r1 = th * (1.0 + zz * m)
    r2 = th * (spec.trace_mean + zz * r1)
    return w.t0 * m + w.t1 * r1 + w.t2 * r2
