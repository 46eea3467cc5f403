"""Multivariate linear-hypothesis testing with spectral shrinkage.

Fits the multivariate linear model Y = B X + E, reduces the hypothesis
B C = 0 to a q-dimensional contrast space, and builds the three classical
invariant criteria (likelihood ratio, Lawley-Hotelling trace,
Bartlett-Nanda-Pillai trace) from the eigenvalues of the shrunken
cross-product matrix. Standardization against the centering/variance
functionals yields asymptotically standard-normal statistics whose upper
tail drives the rejection decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .contour import omega_delta_for
from .errors import (
    DomainError,
    NonPositiveVariance,
    RankDeficientConstraints,
    RankDeficientDesign,
    SingularT,
)
from .shrinkage import ShrinkageSpec, shrink_spectrum
from .spectrum import SpectralSummary

RANK_RTOL = 1e-10        # relative smallest-singular-value cutoff for rank checks
INV_SQRT_FLOOR = 1e-12   # eigenvalue floor in the constraint whitening
CRITERIA = ("LR", "LH", "BNP")


def _normalize_criterion(criterion: str) -> str:
    c = str(criterion).upper()
    if c not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    return c


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GlhtProblem:
    """Observed data Y (p x N), design X (k x N) and constraints C (k x q)."""

    Y: np.ndarray
    X: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        C = np.asarray(self.C, dtype=float)
        if C.ndim == 1:
            C = C[:, None]
        if Y.shape[1] != X.shape[1]:
            raise ValueError(f"Y has {Y.shape[1]} columns but X has {X.shape[1]}")
        k, N = X.shape
        if C.shape[0] != k:
            raise ValueError(f"C has {C.shape[0]} rows but the design has {k}")
        q = C.shape[1]
        if q > k:
            raise ValueError(f"more constraints ({q}) than design rows ({k})")
        if N <= k:
            raise ValueError(f"need more observations ({N}) than design rows ({k})")
        sv_x = np.linalg.svd(X, compute_uv=False)
        if sv_x[0] <= 0.0 or sv_x[-1] <= RANK_RTOL * sv_x[0]:
            raise RankDeficientDesign(
                f"design rows are linearly dependent (singular values {sv_x[-1]:.3e} "
                f"vs {sv_x[0]:.3e})"
            )
        sv_c = np.linalg.svd(C, compute_uv=False)
        if sv_c[0] <= 0.0 or sv_c[-1] <= RANK_RTOL * sv_c[0]:
            raise RankDeficientConstraints(
                f"constraint columns are linearly dependent (singular values "
                f"{sv_c[-1]:.3e} vs {sv_c[0]:.3e})"
            )
        object.__setattr__(self, "Y", _freeze(Y))
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "C", _freeze(C))

    @property
    def p(self) -> int:
        return self.Y.shape[0]

    @property
    def n_obs(self) -> int:
        return self.Y.shape[1]

    @property
    def k(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        return self.C.shape[1]

    @property
    def n(self) -> int:
        return self.n_obs - self.k


@dataclass(frozen=True)
class FitArtifacts:
    """Immutable per-dataset quantities shared by every downstream test.

    ``contrast_basis`` is the N x q orthonormal basis of the hypothesis
    directions, ``projected_y`` = Y @ contrast_basis, and
    (``cov_eigs``, ``cov_vecs``) is the eigendecomposition of the residual
    covariance — thin (p x r with r <= min(p, n)) when the covariance is
    rank deficient, in which case the trailing ``p - r`` entries of
    ``cov_eigs`` are exact zeros whose eigenspace is handled implicitly.
    ``constraint_gram`` is the q x q matrix C^T (XX^T/n)^{-1} C.
    """

    n: int
    contrast_basis: np.ndarray
    projected_y: np.ndarray
    cov_eigs: np.ndarray
    cov_vecs: np.ndarray
    spectrum: SpectralSummary
    constraint_gram: np.ndarray

    @property
    def p(self) -> int:
        return self.projected_y.shape[0]

    @property
    def q(self) -> int:
        return self.projected_y.shape[1]


def fit(problem: GlhtProblem) -> FitArtifacts:
    """Project the data onto the hypothesis space and eigendecompose the
    residual covariance; everything downstream reads from this artifact."""
    Y, X, C = problem.Y, problem.X, problem.C
    p, n = problem.p, problem.n

    gram = X @ X.T
    ginv_c = np.linalg.solve(gram, C)                       # (XX^T)^{-1} C, k x q
    whitener = C.T @ ginv_c
    whitener = 0.5 * (whitener + whitener.T)
    w_eigs, w_vecs = np.linalg.eigh(whitener)
    w_eigs = np.maximum(w_eigs, INV_SQRT_FLOOR)
    inv_sqrt = (w_vecs / np.sqrt(w_eigs)) @ w_vecs.T
    contrast_basis = X.T @ (ginv_c @ inv_sqrt)              # N x q, orthonormal
    constraint_gram = n * whitener

    projected_y = Y @ contrast_basis                        # p x q
    resid = Y - (Y @ X.T) @ np.linalg.solve(gram, X)        # residuals, p x N

    if p <= n:
        cov = (resid @ resid.T) / n
        cov = 0.5 * (cov + cov.T)
        eigs, vecs = np.linalg.eigh(cov)
        eigs, vecs = eigs[::-1], vecs[:, ::-1]
    else:
        # Rank-deficient covariance: eigendecompose the small Gram matrix
        # resid^T resid / n and lift the nonzero eigenvectors; the zero
        # eigenspace never needs an explicit basis.
        small = (resid.T @ resid) / n
        small = 0.5 * (small + small.T)
        s_eigs, s_vecs = np.linalg.eigh(small)
        s_eigs, s_vecs = s_eigs[::-1], s_vecs[:, ::-1]
        tol = max(s_eigs[0], 0.0) * 1e-12
        r = min(int(np.sum(s_eigs > tol)), n)
        vecs = resid @ s_vecs[:, :r]
        vecs /= np.sqrt(n * s_eigs[:r])
        eigs = np.concatenate([s_eigs[:r], np.zeros(p - r)])

    spectrum = SpectralSummary(eigs, n)
    return FitArtifacts(
        n=n,
        contrast_basis=_freeze(contrast_basis),
        projected_y=_freeze(projected_y),
        cov_eigs=spectrum.eigenvalues,
        cov_vecs=_freeze(vecs),
        spectrum=spectrum,
        constraint_gram=_freeze(constraint_gram),
    )


def m_matrix(artifacts: FitArtifacts, f: ShrinkageSpec) -> np.ndarray:
    """Shrunken hypothesis cross-product (1/n) (YQ)^T f(cov) (YQ), q x q."""
    shrunk = shrink_spectrum(artifacts.cov_eigs, f)
    basis = artifacts.cov_vecs
    yq = artifacts.projected_y
    r = basis.shape[1]
    coords = basis.T @ yq                                   # r x q
    m = (coords * shrunk[:r, None]).T @ coords
    if r < artifacts.p:
        # f applied to the zero eigenspace contributes f(0) times the
        # complement Gram block.
        m = m + shrunk[r] * (yq.T @ yq - coords.T @ coords)
    m /= artifacts.n
    return 0.5 * (m + m.T)


def raw_statistics(m_eigs: np.ndarray) -> tuple[float, float, float]:
    """Likelihood-ratio, trace and normalized-trace sums over the m-eigenvalues."""
    eigs = np.asarray(m_eigs, dtype=float)
    if np.any(eigs <= -1.0):
        raise DomainError(f"eigenvalue {eigs.min():g} <= -1 breaks the log criterion")
    lr = float(np.sum(np.log1p(eigs)))
    lh = float(np.sum(eigs))
    bnp = float(np.sum(eigs / (1.0 + eigs)))
    return lr, lh, bnp


def standardize(
    raw: float,
    criterion: str,
    omega: float,
    delta: float,
    q: int,
    n: int,
) -> float:
    """Center and scale a raw criterion to its asymptotically normal form."""
    crit = _normalize_criterion(criterion)
    if not delta > 0.0:
        raise NonPositiveVariance(f"variance functional {delta:g} is not positive")
    scale = math.sqrt(n) / math.sqrt(q * delta)
    if crit == "LH":
        return scale * (raw - q * omega)
    if omega <= -1.0:
        raise DomainError(f"centering {omega:g} <= -1 breaks the {crit} standardization")
    if crit == "LR":
        return scale * (1.0 + omega) * (raw - q * math.log1p(omega))
    return scale * (1.0 + omega) ** 2 * (raw - q * omega / (1.0 + omega))


@dataclass(frozen=True)
class TestOutcome:
    """Full record of one standardized shrinkage test."""

    criterion: str
    f_used: ShrinkageSpec
    m_eigs: np.ndarray
    raw_stat: float
    omega_hat: float
    delta_hat: float
    standardized: float
    p_value: float

    def reject(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def test_from_fit(
    artifacts: FitArtifacts,
    f: ShrinkageSpec,
    criterion: str = "LR",
) -> TestOutcome:
    """Run one standardized test on an existing fit (shared across f's)."""
    crit = _normalize_criterion(criterion)
    m = m_matrix(artifacts, f)
    m_eigs = np.linalg.eigvalsh(m)
    lr, lh, bnp = raw_statistics(m_eigs)
    raw = {"LR": lr, "LH": lh, "BNP": bnp}[crit]
    omega, delta = omega_delta_for(f, artifacts.spectrum)
    standardized = standardize(raw, crit, omega, delta, artifacts.q, artifacts.n)
    return TestOutcome(
        criterion=crit,
        f_used=f,
        m_eigs=_freeze(m_eigs),
        raw_stat=raw,
        omega_hat=omega,
        delta_hat=delta,
        standardized=standardized,
        p_value=float(norm.sf(standardized)),
    )


def run_test(problem: GlhtProblem, f: ShrinkageSpec, criterion: str = "LR") -> TestOutcome:
    """Fit, shrink, standardize: the single-test pipeline end to end."""
    return test_from_fit(fit(problem), f, criterion)


def asymptotic_power(
    xi: float,
    S: np.ndarray,
    constraint_gram: np.ndarray,
    alpha: float = 0.05,
) -> float:
    """Predicted local power Phi(-z_alpha + tr(S S^T T^{-1}) xi / sqrt(q)).

    ``xi`` is the local-power functional of the shrinkage in use, ``S`` the
    q x m local-alternative loading, and ``T`` the constraint Gram matrix.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    T = np.asarray(constraint_gram, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError("constraint_gram must be square")
    T = 0.5 * (T + T.T)
    q = T.shape[0]
    t_eigs = np.linalg.eigvalsh(T)
    if t_eigs[0] <= 1e-12 * max(t_eigs[-1], 1.0):
        raise SingularT(f"constraint Gram matrix has eigenvalue {t_eigs[0]:.3e}")
    S = np.atleast_2d(np.asarray(S, dtype=float))
    ncp = float(np.trace(np.linalg.solve(T, S @ S.T)))
    return float(norm.cdf(-norm.ppf(1.0 - alpha) + ncp * xi / math.sqrt(q)))
