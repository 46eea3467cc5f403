"""Independent reference computations used to cross-check the package.

Each function here recomputes a target quantity by a deliberately different
route than the library: alternative algebraic forms, residue sums located by
bracketed root finding, dense parameter scans, random-direction scans, and
brute-force dense linear algebra. Unit tests compare the library against
these so that every nontrivial number is confirmed by two independent
derivations.

Only numpy/scipy are used; nothing here imports the package under test.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


# ---------------------------------------------------------------------------
# resolvent transforms via the reciprocal ("d") form


def d_function(eigs, n, z):
    """1 - (1/n) sum_i lam_i / (lam_i - z).

    Algebraically equal to the reciprocal of the companion transform, but
    written without the Stieltjes transform so it is an independent route.
    """
    eigs = np.asarray(eigs, dtype=float)
    zz = np.asarray(z)
    flat = np.atleast_1d(zz).ravel()
    vals = 1.0 - np.sum(eigs[None, :] / (eigs[None, :] - flat[:, None]), axis=1) / n
    return vals.reshape(zz.shape) if zz.shape else vals[0]


def theta_d(eigs, n, z):
    """Companion transform as the reciprocal of d_function."""
    return 1.0 / d_function(eigs, n, z)


def d_prime(eigs, n, z):
    """Derivative of d_function: -(1/n) sum_i lam_i / (lam_i - z)^2."""
    eigs = np.asarray(eigs, dtype=float)
    return -np.sum(eigs / (eigs - z) ** 2) / n


def theta_poles(eigs, n):
    """All poles of the companion transform, i.e. zeros of d_function.

    d is strictly decreasing between consecutive distinct positive
    eigenvalues (from +inf down to -inf), so each gap brackets exactly one
    simple zero; one more sits in (0, mu_min) because d(0+) = 1 - r/n > 0
    when the number of positive eigenvalues r is strictly below n. The
    r < n requirement keeps every zero strictly inside the spectral hull
    and simple, which this oracle asserts.
    """
    eigs = np.asarray(eigs, dtype=float)
    pos = np.unique(eigs[eigs > 0.0])
    r = int(np.sum(eigs > 0.0))
    if r >= n:
        raise AssertionError("oracle requires fewer positive eigenvalues than n")
    gaps = [(0.0, pos[0])] + [(pos[j], pos[j + 1]) for j in range(pos.size - 1)]
    zeros = []
    for a, b in gaps:
        eps = 1e-11 * (b - a)
        lo, hi = a + eps, b - eps
        flo, fhi = d_function(eigs, n, lo), d_function(eigs, n, hi)
        assert flo > 0.0 > fhi, f"bracket ({a}, {b}) lost the sign change"
        zeros.append(brentq(lambda z: d_function(eigs, n, z), lo, hi, xtol=1e-14))
    return np.asarray(zeros)


def omega_residue(eigs, n, fz):
    """Centering functional as a residue sum over the companion's poles.

    -(1/(2 pi i)) times the counter-clockwise integral of fz(z)(theta(z)-1)
    around the spectrum equals -sum_j fz(z_j)/d'(z_j), because theta = 1/d
    has residue 1/d'(z_j) at each simple zero z_j of d, the -1 term is
    analytic, and fz must be analytic inside the contour.
    """
    return -sum(fz(z0) / d_prime(eigs, n, z0) for z0 in theta_poles(eigs, n))


def delta_two_point(eigs, n, z1, z2):
    """Two-point variance kernel evaluated through the d-form transforms."""
    t1 = theta_d(eigs, n, z1)
    t2 = theta_d(eigs, n, z2)
    return t1 * t2 * ((z1 * t1 - z2 * t2) / (z1 - z2) - 1.0)


def delta_diag_limit(eigs, n, z, h=1e-6):
    """Diagonal of the kernel approximated by a nearby off-diagonal point."""
    return delta_two_point(eigs, n, z, z + h)


# ---------------------------------------------------------------------------
# selection objective by dense scan


def xi_objective(eigs, n, weights, ell):
    """Ridge local-power ratio computed entirely via the d-form route."""
    eigs = np.asarray(eigs, dtype=float)
    ell = np.asarray(ell, dtype=float)
    p = eigs.size
    g = p / n
    diff = eigs[None, :] - ell[:, None]
    m = np.mean(1.0 / diff, axis=1)
    mp = np.mean(1.0 / diff**2, axis=1)
    th = 1.0 / (1.0 - np.sum(eigs[None, :] / diff, axis=1) / n)
    r1 = th * (1.0 + ell * m)
    r2 = th * (eigs.mean() + ell * r1)
    t0, t1, t2 = weights
    h = t0 * m + t1 * r1 + t2 * r2
    diag = g * (1.0 + ell * m) * th**3 + g * ell * (m + ell * mp) * th**4
    return h / np.sqrt(2.0 * diag)


def xi_scan(eigs, n, weights, lo, hi, num=100_000):
    """Dense log-grid maximization of the ridge selection objective."""
    mags = np.geomspace(abs(hi), abs(lo), num)
    xi = xi_objective(eigs, n, weights, -mags)
    i = int(np.argmax(xi))
    return -float(mags[i]), float(xi[i])


def rayleigh_scan(dmat, hvec, rng, num=10_000):
    """Best ratio (w.h)/sqrt(w.D.w) over random directions (sign-free)."""
    dmat = np.asarray(dmat, dtype=float)
    hvec = np.asarray(hvec, dtype=float)
    w = rng.standard_normal((num, hvec.size))
    quad = np.einsum("ij,jk,ik->i", w, dmat, w)
    return float(np.max(np.abs(w @ hvec) / np.sqrt(quad)))


# ---------------------------------------------------------------------------
# dense linear-algebra references for the test pipeline


def manova_constraint_gram(group_sizes):
    """n * C^T (X X^T)^{-1} C for a one-way layout with successive contrasts.

    Built entry by entry from the closed form for diagonal X X^T: the
    (a, a) entry is n (1/n_a + 1/n_{a+1}) and adjacent off-diagonals are
    -n / n_{a+1}; everything else is zero.
    """
    sizes = [float(g) for g in group_sizes]
    k = len(sizes)
    n = sum(sizes) - k
    out = np.zeros((k - 1, k - 1))
    for a in range(k - 1):
        out[a, a] = n * (1.0 / sizes[a] + 1.0 / sizes[a + 1])
        if a + 1 < k - 1:
            out[a, a + 1] = out[a + 1, a] = -n / sizes[a + 1]
    return out


def classical_m_eigs(Y, X, C):
    """Eigenvalues (descending) of the inverse-covariance-weighted
    hypothesis cross-product, from dense textbook matrix formulas.

    Residual covariance S = Y (I - P) Y^T / n with P the design projector,
    hypothesis matrix H = Y X^T (XX^T)^{-1} C [C^T (XX^T)^{-1} C]^{-1}
    C^T (XX^T)^{-1} X Y^T / n, then the spectrum of S^{-1} H through the
    symmetric whitened form.
    """
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    C = np.asarray(C, dtype=float)
    N = X.shape[1]
    n = N - X.shape[0]
    G = X @ X.T
    P = X.T @ np.linalg.solve(G, X)
    S = Y @ (np.eye(N) - P) @ Y.T / n
    A = Y @ X.T
    ginv_c = np.linalg.solve(G, C)
    w0 = C.T @ ginv_c
    H = A @ ginv_c @ np.linalg.solve(w0, ginv_c.T @ A.T) / n
    evals, evecs = np.linalg.eigh(0.5 * (S + S.T))
    whiten = (evecs / np.sqrt(evals)) @ evecs.T
    sym = whiten @ (0.5 * (H + H.T)) @ whiten
    return np.sort(np.linalg.eigvalsh(sym))[::-1]


# ---------------------------------------------------------------------------
# synthetic spectra


def sample_like_spectrum(rng, p, n, low=0.05, high=3.0):
    """Random spectrum attainable by a residual covariance: at most
    min(p, n) positive eigenvalues, exact zeros beyond that."""
    r = min(p, n)
    pos = rng.uniform(low, high, size=r)
    return np.concatenate([pos, np.zeros(p - r)])
