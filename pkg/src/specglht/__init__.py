"""Shrinkage-regularized tests of linear hypotheses for high-dimensional data.

The package tests H0: B C = 0 in the multivariate linear model Y = B X + E
when the dimension p is comparable to (or larger than) the residual degrees
of freedom. Classical invariant criteria are rebuilt from a spectrally
shrunken residual covariance, standardized with random-matrix centering and
variance functionals, and the shrinkage itself can be chosen from data to
maximize an empirical local-power ratio — per prior weighting or jointly
through a bootstrap-calibrated max statistic.
"""

from .backend import BACKEND, backend_name
from .composite import (
    CompositeConfig,
    CompositeOutcome,
    bootstrap_pvalue,
    composite_from_fit,
    delta_star,
    psd_project,
    run_composite,
)
from .contour import (
    Contour,
    contour_nodes,
    default_contour,
    delta_hat_numeric,
    delta_hat_ridge,
    omega_delta_for,
    omega_hat_numeric,
    omega_hat_ridge,
    validate_contour,
)
from .errors import (
    ConfigError,
    ContourViolation,
    DegenerateDenominator,
    DomainError,
    InvalidPrior,
    IoError,
    NonPositiveVariance,
    NonRealResult,
    PoleProximity,
    RankDeficientConstraints,
    RankDeficientDesign,
    RootMultiplicity,
    SingularD,
    SingularSpectrum,
    SingularT,
    SpecGlhtError,
    UnsupportedStandardization,
    ZeroSpectrum,
)
from .glht import (
    CRITERIA,
    FitArtifacts,
    GlhtProblem,
    TestOutcome,
    asymptotic_power,
    fit,
    m_matrix,
    raw_statistics,
    run_test,
    standardize,
    test_from_fit,
)
from .selection import (
    RidgeBounds,
    SelectionResult,
    default_ridge_bounds,
    select_higher_order,
    select_ridge,
    xi_hat_general,
    xi_hat_ridge,
)
from .shrinkage import (
    ClassicalInverse,
    Identity,
    PolyInverse,
    Ridge,
    RidgeMixture,
    evaluate_f,
    partial_fractions,
    shrink_spectrum,
)
from .simlab import (
    AlternativeModel,
    CovFactor,
    CovModel,
    SimConfig,
    SimResult,
    SimRow,
    TestSpec,
    empirical_size,
    generate_Y,
    load,
    make_B,
    make_design,
    make_sigma,
    persist,
    power_curve,
)
from .spectrum import (
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

__version__ = "1.0.0"

__all__ = [
    "AlternativeModel",
    "BACKEND",
    "CANONICAL_PANEL",
    "CRITERIA",
    "ClassicalInverse",
    "CompositeConfig",
    "CompositeOutcome",
    "ConfigError",
    "Contour",
    "ContourViolation",
    "CovFactor",
    "CovModel",
    "DegenerateDenominator",
    "DomainError",
    "FitArtifacts",
    "GlhtProblem",
    "Identity",
    "InvalidPrior",
    "IoError",
    "NonPositiveVariance",
    "NonRealResult",
    "PolyInverse",
    "PoleProximity",
    "PriorWeights",
    "RankDeficientConstraints",
    "RankDeficientDesign",
    "Ridge",
    "RidgeBounds",
    "RidgeMixture",
    "RootMultiplicity",
    "SelectionResult",
    "SimConfig",
    "SimResult",
    "SimRow",
    "SingularD",
    "SingularSpectrum",
    "SingularT",
    "SpecGlhtError",
    "SpectralSummary",
    "TestOutcome",
    "TestSpec",
    "UnsupportedStandardization",
    "ZeroSpectrum",
    "as_prior",
    "asymptotic_power",
    "backend_name",
    "bootstrap_pvalue",
    "composite_from_fit",
    "contour_nodes",
    "default_contour",
    "default_ridge_bounds",
    "delta_hat_numeric",
    "delta_hat_ridge",
    "delta_kernel_hat",
    "delta_star",
    "empirical_size",
    "evaluate_f",
    "fit",
    "generate_Y",
    "h_hat",
    "load",
    "m_matrix",
    "make_B",
    "make_design",
    "make_sigma",
    "omega_delta_for",
    "omega_hat_numeric",
    "omega_hat_ridge",
    "partial_fractions",
    "persist",
    "power_curve",
    "psd_project",
    "raw_statistics",
    "rho_hat",
    "run_composite",
    "run_test",
    "select_higher_order",
    "select_ridge",
    "shrink_spectrum",
    "standardize",
    "stieltjes",
    "stieltjes_deriv",
    "test_from_fit",
    "theta_hat",
    "validate_contour",
    "xi_hat_general",
    "xi_hat_ridge",
]
