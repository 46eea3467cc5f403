"""Exception types raised across the package.

Every numerical guard in the library maps to one of these so callers (and the
CLI exit-code contract) can distinguish validation problems from numerical
breakdown.
"""


class SpecGlhtError(Exception):
    """Base class for all package-specific errors."""


class PoleProximity(SpecGlhtError):
    """An evaluation point lies within the guard distance of a spectral pole."""


class DegenerateDenominator(SpecGlhtError):
    """The companion-transform denominator is numerically zero."""


class ContourViolation(SpecGlhtError):
    """A quadrature rectangle fails to enclose the spectrum or grazes a pole."""


class NonRealResult(SpecGlhtError):
    """A contour integral kept a non-negligible imaginary residue."""


class RootMultiplicity(SpecGlhtError):
    """Polynomial roots are too close together for partial fractions."""


class SingularSpectrum(SpecGlhtError):
    """An operation requiring strictly positive eigenvalues met a zero one."""


class UnsupportedStandardization(SpecGlhtError):
    """The requested shrinkage has no asymptotic centering/variance theory."""


class RankDeficientDesign(SpecGlhtError):
    """The design matrix X does not have full row rank."""


class RankDeficientConstraints(SpecGlhtError):
    """The constraint matrix C does not have full column rank."""


class DomainError(SpecGlhtError):
    """A statistic was requested outside its mathematical domain."""


class NonPositiveVariance(SpecGlhtError):
    """A plug-in variance needed for standardization is not positive."""


class SingularT(SpecGlhtError):
    """The design limit matrix T is singular."""


class ZeroSpectrum(SpecGlhtError):
    """All eigenvalues are zero; scale-dependent defaults are undefined."""


class SingularD(SpecGlhtError):
    """A mixture-weight kernel matrix is singular."""


class InvalidPrior(SpecGlhtError):
    """Prior weights whose quadratic goes negative on the spectral support."""


class ConfigError(SpecGlhtError):
    """An invalid simulation or CLI configuration."""


class IoError(SpecGlhtError):
    """Reading or writing a results/config file failed."""
