"""Exception types shared by all solver modules."""


class MutualControlError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(MutualControlError):
    """A state vector or trajectory does not match the expected dimension."""


class TimeOutOfRange(MutualControlError):
    """A semigroup evaluation time lies outside the supported [0, 2T] window."""


class SingularOrNotConvergent(MutualControlError):
    """I - M cannot certify a contraction: M is not convergent to zero."""


class InvalidCoefficients(MutualControlError):
    """Coefficients violate a11 < 1 or a22 < 1/T, so the theta search is undefined."""


class MatrixNotConvergent(MutualControlError):
    """Certification failed: the contraction matrix has spectral radius >= 1."""


class InnerNotContractive(MutualControlError):
    """The inner y-iteration factor a22*C_A*(1-e^{-theta T})/theta is >= 1."""


class _IterationError(MutualControlError):
    """Non-convergence carrying the partial solve report for honest diagnostics."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MaxIterExceeded(_IterationError):
    """Residuals did not fall below the tolerance within max_iter sweeps."""


class OuterNotConverged(_IterationError):
    """The outer damped fixed-point loop on (alpha, beta) did not settle."""


class SchemaError(MutualControlError):
    """A configuration document is malformed or contains unknown keys."""


class RangeError(MutualControlError):
    """A configuration value lies outside its admissible range."""


class CertificationWarning(UserWarning):
    """A sufficient certification condition is violated; the run proceeds anyway."""
