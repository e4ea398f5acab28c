"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid experiment or estimator configuration (CLI exit code 2)."""


class AccuracyError(RuntimeError):
    """A numerical accuracy contract could not be met (CLI exit code 3).

    Raised for quadrature non-convergence, imaginary residues above
    tolerance on real-flagged synthesis, and rejection-sampling
    acceptance rates too low to be usable.
    """


class SingularMatrixError(ArithmeticError):
    """A block matrix is numerically singular and cannot be inverted."""
