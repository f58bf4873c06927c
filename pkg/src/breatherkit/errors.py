"""Exception hierarchy shared by the library and the command-line front end.

Exit codes used by the CLI: 2 config, 3 precondition, 4 solver/verification.
"""


class BreatherkitError(Exception):
    exit_code = 1


class ConfigError(BreatherkitError):
    """Bad user input: config files, mask files, inconsistent parameters."""

    exit_code = 2


class MaskFormatError(ConfigError):
    """Mask file is malformed or violates the volume constraints."""


class PreconditionError(BreatherkitError):
    """A documented precondition of an operation does not hold."""

    exit_code = 3


class BoxTooSmallError(PreconditionError):
    """The spectral shift exceeds 1; the box half-length is below the minimum."""


class SolverError(BreatherkitError):
    exit_code = 4


class ConvergenceError(SolverError):
    """Iterative eigensolver ran out of iterations.

    Carries the best eigenvalue/residual estimates reached so far.
    """

    def __init__(self, message, eigenvalues=None, residuals=None, iterations=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.residuals = residuals
        self.iterations = iterations


class VerificationError(SolverError):
    """A per-realization identity that must hold exactly was violated."""
