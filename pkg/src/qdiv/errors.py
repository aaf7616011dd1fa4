"""Exception types raised by the toolkit."""


class QdivError(Exception):
    """Base class for all toolkit errors."""


class KernelSingularity(QdivError):
    """A spectral function was asked to act on a kernel where it is undefined."""


class NonConvergence(QdivError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ComputationInconsistent(QdivError):
    """Two independent computation paths disagree beyond tolerance."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class EquivalenceViolation(QdivError):
    """Two positive functionals do not have equal supports."""
