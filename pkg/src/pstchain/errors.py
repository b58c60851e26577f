"""Exception hierarchy.

Domain rejections (the input is well formed but cannot do what was asked) and
numerical failures are kept apart because the command line maps them to
different exit codes.
"""


class PSTError(Exception):
    """Base class for all package errors."""


class DomainError(PSTError):
    """Input is valid but unsupported or rejected on physical grounds."""


class NumericalError(PSTError):
    """A computation lost accuracy or broke down."""


class DegenerateSpectrumError(DomainError, ValueError):
    """Spectrum has repeated eigenvalues; no Jacobi matrix realizes it."""


class SpectrumRejected(DomainError):
    """Spectrum fails the perfect-transfer gap condition.

    Attributes
    ----------
    gap_index : int
        First gap (descending order, 0-based) whose quotient is even.
    quotient : int
        The offending gap quotient.
    """

    def __init__(self, reason, gap_index, quotient):
        super().__init__(reason)
        self.reason = reason
        self.gap_index = gap_index
        self.quotient = quotient


class CertificationIndeterminate(NumericalError):
    """Floating-point gaps could not be rationalized within tolerance."""


class NumericalDegeneracyError(NumericalError):
    """Two computed eigenvalues are closer than the resolvable spacing."""


class NumericRangeError(NumericalError, OverflowError):
    """Intermediate quantities left the floating-point range."""


class ConditioningError(NumericalError):
    """Spectral weights cannot be formed reliably.

    ``pair`` holds the indices of the offending eigenvalues.
    """

    def __init__(self, message, pair):
        super().__init__(message)
        self.pair = pair


class ReconstructionBreakdown(NumericalError):
    """Lanczos recurrence produced a non-positive coupling."""


class UnsupportedSiteError(DomainError, ValueError):
    """Site is its own mirror image, so no two-qubit pair exists."""


class UnsupportedStatisticsError(DomainError):
    """Operation is defined only for the other particle statistics."""


class TruncationError(NumericalError):
    """Mode expansion leaves too much norm outside the retained modes."""

    def __init__(self, message, tail):
        super().__init__(message)
        self.tail = tail
