"""Exception hierarchy.

Every error raised by the package derives from :class:`WBuresError`, which is
itself a ``ValueError`` so callers that only care about bad input can catch the
builtin.
"""


class WBuresError(ValueError):
    pass


class NotHermitian(WBuresError):
    pass


class NotPSD(WBuresError):
    pass


class EmptySubset(WBuresError):
    pass


class NotTracePreserving(WBuresError):
    pass


class InvalidAmplitudes(WBuresError):
    pass


class InvalidState(WBuresError):
    pass


class DimensionTooLarge(WBuresError):
    pass


class DimensionMismatch(WBuresError):
    pass


class SingularDirection(WBuresError):
    """The derivative has weight on a direction where the Fisher metric diverges."""


class InvalidPartition(WBuresError):
    pass


class TooLarge(WBuresError):
    pass


class InvalidGate(WBuresError):
    pass


class ParameterOutOfRange(WBuresError):
    pass


class ParseError(WBuresError):
    pass
