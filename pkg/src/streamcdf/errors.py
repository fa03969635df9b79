"""Exception hierarchy.

Every error is a ``ValueError`` subclass so callers that only care about
bad input can catch one type.
"""


class StreamCdfError(ValueError):
    pass


class InvalidRange(StreamCdfError):
    pass


class InvalidShares(StreamCdfError):
    pass


class NonFiniteValue(StreamCdfError):
    pass


class GridMismatch(StreamCdfError):
    pass


class NegativeCount(StreamCdfError):
    """A subtraction would drive a counter below zero."""


class CountSaturation(StreamCdfError):
    """A counter would exceed the signed 64-bit range."""


class EmptySketch(StreamCdfError):
    pass


class InvalidProbability(StreamCdfError):
    pass


class InvalidWindowConfig(StreamCdfError):
    pass


class MalformedRecord(StreamCdfError):
    def __init__(self, message, stream_id=None):
        super().__init__(message)
        self.stream_id = stream_id


class InvalidConfig(StreamCdfError):
    pass


class SourceUnavailable(StreamCdfError):
    pass
