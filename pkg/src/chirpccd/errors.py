"""Exception types raised across the toolkit."""


class CcdError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(CcdError, ValueError):
    pass


class InvalidData(CcdError, ValueError):
    pass


class FrameSkipped(CcdError):
    """The requested analysis window does not fit inside the signal."""


class DegenerateSearch(CcdError):
    """No radius plateau of length >= 2 was found."""


class OracleUnavailable(CcdError):
    """Root finding failed or the frame is outside the oracle's range."""


class BoundaryDegenerate(CcdError):
    """A root lies on the separating circle."""


class FeatureUnavailable(CcdError):
    """A voice-quality feature cannot be measured on this frame."""


class EmptyOutput(CcdError):
    pass
