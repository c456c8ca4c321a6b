"""Exception types raised across the package."""


class DhoError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(DhoError, ValueError):
    pass


class NotAContraction(DhoError, ValueError):
    pass


class ResourceLimit(DhoError):
    pass


class DegenerateTransformation(DhoError):
    """The transformed annihilators share no common kernel."""

    def __init__(self, message, smallest_singular_value):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class WindowTooSmall(DhoError):
    pass


class TruncationInsufficient(DhoError):
    pass


class InconsistentGenerator(DhoError):
    pass
