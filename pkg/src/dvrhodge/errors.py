"""Exception types raised across the package."""


class DvrError(ValueError):
    """Base class for all library errors."""


class NotAUnitError(DvrError):
    pass


class NotTorsionError(DvrError):
    pass


class NotTorsionFreeError(DvrError):
    pass


class NotInjectiveError(DvrError):
    pass


class NotAComplexError(DvrError):
    pass


class InvalidFiltrationError(DvrError):
    pass


class PreconditionError(DvrError):
    """An operation's hypothesis does not hold for the given input."""


class DimensionMismatchError(DvrError):
    pass


class InputError(DvrError):
    """Malformed or semantically invalid input document.

    ``location`` is a human readable pointer (line/column or a JSON path).
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
