"""Exception hierarchy shared by every stage of the pipeline."""


class LobError(Exception):
    """Base class for all package errors."""


class InputError(LobError, ValueError):
    """Malformed or inconsistent input (maps to CLI exit code 2)."""


class InsufficientData(LobError):
    """Not enough samples for the requested estimate (CLI exit code 3)."""


# -- book engine -------------------------------------------------------------


class BookError(InputError):
    """An event could not be applied. ``offset`` is its position in the log."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"event {offset}: {message}"
        super().__init__(message)


class CancelOnEmptyLevel(BookError):
    pass


class ExecuteBeyondDepth(BookError):
    pass


class NegativeVolume(BookError):
    pass


class EmptySide(LobError):
    """One side of the book holds no orders; the mid-price is undefined."""

    def __init__(self, side):
        self.side = side
        super().__init__(f"no resting orders on the {side} side")


# -- event log parsing -------------------------------------------------------


class EventLogError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRow(EventLogError):
    pass


class NonMonotonicTimestamp(EventLogError):
    pass


class UnknownAction(EventLogError):
    pass


# -- estimators ----------------------------------------------------------------


class TooShort(InsufficientData):
    pass


class DegenerateRange(InsufficientData):
    pass


class DegenerateVariance(InsufficientData):
    def __init__(self, message, gamma=None):
        self.gamma = gamma
        super().__init__(message)


class NoSignChange(InsufficientData):
    pass


class NoPeak(InsufficientData):
    pass


class DegenerateRegressor(InsufficientData):
    pass


class EmptyInnerLayer(InsufficientData):
    pass


class ConfigInvalid(InputError):
    pass
