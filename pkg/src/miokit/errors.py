"""Exception types shared across the package."""


class MiokitError(Exception):
    """Base class for all errors raised by this package."""


class InvariantError(MiokitError, ValueError):
    """An input or constructed object violates a stated invariant.

    The message names the violated invariant so callers (and the CLI)
    can surface it verbatim.
    """


class NotMioError(InvariantError):
    """An operation requiring an (epsilon-)MIO was called on a joint that
    fails the maximal-informativeness check. Carries the failing verdict."""

    def __init__(self, message, verdict):
        super().__init__(message)
        self.verdict = verdict


class InternalConsistencyError(MiokitError, RuntimeError):
    """Two independent computation paths disagreed beyond tolerance.

    This signals a numerics bug inside the package, never bad user input;
    it is raised instead of silently returning a value.
    """
