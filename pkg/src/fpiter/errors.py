"""Exception hierarchy shared by the whole package."""


class GameError(ValueError):
    """Base class for malformed game input."""


class EmptyGame(GameError):
    pass


class DanglingEdge(GameError):
    pass


class NoSuccessor(GameError):
    pass


class NegativePriority(GameError):
    pass


class DuplicateEdge(GameError):
    pass


class DuplicateNode(GameError):
    pass


class PGSyntaxError(GameError):
    """Raised by the PGSolver parsers; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ResourceLimit(RuntimeError):
    """A configured budget (snapshots, strategies, configurations) was exceeded."""


class ExtractionStuck(RuntimeError):
    """Strategy extraction emptied the decision stack of a node it must assign."""


class LengthMismatch(ValueError):
    pass


class TerminalConfig(ValueError):
    """``step_credit`` called on a configuration whose credit is exhausted."""


class InvalidSpec(ValueError):
    pass
