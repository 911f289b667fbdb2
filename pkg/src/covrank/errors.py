"""Domain exceptions. Anything raised as CovrankError maps to CLI exit code 1."""


class CovrankError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(CovrankError):
    """A record in an input file failed to parse or validate."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
