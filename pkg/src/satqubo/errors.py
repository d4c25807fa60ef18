"""Exception hierarchy shared by all modules.

The CLI maps each class to a distinct exit code (see ``satqubo.cli``).
"""


class SatQuboError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SatQuboError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedError(SatQuboError):
    """The request is valid but beyond a configured capability limit."""


class UnsupportedInstanceError(UnsupportedError):
    """A CNF instance that is not a 3CNF with distinct variables per clause."""


class ParseError(SatQuboError, ValueError):
    """Malformed input text (DIMACS header, QUBO JSON, config)."""
