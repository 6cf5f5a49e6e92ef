"""Exception hierarchy shared across the package."""


class LadderError(Exception):
    """Base class for all errors raised by ladderfl."""


class ParameterError(LadderError, ValueError):
    """A physical parameter is out of its allowed range."""


class DomainError(LadderError, ValueError):
    """A closed-form expression is evaluated outside its domain of validity."""


class NoEmissionError(LadderError):
    """The steady-state emission rate vanishes, so a normalized quantity is undefined."""


class NonUniqueSteadyStateError(LadderError):
    """The generator has more than one stationary state."""


class PositivityError(LadderError):
    """A density matrix has eigenvalues below the positivity tolerance."""


class SecularBreakdownError(LadderError):
    """Dressed levels are (nearly) degenerate, so the secular model does not apply."""


class TruncationError(LadderError):
    """A time trace is too short to represent its correlation function."""


class UnsupportedCorrelationError(LadderError, KeyError):
    """The requested correlation is not part of the closed-form catalog."""
