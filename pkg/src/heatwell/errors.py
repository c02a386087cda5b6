class HeatwellError(Exception):
    """Base class for package errors."""


class ParameterError(HeatwellError, ValueError):
    """An input violates a documented constraint."""


class NonFiniteError(HeatwellError, ArithmeticError):
    """A computed quantity overflowed or became NaN."""


class StepFailure(NonFiniteError):
    """A time step produced a non-finite state."""


class BracketError(HeatwellError, RuntimeError):
    """Root bracketing did not find a sign change."""
