"""Exception hierarchy shared by all modules."""


class SLQError(Exception):
    """Base class for domain errors raised by the library."""


class ExprSyntaxError(SLQError, ValueError):
    """Malformed expression text.

    Attributes:
        offset: byte offset into the UTF-8 encoded source.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    pass


class DomainError(SLQError, ArithmeticError):
    """Non-finite value produced by a coefficient expression."""

    def __init__(self, message, x=None, segment=None):
        super().__init__(message)
        self.x = x
        self.segment = segment


class ProblemFormatError(SLQError, ValueError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class DegeneratePointError(SLQError):
    """p vanishes where the Shin-Zettl matrix is needed."""

    def __init__(self, x):
        super().__init__(f"p(x) = 0 at x = {x!r}")
        self.x = x


class IntegrationError(SLQError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class StepSizeUnderflow(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


class QuadratureError(SLQError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class SpanError(SLQError, ValueError):
    """Evaluation point outside a trajectory's span."""


class HypothesisViolation(SLQError, ValueError):
    """A sampled precondition (positivity of p, boundedness of 1/p, ...) fails."""


class EigenSearchError(SLQError):
    def __init__(self, message, found=0):
        super().__init__(message)
        self.found = found


class MalformedSequence(SLQError, ValueError):
    """An interval sequence is not finite, ordered, symmetric or trending outward."""
