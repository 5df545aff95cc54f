"""Exception types shared across the kernel."""


class LambdakitError(Exception):
    """Base class for all kernel errors."""


class SpecMismatch(LambdakitError):
    """Operands belong to different field specs / rings / ambients."""


class DivisionByZero(LambdakitError, ZeroDivisionError):
    """Exact division or inversion of zero."""


class ResourceLimit(LambdakitError):
    """A configured computation cap (S-pairs, iterations) was exceeded."""


class NotPIndependent(LambdakitError):
    """A tuple required to be p-independent is not."""


class NotInSpan(LambdakitError):
    """Element lies outside the required p-span."""


class NotSeparableBase(LambdakitError):
    """A separability precondition (K/C separable, c a p-basis of C) failed."""


class NonUnitJacobian(LambdakitError):
    """Newton system Jacobian is not a unit at the expansion point."""


class NoConvergence(LambdakitError):
    """Newton residual valuation failed to increase."""


class DenominatorVanishes(LambdakitError):
    """No configured series expansion center avoids the denominators."""


class ParseError(LambdakitError, ValueError):
    """Expression syntax error, with position and expected-token info."""

    def __init__(self, message, pos, expected=()):
        super().__init__(f"{message} at position {pos}" +
                         (f" (expected {', '.join(expected)})" if expected else ""))
        self.pos = pos
        self.expected = tuple(expected)


class UnknownVariable(LambdakitError, ValueError):
    """Identifier not declared in the active session."""
