"""Exception hierarchy shared by every module."""


class HermSphError(Exception):
    """Base class for all errors raised by this package."""


class MathDomainError(HermSphError):
    """The request is mathematically ill-posed (CLI exit status 2)."""


class SquareDefect(MathDomainError):
    pass


class PrecisionTooLow(MathDomainError):
    pass


class DepthExceedsPrecision(MathDomainError):
    pass


class ZeroInput(MathDomainError):
    pass


class UnramifiedCase(MathDomainError):
    pass


class WrongCase(MathDomainError):
    pass


class UnknownCase(MathDomainError):
    pass


class SingularMatrix(MathDomainError):
    pass


class AmbiguousClass(MathDomainError):
    pass


class NoMatchingClass(MathDomainError):
    pass


class RepNotInTable(MathDomainError):
    pass


class PoleAtPoint(MathDomainError):
    pass


class DivisionByZero(MathDomainError, ZeroDivisionError):
    pass


class LemmaHypothesisWarning(UserWarning):
    """A lemma was evaluated outside the parameter range where it is proved."""
