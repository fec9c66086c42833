"""Exception hierarchy shared by every module of the package."""


class HalflineError(Exception):
    """Base class for all errors raised by :mod:`halfline`."""


class DomainError(HalflineError, ValueError):
    """A precondition on the energy or the argument was violated."""


class KindRegionMismatch(DomainError):
    """An eigenfunction kind was requested outside the energy region it is defined on."""


class WrongRegion(DomainError):
    pass


class OnRealAxis(DomainError):
    """The resolvent kernel was requested on the spectrum (E >= 0 real)."""


class NonPositiveEnergy(DomainError):
    pass


class UnboundedSymbol(DomainError):
    pass


class SingularEndpoint(DomainError):
    pass


class NumericalError(HalflineError, ArithmeticError):
    """A numerical routine could not reach its requested accuracy."""


class StepSizeUnderflow(NumericalError):
    pass


class ToleranceNotMet(NumericalError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class NonFiniteIntegrand(NumericalError):
    pass


class LimitDiverges(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
