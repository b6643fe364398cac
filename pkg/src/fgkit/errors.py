"""Exception hierarchy shared by every fgkit module."""


class FGError(Exception):
    """Base class; every library error derives from it."""


class DomainError(FGError, ValueError):
    pass


class ConvergenceDomain(DomainError):
    """Requested degree/parameter lies outside the half-plane of convergence."""


class NegativeArgument(DomainError):
    pass


class BranchViolation(DomainError):
    pass


class CutViolation(DomainError):
    pass


class RayHitsCut(DomainError):
    pass


class ContourHitsCut(DomainError):
    pass


class PoleAtNonPositiveInteger(DomainError):
    pass


class PoleProximity(DomainError):
    pass


class SymmetryViolation(DomainError):
    pass


class InvalidSingularity(DomainError):
    pass


class PreconditionDeclarationMissing(DomainError):
    pass


class IntegerMWithoutEpsilonFlag(DomainError):
    pass


class MissingCoefficient(DomainError, KeyError):
    pass


class NonConvergence(FGError, ArithmeticError):
    def __init__(self, msg, partial=None, error=None):
        super().__init__(msg)
        self.partial = partial
        self.error = error


class TailBoundViolated(NonConvergence):
    pass


class DegreeOverflow(NonConvergence):
    pass


class SlowDecay(NonConvergence):
    pass


class SeriesDivergence(NonConvergence):
    pass


class ContourDivergence(NonConvergence):
    pass


class SingularBoundary(NonConvergence):
    pass


class InsufficientSmoothness(FGError):
    pass


class ProxyRangeExceeded(FGError):
    pass


class IoError(FGError, OSError):
    pass
