"""Exception hierarchy shared by all modules."""


class SpectralError(Exception):
    """Base class for every error raised by this package."""


class NonpositiveA(SpectralError):
    pass


class DomainError(SpectralError):
    """A Verblunsky coefficient left the open interval (-1, 1)."""


class NoContraction(SpectralError):
    """Fixed-point iterates did not shrink geometrically."""


class MaxIterExceeded(SpectralError):
    pass


class GridMismatch(SpectralError):
    pass


class RangeViolation(SpectralError):
    """An analytic function was applied outside its domain of analyticity."""


class NotConjugationInvariant(SpectralError):
    pass


class SupportOutsideInterval(SpectralError):
    pass


class OutsideDisc(SpectralError):
    pass


class ExponentUndetermined(SpectralError):
    pass


class MassAtEdge(SpectralError):
    """Point mass sitting exactly at x = +-2."""


class MomentDegenerate(SpectralError):
    pass


class EigenFailure(SpectralError):
    pass


class NearSpectrum(SpectralError):
    pass


class Inconclusive(SpectralError):
    pass


class InvalidC(SpectralError):
    pass


class EigenvaluesPresent(SpectralError):
    """The operator has spectrum off [-2, 2] where none is allowed."""
