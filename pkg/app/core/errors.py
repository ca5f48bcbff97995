# app/core/errors.py


class LabError(Exception):
    """Base class for every error raised by the laboratory."""


class PreconditionError(LabError, ValueError):
    """An operation was called outside its domain."""


class NumericalError(LabError, RuntimeError):
    """A numerical procedure could not deliver a certified result."""


class EbkSolveError(NumericalError):
    pass


class ShootingError(NumericalError):
    pass


class InfeasibleLoopError(NumericalError):
    pass


class SnapAmbiguityError(NumericalError):
    pass


class LatticeSolveError(NumericalError):
    pass
