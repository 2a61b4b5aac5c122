"""Exception hierarchy shared across the package."""


class HoroafError(ValueError):
    """Base class for all errors raised by horoaf."""


class NonConvex(HoroafError):
    """A support function has a non-positive principal radius at some node."""


class OutOfBall(HoroafError):
    """A surface leaves the open unit ball."""


class Degenerate(HoroafError):
    """A radial graph has a vanishing metric determinant."""


class MismatchedFrames(HoroafError):
    pass


class UnknownInequality(HoroafError):
    pass


class BadParity(HoroafError):
    """An index has the wrong parity (or range) for the requested inequality."""


class WrongDimension(HoroafError):
    pass


class NonUniformGrid(HoroafError):
    pass


class NoFeasiblePoint(HoroafError):
    pass


class BudgetExhausted(HoroafError):
    pass


class CertificateUnstable(HoroafError):
    pass
