"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ChordGenusError(Exception):
    """Base class; the CLI reports ``type(err).__name__`` and exits with 1."""


# series algebra
class TruncationError(ChordGenusError, IndexError):
    """A coefficient beyond the truncation order was requested."""


class ZeroConstantTerm(ChordGenusError, ZeroDivisionError):
    pass


class NonzeroConstantTerm(ChordGenusError, ValueError):
    pass


class NoConvergence(ChordGenusError):
    pass


# diagrams
class Disconnected(ChordGenusError, ValueError):
    pass


class NotConnected(ChordGenusError, ValueError):
    pass


class WrongBackboneCount(ChordGenusError, ValueError):
    pass


class CapExceeded(ChordGenusError, ValueError):
    pass


# recursions / gamma series
class TruncationTooLow(ChordGenusError, ValueError):
    pass


class InconsistentSystem(ChordGenusError, ArithmeticError):
    pass


# asymptotics
class TooFewTerms(ChordGenusError, ValueError):
    pass


class NonPositiveTail(ChordGenusError, ValueError):
    pass


class UnstableDerivative(ChordGenusError, ArithmeticError):
    pass


class OrderTooLow(ChordGenusError, ValueError):
    pass
