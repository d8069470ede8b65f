"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PCSPError(Exception):
    """Base class for all errors raised by this package."""


class ArityMismatch(PCSPError):
    pass


class PromiseViolation(PCSPError):
    pass


class WeightOutOfRange(PCSPError):
    pass


class LengthMismatch(PCSPError):
    pass


class TooLarge(PCSPError):
    pass


class EvenArity(PCSPError):
    pass


class EmptyRelation(PCSPError):
    pass


class EmptyWeights(PCSPError):
    pass


class UnsupportedNonSymmetric(PCSPError):
    pass


class NonSymmetric(PCSPError):
    pass


class NotFolded(PCSPError):
    pass


class OutOfScope(PCSPError):
    pass


class HypothesisViolated(PCSPError):
    pass


class FamilyPresent(PCSPError):
    pass


class NotHard(PCSPError):
    pass


class NotTractable(PCSPError):
    pass


class NotYes(PCSPError):
    pass


class NotPromise(PCSPError):
    pass


class UnsatisfiedEdge(PCSPError):
    pass


class NoFixingSet(PCSPError):
    pass


class HypothesisFails(PCSPError):
    """Raised with the offending function attached as ``witness``."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotProjectionClosed(PCSPError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingIdentity(PCSPError):
    pass


class ParseError(PCSPError):
    pass


class SchemaError(PCSPError):
    pass
