"""Exception types shared across the package."""


class ModmatError(Exception):
    """Base class for all errors raised by this package."""


class NotPrimePower(ModmatError):
    """Requested field order is not a supported prime power."""


class UnknownLabel(ModmatError):
    """A referenced ground element does not exist."""


class NotABasis(ModmatError):
    """The given set is not a basis of the matroid (or matrix columns)."""


class SetOutOfGround(ModmatError):
    """A subset refers to elements outside the ground set."""


class BadPartition(ModmatError):
    """The given sets do not partition the required ground set."""


class NotThreeConnected(ModmatError):
    """Operation requires a 3-connected matroid."""


class SharedRestrictionMismatch(ModmatError):
    """The two summands disagree on their shared restriction."""


class SharedFlatNotModular(ModmatError):
    """The shared restriction is not modular in the designated summand."""


class NotModular(ModmatError):
    """The named restriction is not modular."""


class NotARepresentation(ModmatError):
    """The given matrix does not represent the stated matroid."""


class NotAPGRepresentation(ModmatError):
    """The given matrix is not a standard-form projective-plane representation."""


class SizeMismatch(ModmatError):
    """Row and column selections must have equal size."""


class GroundMismatch(ModmatError):
    """Two matroids were expected to share a ground set."""


class MatroidsEqual(ModmatError):
    """Operation requires two distinct matroids."""


class PreconditionFailed(ModmatError):
    """A checked hypothesis of the operation does not hold.

    The message names the failing hypothesis.
    """

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}{': ' + detail if detail else ''}")


class HypothesisViolated(ModmatError):
    """An element violates a per-element hypothesis; carries the element."""

    def __init__(self, element, detail=""):
        self.element = element
        super().__init__(f"element {element!r}{': ' + detail if detail else ''}")


class NoPartner(ModmatError):
    """No representable partner matroid exists for the given deletion pair."""


class OrderingNotFound(ModmatError):
    """No valid element ordering exists despite verified hypotheses."""


class ParseError(ModmatError):
    """A data file is malformed; carries a 1-based line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")
