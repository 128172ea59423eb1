"""Exception hierarchy shared by every stage of the solver."""


class MacaulayError(Exception):
    """Base class for all errors raised by blockmac."""


class ProblemError(MacaulayError):
    pass


class EmptyEquation(ProblemError):
    pass


class SupportLengthMismatch(ProblemError):
    pass


class ShapeMismatch(ProblemError):
    pass


class UnderDetermined(ProblemError):
    pass


class FormatError(MacaulayError):
    """Malformed MLP text. ``line`` is the 1-based physical line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class VersionError(FormatError):
    pass


class IndexOutOfRange(MacaulayError, IndexError):
    pass


class DegreeTooSmall(MacaulayError):
    pass


class DegreeSkip(MacaulayError):
    pass


class RankAmbiguous(MacaulayError):
    """A singular value sits too close to the rank threshold to decide."""

    def __init__(self, message, threshold=None, ambiguous=()):
        self.threshold = threshold
        self.ambiguous = tuple(ambiguous)
        super().__init__(message)


class NoGap(MacaulayError):
    pass


class GapMissing(MacaulayError):
    pass


class ShiftEscapesSubspace(MacaulayError):
    pass


class SingularPencil(MacaulayError):
    pass


class DegreeCapExceeded(MacaulayError):
    pass


class PositiveDimensionalAffine(MacaulayError):
    pass


class UnknownProblem(MacaulayError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class AllFailRow(MacaulayError, UserWarning):
    """Issued as a warning when a benchmark row has no finished solver."""
