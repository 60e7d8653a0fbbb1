"""Exception hierarchy.

Every failure the toolkit reports on purpose derives from :class:`PedevalError`,
so callers (and the CLI) can separate input problems from programming errors.
"""

from __future__ import annotations


class PedevalError(Exception):
    """Base class for all structured errors raised by pedeval."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- input parsing -----------------------------------------------------------

class ParseError(PedevalError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class InvalidBox(ParseError):
    pass


class DuplicateSample(ParseError):
    pass


class SingularMatrix(PedevalError):
    pass


class FormatError(PedevalError):
    pass


class DimensionMismatch(PedevalError):
    pass


class SchemaError(PedevalError):
    pass


# -- geometry / kinematics ---------------------------------------------------

class DegenerateProjection(PedevalError):
    pass


class TooShort(PedevalError):
    pass


class PointOutsideBoundary(PedevalError):
    pass


# -- camera filter -----------------------------------------------------------

class FrameTooSmall(PedevalError):
    pass


class SequenceTooShort(PedevalError):
    pass


# -- metrics -----------------------------------------------------------------

class EmptySet(PedevalError):
    pass


class NoVelocitySamples(PedevalError):
    pass


class NoQualifyingPairs(PedevalError):
    pass


class NoMovers(PedevalError):
    pass


class InsufficientData(PedevalError):
    pass


# -- comparison --------------------------------------------------------------

class SceneMismatch(PedevalError):
    pass


class EmptyCandidates(PedevalError):
    pass


class BinningMismatch(PedevalError):
    pass
