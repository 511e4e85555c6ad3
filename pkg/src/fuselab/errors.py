"""Exception hierarchy.

Every user-facing failure is a :class:`ValidationError` subclass (CLI exit
code 1). :class:`InvariantViolation` signals a bug inside fuselab (exit 3).
"""

from __future__ import annotations


class FuselabError(Exception):
    """Base class for all fuselab errors."""


class ValidationError(FuselabError, ValueError):
    """Input data violates a documented contract."""


class InvariantViolation(FuselabError, AssertionError):
    """An internal post-condition failed."""


# panels and weights
class MissingCell(ValidationError):
    pass


class ScoreOutOfRange(ValidationError):
    pass


class SingleClassDataset(ValidationError):
    pass


class DuplicateSampleId(ValidationError):
    pass


class AllZeroWeights(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NonFiniteScore(ValidationError):
    pass


class InvalidThreshold(ValidationError):
    pass


# ingestion
class BadHeader(ValidationError):
    pass


class BadLabel(ValidationError):
    pass


class BadScore(ValidationError):
    pass


class SampleSetMismatch(ValidationError):
    pass


class LabelConflict(ValidationError):
    pass


class EmptyIntersection(ValidationError):
    pass


class DuplicateEntry(ValidationError):
    pass


class ValueOutOfRange(ValidationError):
    pass


class ManifestError(ValidationError):
    pass


# fusion
class DegenerateSkills(ValidationError):
    pass


class NameCollision(ValidationError):
    pass


# analysis
class MissingEntry(ValidationError):
    pass


# synth
class InvalidSpec(ValidationError):
    pass
