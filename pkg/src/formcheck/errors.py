"""Exception hierarchy shared across the package."""


class FormcheckError(Exception):
    """Base class for all domain errors."""


class MissingKeypoint(FormcheckError):
    """A required keypoint has confidence 0."""


class DegenerateRay(FormcheckError):
    """An angle was requested for a zero-length ray."""


class UnfillableFrame(FormcheckError):
    """Part filling cannot complete the frame; drop it, do not diagnose."""


class DegenerateBoundingBox(FormcheckError):
    """The confident-keypoint bounding box has no usable extent."""


class ZeroConfidence(FormcheckError):
    """All test-side confidence weights are zero."""


class InvalidRatio(FormcheckError):
    """The E-A mixing ratio must be strictly positive."""


class EmptyDatabase(FormcheckError):
    """Classification was attempted against a database with no exemplars."""


class DuplicateSource(FormcheckError):
    """An exemplar source id collides with one already in the database."""


class EmptyCandidates(FormcheckError):
    """Candidate selection was given an empty list."""


class RankDeficient(FormcheckError):
    """The projection fit system is rank deficient (collinear back quad)."""


class DegenerateThigh(FormcheckError):
    """Squat weight check on a zero-length thigh."""


class BadFrame(FormcheckError):
    """A frame payload failed schema validation."""
