"""Exception and warning types shared across the package."""


class PwlError(Exception):
    """Base class for errors raised by pwlboundary."""


class NumericalError(PwlError):
    """A numeric routine failed (non-finite value, LP solver failure, ...)."""


class DegenerateBoundaryError(NumericalError):
    """The classifier vanishes on a full-dimensional set, so its boundary has no facets."""


class EmptyPolytopeWarning(UserWarning):
    """The negative set {x : f(x) <= 0} of a maxout classifier is empty."""


class NearDuplicateWarning(UserWarning):
    pass
