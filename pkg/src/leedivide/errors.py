"""Exception types shared across the package."""


class LeeDivideError(Exception):
    """Base class for all library errors."""


class PDParseError(LeeDivideError):
    """Malformed PD expression (syntax, arc multiplicity, empty diagram)."""


class NonPlanarError(LeeDivideError):
    """PD code does not describe a diagram on the sphere (Euler check failed)."""


class OrientationError(LeeDivideError):
    """Arc orientations cannot be assigned consistently."""


class NotDivisibleError(LeeDivideError, ArithmeticError):
    """Exact division requested for a non-divisible pair."""


class NotACycleError(LeeDivideError):
    """A vector handed to a homology-level operation is not a cycle."""


class BadArcError(LeeDivideError):
    """An arc id does not exist on the diagram in question."""


class BadLocationError(LeeDivideError):
    """A move location is invalid on the given diagram."""


class IncoherentSaddleError(LeeDivideError):
    """Saddle joins two arcs that run parallel along every shared face.

    The underlying surgery is the orientation-incompatible band; the
    canonical-class image is zero.  Reported, not fatal: callers that
    track classes catch this and record the zero image.
    """


class NotAKnotError(LeeDivideError):
    """Operation defined only for one-component diagrams."""
