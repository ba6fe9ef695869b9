"""Exception hierarchy shared by all modules.

Every error raised on bad geometric input derives from :class:`GeometryError`
(itself a :class:`ValueError`), so callers that only care about "the input
was invalid" can catch one type.  The CLI maps :class:`DomainError` and its
relatives to exit code 3.
"""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DomainError(GeometryError):
    """An argument lies outside the domain of a formula."""


class ConvexityError(GeometryError):
    """A curve fails (λ-)convexity where it is required."""


class SupportOverflowError(GeometryError):
    """A support value reached the hemisphere boundary, where tan(k1 h) diverges."""


class BranchError(GeometryError):
    """An inverse trigonometric expression left its principal branch."""


class RigidityError(GeometryError):
    """A four-bar linkage has no remaining degree of freedom (already a lune)."""


class CurvatureRangeError(GeometryError):
    """Measured curvature is outside the interval required by an inequality."""


class InfeasibleError(RuntimeError):
    """A shooting or fitting procedure did not reach its tolerance."""
