"""Shared exception types."""


class BoundExceededError(Exception):
    """A computation left the configured (homological, internal) degree box.

    Raised explicitly so that "zero" is never silently conflated with
    "unknown beyond the truncation bound".
    """


class HomogeneityError(ValueError):
    """An input polynomial or element is not homogeneous."""


class ParityError(ValueError):
    """Variable kind incompatible with its homological degree."""


class NotCycleError(ValueError):
    """Attempted to adjoin a variable whose boundary is not a cycle."""


class NotChainMapError(ValueError):
    """A would-be morphism fails to commute with the differentials."""


class AdmissibilityError(ValueError):
    """A fixture or module is outside the domain of the requested check."""
