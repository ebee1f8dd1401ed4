"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the range an operation is defined for."""


class ToleranceError(RuntimeError):
    """An adaptive scheme stalled before reaching the requested tolerance."""


class BracketError(RuntimeError):
    """Root bracketing failed: no sign change in the scanned range."""


class SplitError(RuntimeError):
    """A zero-moment equal-area split could not be constructed."""


class DepthError(SplitError):
    """Recursive decomposition exceeded the allowed depth."""


class MeshError(ValueError):
    """The polygon cannot be meshed with the requested resolution."""
