class PreconditionError(ValueError):
    """An operation was called outside its domain (non-unit axis, inelastic process, K² not commuting with V, ...)."""

class GeometryError(ValueError):
    """A laterally structured sample is not closed under the rotation about its normal."""

class InconsistencyError(RuntimeError):
    """A constructed object failed its own verification; signals a tolerance or degeneracy bug, not bad input."""
