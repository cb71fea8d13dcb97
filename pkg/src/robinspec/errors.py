"""Exception types shared across the package."""


class RobinspecError(Exception):
    """Base class for all errors raised by robinspec."""


class ArgumentError(RobinspecError, ValueError):
    """Invalid argument value (bad sigma sign, empty gamma, point outside, ...)."""


class GeometryError(RobinspecError):
    """Invalid domain description (non-simple polygon, clockwise vertices, ...)."""


class UnsupportedDomainError(GeometryError):
    """Operation requires a domain class we do not handle (e.g. non-convex inradius)."""


class AssemblyError(RobinspecError):
    """Finite-element assembly failed (degenerate element)."""


class MatrixError(RobinspecError):
    """Linear-algebra failure: factorization breakdown or non-positive-definite matrix."""


class ConvergenceError(RobinspecError):
    """Iterative solver did not reach its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class RangeError(RobinspecError, ValueError):
    """Spectral parameter outside its admissible open interval."""


class ResolutionError(RobinspecError):
    """Mesh too coarse to resolve the requested feature."""
