"""Exception types shared across the package."""


class CCStructError(Exception):
    """Base class for all package-specific errors."""


class PotentialUnavailable(CCStructError):
    """Raised when an operation needs P or its gradient but the density
    field only carries the Laplacian data."""


class QuadratureFailure(CCStructError):
    """Raised when an adaptive quadrature cannot reach its tolerance
    within the node budget."""


class InvalidStockyard(CCStructError):
    """Raised when a stockyard fails validation where a valid one is
    required (or guaranteed by construction)."""


class DegenerateLoop(CCStructError):
    """Raised when a closed curve is too short to be split or measured."""


class DensitySpecError(CCStructError):
    """Parse error in a density spec file.  Carries the 1-based line
    number when the error is attributable to a specific line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
