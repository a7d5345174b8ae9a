"""Exception types shared across the package."""


class ResonanceLabError(Exception):
    """Base class for all package-specific errors."""


class NonFiniteValue(ResonanceLabError):
    """A coefficient became NaN or infinite (nonlinear blow-up / step too large)."""


class NoConvergence(ResonanceLabError):
    """A fixed-point solve hit its iteration cap before reaching tolerance."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"fixed point not converged after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class UnsupportedOrder(ResonanceLabError):
    """Requested discretisation order lies outside the implemented catalogue."""


class DegenerateFit(ResonanceLabError):
    """Order fit requested on non-positive or non-finite error data."""


class NonZeroMeanMode(ResonanceLabError):
    """A zero-mean-only norm was evaluated on a sequence with nonzero mass."""
