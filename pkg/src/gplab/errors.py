"""Exception and warning types shared across the package."""


class GplabError(Exception):
    """Base class for all package errors."""


class DomainError(GplabError):
    """Invalid catalog name or parameter outside its documented range."""


class GridError(GplabError):
    """Invalid grid construction or incompatible grids."""


class DegenerateBandError(GplabError):
    """A derivative of the dispersion relation vanishes on the band."""


class QuadratureError(GplabError):
    """Adaptive oscillatory quadrature stalled before reaching tolerance."""


class PreconditionError(GplabError):
    """A numerically checked precondition failed (e.g. phase derivative bound)."""


class NonContractionError(GplabError):
    """Fixed-point inversion of the normal form diverged: data too large."""


class BlowupError(GplabError):
    """Evolution aborted after a norm exceeded the blow-up guard."""

    def __init__(self, step: int, value: float):
        super().__init__(f"blow-up detected at step {step}: norm {value:.3e}")
        self.step = step
        self.value = value


class RegimeError(GplabError):
    """Exponent pair outside every regime of the piecewise constant law."""


class ConfigError(GplabError):
    """Invalid experiment configuration (unknown key or out-of-range value)."""


class LowFrequencyAmplificationWarning(UserWarning):
    """Inverting U on a field with significant mass at the lowest frequencies."""


class WindowTruncationWarning(UserWarning):
    """Time-window tail estimate exceeds the accepted fraction of the integral."""


class BoundaryTailWarning(UserWarning):
    """Field does not decay at the outer grid boundary; integrals unreliable."""
