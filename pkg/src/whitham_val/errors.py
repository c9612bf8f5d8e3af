"""Exception types shared across the package."""


class ValidationError(Exception):
    """Base class for domain errors raised by this package."""


class NoWaveTrain(ValidationError):
    """The requested wave number admits no wave train (amplitude would vanish)."""


class PeriodMismatch(ValidationError):
    """Grid period is incompatible with the requested wave number."""


class BlowUp(ValidationError):
    """Time stepping produced a non-finite value."""

    def __init__(self, time: float, message: str | None = None):
        self.time = time
        super().__init__(message or f"non-finite state encountered at t = {time:.6g}")


class PhaseSingularity(ValidationError):
    """Amplitude of the complex field dropped below the polar-coordinate floor."""


class NonPositiveAmplitude(ValidationError):
    """Leading-order amplitude balance has no real solution (argument <= 0)."""


class StripExhausted(ValidationError):
    """The shrinking analyticity strip reached zero width before the target time."""

    def __init__(self, time: float, message: str | None = None):
        self.time = time
        super().__init__(message or f"analyticity strip exhausted at T = {time:.6g}")


class SmallnessViolated(ValidationError):
    """The monitored Gevrey norm exceeded the configured smallness bound."""

    def __init__(self, time: float, value: float, bound: float):
        self.time = time
        self.value = value
        self.bound = bound
        super().__init__(
            f"Gevrey norm {value:.6g} exceeded bound {bound:.6g} at T = {time:.6g}"
        )


class NonzeroMean(ValidationError):
    """A field that must have zero mean does not."""


class NoGap(ValidationError):
    """Spectral gap below the requested minimum already at k = 0."""


class GevreyOverflow(ValidationError):
    """Gevrey weight exponent too large for IEEE double evaluation."""


class ConfigError(ValidationError):
    """Invalid or unknown experiment configuration content."""
