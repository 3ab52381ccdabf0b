"""Exception hierarchy shared by all modules."""


class Chi2Error(Exception):
    """Base class for errors raised by chi2spectral."""


class DegenerateDispersionError(Chi2Error, ValueError):
    """Signal and idler group velocities too close for the first-order model."""


class QuadratureError(Chi2Error, RuntimeError):
    """A numerical integral did not reach its requested tolerance."""


class NoRealSolutionError(Chi2Error, ValueError):
    """A perturbed phase-matching condition admits no positive crystal length."""


class NotMatchedError(Chi2Error, ValueError):
    """Spacer parameters do not satisfy the matching conditions."""


class InvalidStateError(Chi2Error, ValueError):
    """A polarization state has the wrong shape or is not normalized."""


class AxisMismatchError(Chi2Error, ValueError):
    """Two grid states are sampled on different axes."""


class FailureOutcomeError(Chi2Error, ValueError):
    """A correction was requested for a failed Bell measurement."""


class ConfigError(Chi2Error, ValueError):
    """A run configuration failed schema validation."""
