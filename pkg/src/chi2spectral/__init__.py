"""Spectral effects of strong chi(2) interactions: Taylor vs Dyson second-order
states, sliced-crystal up-conversion, periodic poling and a chi(2) Bell gate."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AxisMismatchError,
    Chi2Error,
    ConfigError,
    DegenerateDispersionError,
    FailureOutcomeError,
    InvalidStateError,
    NoRealSolutionError,
    NotMatchedError,
    QuadratureError,
)
from .spectral import (  # noqa: F401
    CrystalConfig,
    DispersionProfile,
    GaussianPhoton,
    JointAmplitude,
    delta_k,
    gamma_fwhm,
    pm_function,
    sinc_gauss,
)
