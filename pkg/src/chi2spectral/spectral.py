"""Physical types, the linearized phase mismatch and Gaussian photon spectra.

Frequencies are angular throughout: ``sigma``, ``mu`` and every detuning
``nu`` carry the same unit, and products like ``L * sigma * k'`` are treated
as dimensionless. Results only depend on those dimensionless groups.
"""

from __future__ import annotations

import contextlib
import functools
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateDispersionError

__all__ = [
    "DispersionProfile",
    "GaussianPhoton",
    "CrystalConfig",
    "JointAmplitude",
    "delta_k",
    "sinc",
    "sinc_half_root",
    "gamma_fwhm",
    "gamma_override",
    "sinc_gauss",
    "pm_function",
    "BASELINE_PROFILE",
    "BASELINE_SIGMA",
]

DEGENERATE_FLOOR = 1e-15  # s/m


@dataclass(frozen=True)
class DispersionProfile:
    """Inverse group velocities (s/m) of signal, idler and pump."""

    kp_s: float
    kp_i: float
    kp_p: float

    def __post_init__(self):
        for name in ("kp_s", "kp_i", "kp_p"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")

    @property
    def type_ii(self) -> bool:
        return self.kp_s != self.kp_i

    @classmethod
    def extended_phase_matched(cls, kp_s: float, kp_i: float, eps: float = 0.0) -> "DispersionProfile":
        """Profile with ``kp_p = (1 + eps) (kp_s + kp_i) / 2``."""
        return cls(kp_s, kp_i, (1.0 + eps) * 0.5 * (kp_s + kp_i))

    def check_type_ii(self, floor: float = DEGENERATE_FLOOR) -> None:
        if abs(self.kp_s - self.kp_i) < floor:
            raise DegenerateDispersionError(
                f"|kp_s - kp_i| = {abs(self.kp_s - self.kp_i):.3e} s/m is below the floor {floor:.1e}; "
                "the first-order mismatch model breaks down here"
            )


@dataclass(frozen=True)
class GaussianPhoton:
    """Single-photon spectral amplitude with centre ``mu``, width ``sigma`` and
    linear spectral phase ``xi`` (a time offset)."""

    mu: float
    sigma: float
    xi: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def amplitude_detuning(self, nu):
        nu = np.asarray(nu, dtype=float)
        norm = (self.sigma * math.sqrt(2.0 * math.pi)) ** -0.5
        return norm * np.exp(-nu * nu / (4.0 * self.sigma**2)) * np.exp(1j * self.xi * nu)

    def amplitude(self, omega):
        return self.amplitude_detuning(np.asarray(omega, dtype=float) - self.mu)


@dataclass(frozen=True)
class CrystalConfig:
    """One crystal slice of length ``L`` repeated ``N`` times.

    ``chi_mag`` is scaled so that ``chi_mag * N * L * sqrt(R)`` is the Rabi
    angle (hbar absorbed).
    """

    L: float
    sigma: float
    N: int = 1
    chi_mag: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError("L must be positive and finite")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")

    def scale(self) -> float:
        """``L sqrt(gamma) sigma``: multiplies an inverse group velocity into a
        dimensionless group."""
        return self.L * math.sqrt(gamma_fwhm()) * self.sigma

    def d_params(self, profile: DispersionProfile) -> tuple[float, float]:
        u = self.scale()
        return u * (profile.kp_s - profile.kp_p), u * (profile.kp_i - profile.kp_p)

    def kappas(self, profile: DispersionProfile) -> tuple[float, float, float]:
        """Dimensionless ``(kappa_p, kappa_s, kappa_i) = L sqrt(gamma) sigma k'``."""
        u = self.scale()
        return u * profile.kp_p, u * profile.kp_s, u * profile.kp_i


@dataclass(frozen=True)
class JointAmplitude:
    """Complex function of (nu_s, nu_i) with an optional sampled grid."""

    func: Callable
    grid: object = field(default=None, compare=False)

    def __call__(self, nu_s, nu_i):
        return self.func(nu_s, nu_i)

    def sampled(self, sigma: float, extent: float = 6.0, count: int = 512) -> "JointAmplitude":
        from .oracle import GridState

        axis = np.linspace(-extent, extent, count)
        xs, xi = np.meshgrid(axis, axis, indexing="ij")
        samples = np.asarray(self.func(xs * sigma, xi * sigma), dtype=complex)
        return JointAmplitude(self.func, GridState(samples, extent, count))


def delta_k(profile: DispersionProfile, nu_p, nu_s, nu_i):
    """First-order phase mismatch k'_p nu_p - k'_s nu_s - k'_i nu_i (1/m)."""
    return profile.kp_p * np.asarray(nu_p) - profile.kp_s * np.asarray(nu_s) - profile.kp_i * np.asarray(nu_i)


def sinc(x):
    """Unnormalized sinc, sin(x)/x."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@functools.lru_cache(maxsize=None)
def sinc_half_root() -> float:
    """Positive x0 with sinc(x0) = 1/2."""
    return brentq(lambda x: math.sin(x) / x - 0.5, 1.0, 2.5, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)


_override = threading.local()


def gamma_fwhm() -> float:
    """Width parameter of the Gaussian that shares sinc's FWHM: ln 2 / x0^2."""
    value = getattr(_override, "gamma", None)
    if value is not None:
        return value
    return _gamma_cached()


@functools.lru_cache(maxsize=None)
def _gamma_cached() -> float:
    return math.log(2.0) / sinc_half_root() ** 2


@contextlib.contextmanager
def gamma_override(value: float):
    """Temporarily replace gamma in this thread (validation self-test)."""
    previous = getattr(_override, "gamma", None)
    _override.gamma = value
    try:
        yield
    finally:
        _override.gamma = previous


def sinc_gauss(x):
    """sqrt(gamma pi) exp(-gamma x^2), the FWHM-matched stand-in for sinc."""
    g = gamma_fwhm()
    x = np.asarray(x, dtype=float)
    return math.sqrt(g * math.pi) * np.exp(-g * x * x)


def pm_function(config: CrystalConfig, profile: DispersionProfile, nu_s, nu_i, *, exact: bool = False, centered: bool = False):
    """Phase-matching function sinc(L dk/2) exp(i L dk/2) on the energy shell.

    ``exact`` uses the true sinc instead of the Gaussian stand-in.
    ``centered`` measures z from the middle of the slice, which removes the
    exp(i L dk/2) factor.
    """
    nu_s = np.asarray(nu_s, dtype=float)
    nu_i = np.asarray(nu_i, dtype=float)
    half = 0.5 * config.L * delta_k(profile, nu_s + nu_i, nu_s, nu_i)
    env = sinc(half) if exact else sinc_gauss(half)
    if centered:
        return env.astype(complex)
    return env * np.exp(1j * half)


# Baseline parameters.
BASELINE_PROFILE = DispersionProfile.extended_phase_matched(5.6e-9, 5.2e-9)
BASELINE_SIGMA = 1.0e9
