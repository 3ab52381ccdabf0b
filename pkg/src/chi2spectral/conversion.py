"""Sliced-crystal up-conversion: overlap constants, P(odd) and the optimum.

Physical units here (rad/s for every frequency, s/m for inverse group
velocities, m for lengths). The phase-matching function is taken in the
crystal-centred frame, which is the frame in which the two-level Rabi
picture closes exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import NoRealSolutionError
from .oracle import GridState, QuadratureSpec, integrate_1d
from .spectral import DEGENERATE_FLOOR, CrystalConfig, DispersionProfile, GaussianPhoton, gamma_fwhm, pm_function

__all__ = [
    "ConversionReport",
    "OptimalConditions",
    "r_constant",
    "b_constant",
    "sigma_p",
    "p_odd",
    "p_odd_closed_form",
    "podd_surface",
    "surface_maxima",
    "condition_error_sensitivity",
    "optimal_conditions",
    "optimal_config",
    "psi_odd_profile",
    "rabi_angle",
    "chi_for_rabi",
    "j_pump",
    "j_pump_closed",
    "r_quadrature",
    "psi_even_grid",
]


@dataclass(frozen=True)
class ConversionReport:
    R: float
    B: float
    sigma_p: float
    p_odd: float
    rabi_angle: float
    d_s: float
    d_i: float
    p_odd_closed_form: float | None = None


class OptimalConditions(NamedTuple):
    L: float
    d_s: float
    d_i: float


def _check(profile: DispersionProfile, floor: float):
    profile.check_type_ii(floor)


def r_constant(config: CrystalConfig, profile: DispersionProfile, floor: float = DEGENERATE_FLOOR) -> float:
    """Integral of |Phi(w, w_p - w)|^2 over w; independent of w_p."""
    _check(profile, floor)
    dk = profile.kp_s - profile.kp_i
    return math.sqrt(2.0 * gamma_fwhm() * math.pi**3 / (config.L**2 * dk * dk))


def sigma_p(config: CrystalConfig, profile: DispersionProfile) -> float:
    """Bandwidth of the up-converted pump photon (std of |J_p|^2)."""
    g = gamma_fwhm()
    s2 = config.sigma**2
    l2 = config.L**2
    num = 2.0 + l2 * g * s2 * (profile.kp_s - profile.kp_i) ** 2
    den = 1.0 + l2 * g * s2 * ((profile.kp_s - profile.kp_p) ** 2 + (profile.kp_i - profile.kp_p) ** 2)
    return math.sqrt(s2 * num / den)


def b_constant(config: CrystalConfig, profile: DispersionProfile) -> float:
    """Norm of J_p: B^2 = integral |J_p|^2 d nu_p."""
    g = gamma_fwhm()
    num = (2.0 * math.pi) ** 1.5 * g * sigma_p(config, profile)
    den = 2.0 + config.L**2 * g * config.sigma**2 * (profile.kp_s - profile.kp_i) ** 2
    return math.sqrt(num / den)


def p_odd_closed_form(d_s, d_i):
    """P(odd) at Rabi angle pi/2 in terms of the dimensionless pair."""
    d_s = np.asarray(d_s, dtype=float)
    d_i = np.asarray(d_i, dtype=float)
    diff2 = (d_s - d_i) ** 2
    return np.sqrt(4.0 * diff2 / ((1.0 + d_s * d_s + d_i * d_i) * (2.0 + diff2)))


def rabi_angle(config: CrystalConfig, profile: DispersionProfile) -> float:
    return config.chi_mag * config.N * config.L * math.sqrt(r_constant(config, profile))


def chi_for_rabi(config: CrystalConfig, profile: DispersionProfile, angle: float) -> float:
    """Coupling magnitude that produces the requested Rabi angle."""
    return angle / (config.N * config.L * math.sqrt(r_constant(config, profile)))


def p_odd(config: CrystalConfig, profile: DispersionProfile, rabi: float | None = None,
          floor: float = DEGENERATE_FLOOR) -> ConversionReport:
    """Up-conversion probability (B^2 / R) sin^2(rabi).

    ``rabi`` defaults to the angle implied by ``config.chi_mag``. At
    rabi = pi/2 the dimensionless closed form is reported alongside.
    """
    R = r_constant(config, profile, floor)
    B = b_constant(config, profile)
    sp = sigma_p(config, profile)
    angle = rabi_angle(config, profile) if rabi is None else float(rabi)
    d_s, d_i = config.d_params(profile)
    prob = B * B / R * math.sin(angle) ** 2
    closed = float(p_odd_closed_form(d_s, d_i)) if math.isclose(angle, math.pi / 2, rel_tol=0, abs_tol=1e-15) else None
    return ConversionReport(R, B, sp, min(prob, 1.0), angle, d_s, d_i, closed)


def podd_surface(count: int = 201, extent: float = 2.0):
    """P(odd) at Rabi angle pi/2 on a count x count grid over [-extent, extent]^2.

    Returns ``(axis, surface)`` with ``surface[i, j] = P(d_s=axis[i], d_i=axis[j])``.
    """
    axis = np.linspace(-extent, extent, count)
    ds, di = np.meshgrid(axis, axis, indexing="ij")
    return axis, p_odd_closed_form(ds, di)


def surface_maxima(axis, surface):
    """Grid maxima on each side of the diagonal, each polished by a local
    optimizer started at the grid point.

    Returns a list of ``(grid_point, grid_value, refined_point, refined_value)``.
    """
    out = []
    ds, di = np.meshgrid(axis, axis, indexing="ij")
    for side in (ds > di, ds < di):
        masked = np.where(side, surface, -np.inf)
        k = np.unravel_index(np.argmax(masked), surface.shape)
        start = np.array([axis[k[0]], axis[k[1]]])
        res = minimize(lambda v: -float(p_odd_closed_form(v[0], v[1])), start, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        out.append((tuple(start), float(surface[k]), tuple(res.x), float(-res.fun)))
    return out


def optimal_conditions(profile: DispersionProfile, sigma: float, floor: float = DEGENERATE_FLOOR) -> OptimalConditions:
    """L solving the special condition with the pump at extended phase
    matching, plus the resulting (d_s, d_i) = (+-1/sqrt 2, -+1/sqrt 2)."""
    _check(profile, floor)
    kp = 0.5 * (profile.kp_s + profile.kp_i)
    prod = (profile.kp_s - kp) * (kp - profile.kp_i)
    L = math.sqrt(1.0 / (2.0 * gamma_fwhm() * sigma * sigma * prod))
    u = L * math.sqrt(gamma_fwhm()) * sigma
    return OptimalConditions(L, u * (profile.kp_s - kp), u * (profile.kp_i - kp))


def optimal_config(profile: DispersionProfile, sigma: float, N: int = 1) -> tuple[DispersionProfile, CrystalConfig]:
    """Extended-phase-matched profile and the crystal meeting the special condition."""
    epm = DispersionProfile.extended_phase_matched(profile.kp_s, profile.kp_i)
    return epm, CrystalConfig(optimal_conditions(epm, sigma).L, sigma, N)


def condition_error_sensitivity(epsilon1: float, epsilon2: float, profile_base: DispersionProfile, sigma: float,
                                placement: str = "scaled") -> float:
    """P(odd) at Rabi angle pi/2 with both optimum conditions missed.

    The pump sits at (1 + eps1)(kp_s + kp_i)/2. With ``placement="scaled"``
    the crystal is (1 + eps2) times the length that meets the special
    condition for that pump; ``"condition"`` instead solves
    (1 + eps2)^2 L^2 gamma sigma^2 (kp_s - kp_p)(kp_p - kp_i) = 1/2.
    """
    ks, ki = profile_base.kp_s, profile_base.kp_i
    kp = (1.0 + epsilon1) * 0.5 * (ks + ki)
    prod = (ks - kp) * (kp - ki)
    if not prod > 0:
        raise NoRealSolutionError(f"(kp_s - kp_p)(kp_p - kp_i) = {prod:.3e} <= 0: no real crystal length")
    base = math.sqrt(1.0 / (2.0 * gamma_fwhm() * sigma * sigma * prod))
    if placement == "scaled":
        L = (1.0 + epsilon2) * base
    elif placement == "condition":
        L = base / abs(1.0 + epsilon2)
    else:
        raise ValueError(f"unknown placement {placement!r}")
    u = L * math.sqrt(gamma_fwhm()) * sigma
    return float(p_odd_closed_form(u * (ks - kp), u * (ki - kp)))


def psi_odd_profile(config: CrystalConfig, profile: DispersionProfile, rabi: float | None = None):
    """Pump-photon spectrum and complex amplitude of the up-converted branch."""
    rep = p_odd(config, profile, rabi)
    scale = complex(np.exp(1j * config.theta)) * rep.B / math.sqrt(rep.R) * math.sin(rep.rabi_angle)
    return GaussianPhoton(0.0, rep.sigma_p), scale


# ---------------------------------------------------------------------------
# quadrature routes
# ---------------------------------------------------------------------------

def _photon(config):
    return GaussianPhoton(0.0, config.sigma)


def j_pump(config: CrystalConfig, profile: DispersionProfile, nu_p, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)):
    """J_p(nu_p) = integral f(w) f(nu_p - w) Phi(w, nu_p - w) dw by quadrature.

    Vectorized over ``nu_p``: one adaptive tree serves all points.
    """
    nu_p = np.atleast_1d(np.asarray(nu_p, dtype=float))
    ph = _photon(config)
    half = spec.window * config.sigma + 0.5 * np.max(np.abs(nu_p))

    def integrand(w):
        other = nu_p - w
        return ph.amplitude_detuning(w) * ph.amplitude_detuning(other) * pm_function(config, profile, w, other, centered=True)

    val, _ = integrate_1d(integrand, -half, half, spec)
    return val


def j_pump_closed(config: CrystalConfig, profile: DispersionProfile, nu_p):
    """Gaussian closed form of J_p with norm B and bandwidth sigma_p."""
    B = b_constant(config, profile)
    return B * GaussianPhoton(0.0, sigma_p(config, profile)).amplitude_detuning(nu_p)


def r_quadrature(config: CrystalConfig, profile: DispersionProfile, nu_p: float,
                 spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-11, abs_tol=0.0), exact: bool = False) -> float:
    """Integral of |Phi(w, nu_p - w)|^2 over w."""
    width = 1.0 / (config.L * abs(profile.kp_s - profile.kp_i))
    centre = 0.0
    # |Phi| peaks where the on-shell mismatch vanishes
    if profile.kp_s != profile.kp_i:
        centre = (profile.kp_p - profile.kp_i) * nu_p / (profile.kp_s - profile.kp_i)
    half = (40.0 if not exact else 1e4) * width

    def integrand(w):
        return np.abs(pm_function(config, profile, w, nu_p - w, exact=exact, centered=True)) ** 2

    val, _ = integrate_1d(integrand, centre - half, centre + half, spec)
    return float(np.real(val))


def psi_even_grid(config: CrystalConfig, profile: DispersionProfile, rabi: float, count: int = 512, extent: float = 11.0) -> GridState:
    """Even-order (two-photon) branch on a grid in units of sigma.

    Uses (H+ H-)^n psi_0 = R^(n-1) H+ H- psi_0, so the series sums to
    psi_0 + (cos(rabi) - 1) / R * Phi* J_si.
    """
    axis = np.linspace(-extent, extent, count) * config.sigma
    ph = _photon(config)
    R = r_constant(config, profile)
    # J_si depends on nu_s + nu_i only, which takes 2 count - 1 values on the grid
    sums = np.linspace(-2 * extent, 2 * extent, 2 * count - 1) * config.sigma
    jp = j_pump(config, profile, sums)
    idx = np.add.outer(np.arange(count), np.arange(count))
    ns, ni = np.meshgrid(axis, axis, indexing="ij")
    phi = pm_function(config, profile, ns, ni, centered=True)
    psi0 = np.outer(ph.amplitude_detuning(axis), ph.amplitude_detuning(axis))
    # amplitudes per unit (nu / sigma): rescale so grid norms are dimensionless
    samples = (psi0 + (math.cos(rabi) - 1.0) / R * np.conj(phi) * jp[idx]) * config.sigma
    return GridState(samples, extent, count)
