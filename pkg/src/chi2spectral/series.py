"""Second-order Taylor and Dyson state components and their fidelity.

Units: detunings enter as ``x = nu / sigma`` and time as ``tau = sigma t``.
Amplitudes are reported with the common coupling factor ``(chi L / i hbar)^2``
stripped, and the Taylor term additionally without its ``1/2!``:

    taylor2(x_s, x_i) = A * integral G(tau) dtau
    dyson2(x_s, x_i)  = A * integral G(tau) (1 + erf(d tau + i g)) / 2 dtau
    G(tau) = exp(-(a tau^2 + b tau + c))

so the physical second-order states are ``taylor2 / 2`` and ``dyson2`` times
the same constant, and ``dyson2 == taylor2 / 2`` whenever time ordering is
irrelevant.

Two independent routes produce the coefficients. :func:`second_order_coefficients`
evaluates closed forms (crystal-centred frame, single slice).
:class:`GaussianPM` / :func:`two_time_kernel` integrate out the internal
frequencies of the two-time interaction kernel by exact multivariate
Gaussian algebra for any Gaussian phase-matching function, which is what
the poled medium and the phased (uncentred) frame use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _accel
from .errors import DegenerateDispersionError, QuadratureError
from .oracle import QuadratureSpec, gauss_legendre, integrate_1d
from .spectral import CrystalConfig, DispersionProfile, gamma_fwhm

__all__ = [
    "SecondOrderCoefficients",
    "FidelityReport",
    "GaussianPM",
    "KernelCoefficients",
    "single_slice_pm",
    "two_time_kernel",
    "second_order_coefficients",
    "optimum_display_coefficients",
    "taylor2_amplitude",
    "dyson2_amplitude",
    "fidelity_f2",
    "fidelity_from_coefficients",
    "fidelity_f2_grid",
]


@dataclass(frozen=True)
class SecondOrderCoefficients:
    """Coefficients of the single-time integrals; ``b``, ``c``, ``g`` are
    arrays over the requested detunings. ``g`` may be complex in frames
    where the phase-matching function carries a linear phase."""

    A: float
    a: float
    b: np.ndarray
    c: np.ndarray
    d: float
    g: np.ndarray

    @property
    def erf_offset(self):
        return 1j * np.asarray(self.g)

    @property
    def centre(self):
        return -np.real(self.b) / (2.0 * self.a)

    def taylor(self):
        if not self.a > 0:
            raise DegenerateDispersionError("a = 0: the unordered time integral diverges")
        return self.A * np.sqrt(np.pi / self.a) * np.exp(np.asarray(self.b) ** 2 / (4.0 * self.a) - np.asarray(self.c))

    def integrand(self, tau, k=None):
        """(full, ordered) time integrands at ``tau`` for detuning index ``k``."""
        b = np.asarray(self.b).reshape(-1)[k or 0]
        c = np.asarray(self.c).reshape(-1)[k or 0]
        e = np.asarray(self.erf_offset).reshape(-1)[k or 0]
        g = self.A * np.exp(-(self.a * tau * tau + b * tau + c))
        return g, 0.5 * g * (1.0 + _accel.erf_complex_numpy(self.d * tau + e))


@dataclass(frozen=True)
class FidelityReport:
    f2: float
    taylor_norm: float
    dyson_norm: float
    overlap_phase: float
    quadrature_error_estimate: float
    nodes: tuple = ()
    normalization: str = "amplitudes carry (chi L / i hbar)^2 stripped; taylor_norm is the norm of taylor2/2"


# ---------------------------------------------------------------------------
# generic Gaussian route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianPM:
    """Phase-matching function over internal detunings x = (x_p, x_s, x_i):

        amp * exp(-x^T Q x / 2 + i m . x)
    """

    Q: np.ndarray
    m: np.ndarray
    amp: float

    def __call__(self, x_p, x_s, x_i):
        x = np.stack(np.broadcast_arrays(np.asarray(x_p, float), np.asarray(x_s, float), np.asarray(x_i, float)))
        quad = np.einsum("i...,ij,j...->...", x, self.Q, x)
        lin = np.einsum("i,i...->...", self.m, x)
        return self.amp * np.exp(-0.5 * quad + 1j * lin)

    def with_factor(self, w, weight: float, phase: float = 0.0) -> "GaussianPM":
        """Multiply by exp(-weight (w.x)^2 / 2 + i phase w.x)."""
        w = np.asarray(w, float)
        return replace(self, Q=self.Q + weight * np.outer(w, w), m=self.m + phase * w)


def single_slice_pm(profile: DispersionProfile, config: CrystalConfig, *, centered: bool = True, flat: bool = False) -> GaussianPM:
    """Gaussian-approximated sinc(L dk/2) [exp(i L dk/2)] in x-units.

    ``sqrt(gamma) L dk = kappa . x`` with kappa = (kappa_p, -kappa_s, -kappa_i).
    ``flat`` replaces the sinc envelope by 1 (and drops its phase).
    """
    g = gamma_fwhm()
    kp, ks, ki = config.kappas(profile)
    v = np.array([kp, -ks, -ki])
    if flat:
        return GaussianPM(np.zeros((3, 3)), np.zeros(3), 1.0)
    pm = GaussianPM(np.zeros((3, 3)), np.zeros(3), math.sqrt(g * math.pi))
    return pm.with_factor(v, 0.5, 0.0 if centered else 0.5 / math.sqrt(g))


@dataclass(frozen=True)
class KernelCoefficients:
    """K(t1, t2) = exp(log_pref + q11 t1^2 + q12 t1 t2 + q22 t2^2 + l1 t1 + l2 t2 + c0)."""

    log_pref: float
    q11: float
    q12: float
    q22: float
    l1: np.ndarray
    l2: np.ndarray
    c0: np.ndarray

    def __call__(self, t1, t2, k: int = 0):
        l1 = np.asarray(self.l1).reshape(-1)[k]
        l2 = np.asarray(self.l2).reshape(-1)[k]
        c0 = np.asarray(self.c0).reshape(-1)[k]
        return np.exp(self.log_pref + self.q11 * t1 * t1 + self.q12 * t1 * t2 + self.q22 * t2 * t2 + l1 * t1 + l2 * t2 + c0)

    def reduce(self) -> SecondOrderCoefficients:
        """Integrate t1 over (-inf, t2] in closed form."""
        alpha = -self.q11
        if not alpha > 0:
            raise DegenerateDispersionError("two-time kernel does not decay in t1")
        ra = math.sqrt(alpha)
        a = -(self.q22 + self.q12**2 / (4.0 * alpha))
        b = -(self.l2 + self.q12 * self.l1 / (2.0 * alpha))
        c = -(self.c0 + self.l1**2 / (4.0 * alpha))
        d = ra - self.q12 / (2.0 * ra)
        g = 1j * self.l1 / (2.0 * ra)
        A = math.exp(self.log_pref) * math.sqrt(math.pi / alpha)
        return SecondOrderCoefficients(A, a, b, c, d, g)


_U1 = np.array([-1.0, 1.0, 1.0])
_U2 = np.array([1.0, 0.0, 0.0])


def two_time_kernel(pm: GaussianPM, y_s, y_i, xi_s: float = 0.0, xi_i: float = 0.0) -> KernelCoefficients:
    """Two-time kernel <y_s, y_i| H_-(t2) H_+(t1) |psi_0> with internal
    frequencies integrated out exactly.

    ``xi_s``, ``xi_i`` are the input photons' linear spectral phases in
    units of 1/sigma.
    """
    y_s = np.asarray(y_s, float).reshape(-1)
    y_i = np.asarray(y_i, float).reshape(-1)
    Q, m = pm.Q, pm.m
    M = Q + np.diag([Q[0, 0], 0.5, 0.5])
    P = np.linalg.inv(M)
    det = np.linalg.det(M)
    # J = J0 + t1 * i U1 + t2 * i U2
    J0 = np.zeros((y_s.size, 3), complex)
    J0 += 1j * (m + np.array([-m[0], xi_s, xi_i]))
    J0[:, 0] -= Q[0, 1] * y_s + Q[0, 2] * y_i
    const = -0.5 * (Q[1, 1] * y_s**2 + 2 * Q[1, 2] * y_s * y_i + Q[2, 2] * y_i**2) - 1j * (m[1] * y_s + m[2] * y_i)
    q11 = -0.5 * _U1 @ P @ _U1
    q12 = -(_U1 @ P @ _U2)
    q22 = -0.5 * _U2 @ P @ _U2
    l1 = 1j * (J0 @ P @ _U1)
    l2 = 1j * (J0 @ P @ _U2) - 1j * (y_s + y_i)
    c0 = 0.5 * np.einsum("ki,ij,kj->k", J0, P, J0) + const
    # |amp|^2 (2 pi)^(-1/2) photon normalization, (2 pi)^(3/2) / sqrt(det M)
    log_pref = math.log(abs(pm.amp) ** 2 * 2.0 * math.pi / math.sqrt(det))
    return KernelCoefficients(log_pref, float(q11), float(q12), float(q22), l1, l2, c0)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def second_order_coefficients(profile: DispersionProfile, config: CrystalConfig, nu_s, nu_i) -> SecondOrderCoefficients:
    """Closed-form coefficients for one slice in the crystal-centred frame,
    valid for any dispersion (not only at the optimum)."""
    g = gamma_fwhm()
    kp, ks, ki = config.kappas(profile)
    ds, di = ks - kp, ki - kp
    ys = np.asarray(nu_s, float) / config.sigma
    yi = np.asarray(nu_i, float) / config.sigma
    dd2 = (ds - di) ** 2 + 2.0
    s1 = ds * ds + di * di + 1.0
    den = kp * kp * dd2 + s1
    q = ks * ks + ki * ki + 2.0
    p = ks * ys + ki * yi
    alpha = den / (kp * kp * q)
    ra = math.sqrt(alpha)
    a = dd2 / den
    b = -1j * ((kp * ds * dd2 - s1) * ys + (kp * di * dd2 - s1) * yi) / den
    c = s1 * p * p / (4.0 * den)
    d = (kp * dd2 - (ds + di)) / (kp * q * ra)
    gg = p * (s1 + kp * (ds + di)) / (2.0 * kp * q * ra)
    A = 4.0 * math.sqrt(2.0) * math.pi**2.5 * g / math.sqrt(den)
    return SecondOrderCoefficients(A, a, b, c, d, gg)


def optimum_display_coefficients(profile: DispersionProfile, nu_s, nu_i, sigma: float) -> SecondOrderCoefficients:
    """Coefficient display valid under extended phase matching plus the
    special condition (L eliminated), in tau = sigma t units.

    ``A`` uses an alternative normalization that differs from
    :func:`second_order_coefficients` by a detuning-independent factor.
    """
    ks, ki = profile.kp_s, profile.kp_i
    if ks == ki:
        raise DegenerateDispersionError("display coefficients need kp_s != kp_i")
    g = gamma_fwhm()
    ys = np.asarray(nu_s, float) / sigma
    yi = np.asarray(nu_i, float) / sigma
    s2 = ki * ki + ks * ks
    root = math.sqrt((ki**4 + ki**3 * ks + ki * ks**3 + ks**4) / ((ki - ks) ** 2 * s2))
    A = math.sqrt(math.pi * g * g * (ki + ks) ** 2 / (2.0 * s2))
    a = (ki - ks) ** 2 / s2
    b = 1j * (ki - ks) * (ki * ys - ks * yi) / s2
    c = (ks * ys + ki * yi) ** 2 / (4.0 * s2)
    d = (ki - ks) ** 2 / (math.sqrt(2.0) * (ki * ki - ki * ks + ks * ks)) * root
    gg = (ki - ks) ** 2 * (ks * ys + ki * yi) / (2.0 * math.sqrt(2.0) * (ki**3 + ks**3)) * root
    return SecondOrderCoefficients(A, a, b, c, d, gg)


def taylor2_amplitude(profile: DispersionProfile, config: CrystalConfig, nu_s, nu_i):
    """Second-order Taylor joint amplitude (see module docstring)."""
    return second_order_coefficients(profile, config, nu_s, nu_i).taylor()


def dyson2_amplitude(
    profile: DispersionProfile,
    config: CrystalConfig,
    nu_s,
    nu_i,
    spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-10, abs_tol=0.0, window=8.0),
):
    """Second-order Dyson joint amplitude by adaptive quadrature over time.

    The window is ``centre +- window / sqrt(a)``; with the default 8 the
    Gaussian tails beyond it are below exp(-64) of the peak.
    """
    co = second_order_coefficients(profile, config, nu_s, nu_i)
    return _dyson_adaptive(co, spec).reshape(np.shape(np.asarray(nu_s) + np.asarray(nu_i)))


def _dyson_adaptive(co: SecondOrderCoefficients, spec: QuadratureSpec):
    if not co.a > 0:
        raise DegenerateDispersionError("a = 0: the time integral diverges")
    b = np.asarray(co.b).reshape(-1)
    centre = np.asarray(co.centre).reshape(-1) * np.ones(b.size)
    half = spec.window / math.sqrt(co.a)
    out = np.empty(b.size, complex)
    for k in range(b.size):
        val, err = integrate_1d(lambda t, k=k: co.integrand(t, k)[1], centre[k] - half, centre[k] + half, spec)
        out[k] = val
    return out


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

def _tau_nodes(n: int, window: float):
    x, w = gauss_legendre(n)
    return window * np.asarray(x), window * np.asarray(w)


def _amplitudes(co: SecondOrderCoefficients, n_tau: int, window: float):
    s, w = _tau_nodes(n_tau, window)
    b = np.asarray(co.b).reshape(-1)
    full, ordered = _accel.tau_sums(
        co.a, co.d, b, np.asarray(co.c).reshape(-1) * np.ones(b.size), np.asarray(co.erf_offset).reshape(-1) * np.ones(b.size),
        np.asarray(co.centre).reshape(-1) * np.ones(b.size), s, w,
    )
    return co.A * full, co.A * ordered


def _f2_once(coef_fn, extent: float, n_y: int, n_tau: int, window: float):
    x, w = gauss_legendre(n_y)
    y = extent * np.asarray(x)
    wy = extent * np.asarray(w)
    ys, yi = np.meshgrid(y, y, indexing="ij")
    wt = np.outer(wy, wy).ravel()
    co = coef_fn(ys.ravel(), yi.ravel())
    taylor, dyson = _amplitudes(co, n_tau, window)
    psi_t = 0.5 * taylor
    tt = np.sum(wt * np.abs(psi_t) ** 2)
    dd = np.sum(wt * np.abs(dyson) ** 2)
    td = np.sum(wt * np.conj(psi_t) * dyson)
    return float(abs(td) ** 2 / (tt * dd)), math.sqrt(tt), math.sqrt(dd), float(np.angle(td))


def fidelity_from_coefficients(coef_fn, *, extent: float = 6.0, rel_tol: float = 1e-6, window: float = 8.0,
                               n_y: int = 48, n_tau: int = 96, max_refinements: int = 4) -> FidelityReport:
    """F2 from a coefficient function ``coef_fn(y_s, y_i)`` (x-units).

    Tensor Gauss-Legendre over the detuning square and over scaled time;
    both node counts are doubled until F2 changes by less than ``rel_tol``.
    """
    prev = _f2_once(coef_fn, extent, n_y, n_tau, window)
    for _ in range(max_refinements):
        n_y *= 2
        n_tau *= 2
        cur = _f2_once(coef_fn, extent, n_y, n_tau, window)
        err = abs(cur[0] - prev[0])
        if err <= rel_tol * cur[0]:
            f2 = min(cur[0], 1.0)
            return FidelityReport(f2, cur[1], cur[2], cur[3], err, (n_y, n_tau))
        prev = cur
    raise QuadratureError(f"F2 did not converge to {rel_tol:g} (last change {err:.3e})")


def fidelity_f2(profile: DispersionProfile, config: CrystalConfig, *, rel_tol: float = 1e-6, extent: float = 6.0,
                centered: bool = True, delays: tuple[float, float] | None = None) -> FidelityReport:
    """Fidelity between the second-order Taylor and Dyson state components.

    ``centered=False`` keeps the exp(i L dk / 2) phase (crystal entrance at
    z = 0); ``delays`` adds input linear spectral phases (seconds), which
    only matter in that frame.
    """
    if centered and delays is None:
        def coef_fn(ys, yi):
            return second_order_coefficients(profile, config, ys * config.sigma, yi * config.sigma)
    else:
        pm = single_slice_pm(profile, config, centered=centered)
        xs, xi = (0.0, 0.0) if delays is None else (delays[0] * config.sigma, delays[1] * config.sigma)

        def coef_fn(ys, yi):
            return two_time_kernel(pm, ys, yi, xs, xi).reduce()

    return fidelity_from_coefficients(coef_fn, extent=extent, rel_tol=rel_tol)


def fidelity_f2_grid(profile: DispersionProfile, config: CrystalConfig, *, count: int = 512, extent: float = 6.0,
                     n_tau: int = 192, window: float = 8.0) -> float:
    """F2 from trapezoid-rule grid states (resolution study)."""
    from .oracle import GridState, grid_fidelity

    axis = np.linspace(-extent, extent, count)
    ys, yi = np.meshgrid(axis, axis, indexing="ij")
    co = second_order_coefficients(profile, config, ys.ravel() * config.sigma, yi.ravel() * config.sigma)
    taylor, dyson = _amplitudes(co, n_tau, window)
    t_state = GridState(taylor.reshape(count, count), extent, count)
    d_state = GridState(dyson.reshape(count, count), extent, count)
    return grid_fidelity(t_state, d_state)
