"""Oracle-equivalence and invariant suite behind ``chi2spectral validate``.

Each check returns a measured value, the tolerance it is held to and a
pass flag. Oracles that guard a closed form never share code with it: in
particular the R check rebuilds gamma by its own bisection, so a corrupted
gamma is caught.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from . import _accel, bellgate, conversion, poling, series
from .oracle import GridState, QuadratureSpec, grid_inner_product, integrate_1d, ordered_double_integral
from .spectral import (
    BASELINE_PROFILE,
    BASELINE_SIGMA,
    CrystalConfig,
    DispersionProfile,
    GaussianPhoton,
    delta_k,
    gamma_fwhm,
    gamma_override,
    pm_function,
    sinc_half_root,
)

__all__ = ["CheckResult", "run_validation", "suite_passed", "CHECKS", "bisect_gamma"]


@dataclass
class CheckResult:
    name: str
    module: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    advisory: bool = False


CHECKS: list[tuple[str, str, Callable, bool]] = []


def check(module: str, advisory: bool = False):
    """Register a check. Advisory checks are reported but do not gate the
    exit status."""

    def wrap(fn):
        CHECKS.append((fn.__name__, module, fn, advisory))
        return fn

    return wrap


def bisect_gamma() -> float:
    """gamma from a plain bisection on sin(x)/x = 1/2, sharing nothing with
    the library's root finder."""
    lo, hi = 1.0, 2.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.sin(mid) / mid > 0.5:
            lo = mid
        else:
            hi = mid
    return math.log(2.0) / (0.5 * (lo + hi)) ** 2


def _opt():
    return conversion.optimal_config(BASELINE_PROFILE, BASELINE_SIGMA)


def _le(measured, tol, detail=""):
    return measured, tol, bool(measured <= tol), detail


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(np.asarray(b)), 1e-300)))


# --------------------------------------------------------------------- spectral

@check("spectral-core")
def gamma_root(ctx):
    x0 = sinc_half_root()
    return _le(abs(math.sin(x0) / x0 - 0.5), 1e-12, f"x0={x0:.15g}")


@check("spectral-core")
def gamma_value(ctx):
    return _le(abs(gamma_fwhm() - 0.193), 5e-4, f"gamma={gamma_fwhm():.12g}")


@check("spectral-core")
def photon_normalization(ctx):
    ph = GaussianPhoton(0.0, BASELINE_SIGMA, xi=3e-10)
    val, _ = integrate_1d(lambda w: abs(ph.amplitude_detuning(w)) ** 2, -12 * BASELINE_SIGMA, 12 * BASELINE_SIGMA,
                          QuadratureSpec(rel_tol=1e-12, abs_tol=0.0))
    return _le(abs(float(np.real(val)) - 1.0), 1e-9)


@check("spectral-core")
def delta_k_linearity(ctx):
    rng = ctx.rng
    a = rng.normal(size=(3, 20)) * BASELINE_SIGMA
    b = rng.normal(size=(3, 20)) * BASELINE_SIGMA
    lhs = delta_k(BASELINE_PROFILE, *a) + delta_k(BASELINE_PROFILE, *b)
    rhs = delta_k(BASELINE_PROFILE, *(a + b))
    zero = abs(float(delta_k(BASELINE_PROFILE, 0.0, 0.0, 0.0)))
    return _le(max(_rel(lhs, rhs), zero), 1e-12)


@check("spectral-core")
def pm_parity(ctx):
    p, cfg = _opt()
    off = DispersionProfile(5.6e-9, 5.2e-9, 5.5e-9)
    nu = ctx.rng.normal(size=(2, 50)) * BASELINE_SIGMA
    a = pm_function(cfg, off, nu[0], nu[1])
    b = pm_function(cfg, off, -nu[0], -nu[1])
    err = max(float(np.max(np.abs(np.abs(a) - np.abs(b)))), float(np.max(np.abs(np.angle(a) + np.angle(b)))))
    return _le(err, 1e-12)


# ----------------------------------------------------------------------- series

@check("series-engine")
def coefficients_vs_gaussian_algebra(ctx):
    worst = 0.0
    for _ in range(5):
        ks, ki = ctx.rng.uniform(4e-9, 7e-9, size=2)
        prof = DispersionProfile(ks, ki, ctx.rng.uniform(4e-9, 7e-9))
        sigma = ctx.rng.uniform(0.5e9, 2e9)
        cfg = CrystalConfig(ctx.rng.uniform(1.0, 10.0), sigma)
        y = ctx.rng.uniform(-3, 3, size=(2, 4))
        a = series.second_order_coefficients(prof, cfg, y[0] * sigma, y[1] * sigma)
        b = series.two_time_kernel(series.single_slice_pm(prof, cfg), y[0], y[1]).reduce()
        for f in ("A", "a", "d"):
            worst = max(worst, _rel(getattr(a, f), getattr(b, f)))
        for f in ("b", "c", "g"):
            scale = max(1.0, float(np.max(np.abs(getattr(b, f)))))
            worst = max(worst, float(np.max(np.abs(np.asarray(getattr(a, f)) - getattr(b, f)))) / scale)
    return _le(worst, 1e-9)


@check("series-engine")
def display_coefficients_at_optimum(ctx):
    worst = 0.0
    for _ in range(5):
        ks, ki = ctx.rng.uniform(4e-9, 7e-9, size=2)
        sigma = ctx.rng.uniform(0.5e9, 2e9)
        prof, cfg = conversion.optimal_config(DispersionProfile(ks, ki, ks), sigma)
        y = ctx.rng.uniform(-3, 3, size=(2, 3)) * sigma
        a = series.second_order_coefficients(prof, cfg, *y)
        b = series.optimum_display_coefficients(prof, *y, sigma)
        for f in ("a", "d", "b", "c", "g"):
            worst = max(worst, float(np.max(np.abs(np.asarray(getattr(a, f)) - getattr(b, f)))) / max(1.0, float(np.max(np.abs(getattr(b, f))))))
    return _le(worst, 1e-9)


@check("series-engine")
def taylor_vs_time_quadrature(ctx):
    p, cfg = _opt()
    y = ctx.rng.uniform(-3, 3, size=(2, 5))
    co = series.second_order_coefficients(p, cfg, y[0] * cfg.sigma, y[1] * cfg.sigma)
    closed = co.taylor()
    worst = 0.0
    for k in range(5):
        c = float(np.asarray(co.centre).reshape(-1)[k])
        half = 10.0 / math.sqrt(co.a)
        val, _ = integrate_1d(lambda t: co.integrand(t, k)[0], c - half, c + half, QuadratureSpec(rel_tol=1e-10, abs_tol=0.0))
        worst = max(worst, abs(val - closed[k]) / abs(closed[k]))
    return _le(worst, 1e-8)


@check("series-engine")
def dyson_vs_ordered_double_integral(ctx):
    p, cfg = _opt()
    y = ctx.rng.uniform(-2, 2, size=(2, 3))
    ker = series.two_time_kernel(series.single_slice_pm(p, cfg), y[0], y[1])
    co = ker.reduce()
    dyson = series.dyson2_amplitude(p, cfg, y[0] * cfg.sigma, y[1] * cfg.sigma)
    worst = 0.0
    span = 9.0 / math.sqrt(min(co.a, -ker.q11))
    for k in range(3):
        c = float(np.asarray(co.centre).reshape(-1)[k])
        val, _ = ordered_double_integral(lambda t1, t2, k=k: ker(t1, t2, k), c - span, c + span, QuadratureSpec(rel_tol=1e-10, abs_tol=0.0))
        worst = max(worst, abs(val - dyson[k]) / abs(dyson[k]))
    return _le(worst, 1e-6)


@check("series-engine")
def ordered_halves_sum(ctx):
    p, cfg = _opt()
    y = ctx.rng.uniform(-3, 3, size=(2, 4))
    co = series.second_order_coefficients(p, cfg, y[0] * cfg.sigma, y[1] * cfg.sigma)
    reflected = series.SecondOrderCoefficients(co.A, co.a, co.b, co.c, -co.d, -np.asarray(co.g))
    spec = QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)
    total = series._dyson_adaptive(co, spec) + series._dyson_adaptive(reflected, spec)
    return _le(_rel(total, co.taylor()), 1e-9)


@check("series-engine")
def f2_baseline(ctx):
    p, cfg = _opt()
    r = series.fidelity_f2(p, cfg, rel_tol=ctx.tol)
    return _le(abs(r.f2 - 0.747), 5e-3, f"f2={r.f2:.9f}")


@check("series-engine")
def f2_commuting_limit(ctx):
    p, cfg = _opt()
    deg = DispersionProfile.extended_phase_matched(5.6e-9, 5.6e-9 * (1 - 1e-6))
    r = series.fidelity_f2(deg, cfg, rel_tol=ctx.tol)
    return _le(1.0 - r.f2, 1e-3, f"f2={r.f2:.12f} at fixed L")


@check("series-engine")
def f2_rescale_invariance(ctx):
    p, cfg = _opt()
    a = series.fidelity_f2(p, cfg, rel_tol=ctx.tol).f2
    b = series.fidelity_f2(p, CrystalConfig(cfg.L / 2.0, cfg.sigma * 2.0), rel_tol=ctx.tol).f2
    return _le(abs(a - b), 1e-6)


@check("series-engine")
def separability(ctx):
    p, cfg = _opt()
    pts = ctx.rng.uniform(-2, 2, size=(4, 30)) * cfg.sigma

    def det(fn):
        g11 = fn(p, cfg, pts[0], pts[1])
        g22 = fn(p, cfg, pts[2], pts[3])
        g12 = fn(p, cfg, pts[0], pts[3])
        g21 = fn(p, cfg, pts[2], pts[1])
        return np.max(np.abs(g11 * g22 - g12 * g21) / np.maximum(np.abs(g11 * g22), np.abs(g12 * g21)))

    t = float(det(series.taylor2_amplitude))
    d = float(det(series.dyson2_amplitude))
    ok = t < 1e-6 and d > 1e-3
    return t, 1e-6, ok, f"taylor det {t:.2e}, dyson det {d:.2e} (must exceed 1e-3)"


# ------------------------------------------------------------------- conversion

@check("conversion")
def r_constant_oracle(ctx):
    """Quadrature of the Gaussian-sinc with an independently bisected gamma."""
    g = bisect_gamma()
    worst = 0.0
    for _ in range(3):
        prof = DispersionProfile(*ctx.rng.uniform(4e-9, 7e-9, size=3))
        cfg = CrystalConfig(ctx.rng.uniform(1, 10), BASELINE_SIGMA)
        nu_p = ctx.rng.normal() * BASELINE_SIGMA
        slope = cfg.L * (prof.kp_s - prof.kp_i) / 2.0
        centre = (prof.kp_p - prof.kp_i) * nu_p / (prof.kp_s - prof.kp_i)

        def integrand(w):
            half = 0.5 * cfg.L * delta_k(prof, nu_p, w, nu_p - w)
            return g * math.pi * np.exp(-2.0 * g * half * half)

        width = 12.0 / abs(slope)
        val, _ = integrate_1d(integrand, centre - width, centre + width, QuadratureSpec(rel_tol=1e-12, abs_tol=0.0))
        worst = max(worst, abs(float(np.real(val)) - conversion.r_constant(cfg, prof)) / float(np.real(val)))
    return _le(worst, 1e-8)


@check("conversion")
def b_and_sigma_p_oracle(ctx):
    worst = 0.0
    for _ in range(3):
        prof = DispersionProfile(*ctx.rng.uniform(4e-9, 7e-9, size=3))
        cfg = CrystalConfig(ctx.rng.uniform(1, 10), BASELINE_SIGMA)
        sp = conversion.sigma_p(cfg, prof)
        nu = np.linspace(-10 * sp, 10 * sp, 801)
        jp = np.abs(conversion.j_pump(cfg, prof, nu)) ** 2
        b2 = trapezoid(jp, nu)
        m2 = trapezoid(jp * nu * nu, nu) / b2
        worst = max(worst, abs(b2 / conversion.b_constant(cfg, prof) ** 2 - 1.0), abs(math.sqrt(m2) / sp - 1.0))
    return _le(worst, 1e-6)


@check("conversion")
def j_pump_gaussian(ctx):
    p, cfg = _opt()
    sp = conversion.sigma_p(cfg, p)
    nu = np.linspace(-3 * sp, 3 * sp, 41)
    logj = np.log(np.abs(conversion.j_pump(cfg, p, nu)))
    fit = np.polyval(np.polyfit(nu / sp, logj, 2), nu / sp)
    return _le(float(np.max(np.abs(fit - logj))), 1e-6)


@check("conversion")
def podd_optimum_and_trough(ctx):
    axis, surf = conversion.podd_surface()
    peaks = conversion.surface_maxima(axis, surf)
    top = max(abs(v - 1.0) for *_, v in peaks)
    loc = max(abs(abs(pt[0]) - 1 / math.sqrt(2)) + abs(abs(pt[1]) - 1 / math.sqrt(2)) for _, _, pt, _ in peaks)
    trough = float(np.max(np.diag(surf)))
    ok = top <= 1e-6 and trough < 1e-12 and loc < 1e-4
    return top, 1e-6, ok, f"peak location error {loc:.2e}, diagonal max {trough:.1e}"


@check("conversion")
def podd_symmetry(ctx):
    d = ctx.rng.uniform(-2, 2, size=(2, 50))
    f = conversion.p_odd_closed_form
    err = max(_rel(f(d[0], d[1]), f(d[1], d[0])), _rel(f(-d[0], -d[1]), f(d[0], d[1])))
    return _le(err, 1e-14)


@check("conversion")
def b2_over_r_identity(ctx):
    worst = 0.0
    for _ in range(10):
        prof = DispersionProfile(*ctx.rng.uniform(4e-9, 7e-9, size=3))
        cfg = CrystalConfig(ctx.rng.uniform(0.5, 20), BASELINE_SIGMA)
        rep = conversion.p_odd(cfg, prof, math.pi / 2)
        worst = max(worst, abs(rep.p_odd - rep.p_odd_closed_form) / max(rep.p_odd_closed_form, 1e-300))
    return _le(worst, 1e-8)


@check("conversion")
def epsilon_sensitivity(ctx):
    a = conversion.condition_error_sensitivity(0.01, 0.01, BASELINE_PROFILE, BASELINE_SIGMA)
    b = conversion.condition_error_sensitivity(0.001, 0.001, BASELINE_PROFILE, BASELINE_SIGMA)
    c = conversion.condition_error_sensitivity(0.0, 0.0, BASELINE_PROFILE, BASELINE_SIGMA)
    ok = abs(a - 0.9803) <= 5e-4 and abs(b - 0.9998) <= 2e-4 and abs(c - 1.0) < 1e-12
    return abs(a - 0.9803), 5e-4, ok, f"P(0.01)={a:.6f} P(0.001)={b:.6f} P(0)={c:.15f}"


@check("conversion")
def rabi_closure(ctx):
    p, cfg = _opt()
    worst = 0.0
    for angle in ctx.rng.uniform(0, math.pi, size=4):
        g = conversion.psi_even_grid(cfg, p, angle, count=ctx.grid)
        podd = conversion.p_odd(cfg, p, angle).p_odd
        worst = max(worst, abs(g.norm**2 - math.cos(angle) ** 2), abs(g.norm**2 + podd - 1.0))
    return _le(worst, 1e-9)


@check("conversion")
def phi_j_equals_r_f_f(ctx):
    p, cfg = _opt()
    nu = ctx.rng.uniform(-2, 2, size=(2, 5)) * cfg.sigma
    jp = conversion.j_pump(cfg, p, nu[0] + nu[1])
    lhs = np.conj(pm_function(cfg, p, nu[0], nu[1], centered=True)) * jp
    ph = GaussianPhoton(0.0, cfg.sigma)
    rhs = conversion.r_constant(cfg, p) * ph.amplitude_detuning(nu[0]) * ph.amplitude_detuning(nu[1])
    return _le(_rel(lhs, rhs), 1e-6)


# ---------------------------------------------------------------------- poling

@check("poling")
def envelope_n1_reduction(ctx):
    p, cfg = _opt()
    pc = poling.PolingConfig.matched_for(p, cfg.L, 1)
    nu = ctx.rng.normal(size=(2, 64)) * cfg.sigma
    a = poling.poling_envelope(pc, p, nu[0] + nu[1], nu[0], nu[1])
    b = pm_function(cfg, p, nu[0], nu[1])
    return _le(float(np.max(np.abs(a - b))), 0.0, "bitwise")


@check("poling")
def phi_reduction_identity(ctx):
    p, cfg = _opt()
    pc = poling.PolingConfig.matched_for(p, cfg.L, 5)
    nu = ctx.rng.normal(size=(3, 10)) * cfg.sigma
    return _le(_rel(poling.phi_general(pc, p, *nu), poling.phi_reduction(pc, p, *nu)), 1e-12)


@check("poling", advisory=True)
def envelope_branch_agreement(ctx):
    # The Gaussian stand-in overshoots the curvature of the exact ratio
    # (0.048 vs 0.042 times (N^2 - 1) phi^2), so ~0.018 is the true gap.
    p, cfg = _opt()
    pc = poling.PolingConfig.matched_for(p, cfg.L, 5)
    phi = np.linspace(-np.pi / 5, np.pi / 5, 2001)
    n = pc.N
    exact = np.sin(n * phi / 2) / (n * np.sin(np.where(phi == 0, 1.0, phi) / 2))
    exact = np.where(phi == 0, 1.0, exact)
    gauss = np.exp(-gamma_fwhm() * (n * n - 1) * phi * phi / 4)
    gap = float(np.max(np.abs(exact - gauss)))
    return gap, 0.01, gap <= 0.01, "approximation quality over |N phi / 2| <= pi/2"


@check("poling")
def hamiltonian_n_scaling(ctx):
    p, cfg = _opt()
    nu = ctx.rng.normal(size=(2, 20)) * cfg.sigma
    worst = 0.0
    for n in (2, 5, 9):
        pc = poling.PolingConfig.matched_for(p, cfg.L, n)
        env = poling.poling_envelope(pc, p, nu[0] + nu[1], nu[0], nu[1], normalized=False)
        worst = max(worst, _rel(env, n * pm_function(cfg, p, nu[0], nu[1])))
    return _le(worst, 1e-6)


@check("poling")
def f2_poling_convergence(ctx):
    values = [poling.f2_of_n(n, BASELINE_PROFILE, BASELINE_SIGMA, rel_tol=ctx.tol) for n in (1, 2, 3, 5, 8, 13)]
    mono = all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    ok = abs(values[3] - 0.998) <= 3e-3 and mono and abs(values[0] - 0.747) <= 5e-3
    return abs(values[3] - 0.998), 3e-3, ok, "F2: " + ", ".join(f"{v:.6f}" for v in values)


@check("poling")
def commuting_limit_decay(ctx):
    p, cfg = _opt()
    dev = {n: poling.commuting_limit_check(poling.PolingConfig.matched_for(p, cfg.L, n), p, cfg.sigma) for n in (1, 2, 10, 30)}
    ok = dev[1] > 0.1 and dev[10] < dev[2] and dev[30] < 1e-2
    return dev[30], 1e-2, ok, ", ".join(f"N={n}: {v:.4g}" for n, v in dev.items())


# ---------------------------------------------------------------------- oracle

@check("oracle")
def quadrature_identities(ctx):
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0)
    g, _ = integrate_1d(lambda x: np.exp(-x * x), -8, 8, spec)
    h, _ = integrate_1d(lambda x: np.exp(-x * x) * 0.5 * (1 + _accel.erf_complex_numpy(x)), -8, 8, spec)
    wedge, _ = ordered_double_integral(lambda a, b: np.exp(-a * a - b * b), -8, 8, QuadratureSpec(rel_tol=1e-10, abs_tol=0.0))
    err = max(abs(g - math.sqrt(math.pi)) / math.sqrt(math.pi), abs(h - math.sqrt(math.pi) / 2) / math.sqrt(math.pi),
              abs(wedge - math.pi / 2) / (math.pi / 2))
    return _le(float(err), 1e-9)


@check("oracle")
def grid_inner_product_symmetry(ctx):
    a = GridState(ctx.rng.normal(size=(33, 33)) + 1j * ctx.rng.normal(size=(33, 33)), 6.0, 33)
    b = GridState(ctx.rng.normal(size=(33, 33)) + 1j * ctx.rng.normal(size=(33, 33)), 6.0, 33)
    err = abs(grid_inner_product(a, b) - np.conj(grid_inner_product(b, a)))
    aa = grid_inner_product(a, a)
    ok = err < 1e-12 and abs(aa.imag) < 1e-12 and aa.real >= 0
    return float(err), 1e-12, ok


@check("oracle")
def grid_f2_resolution(ctx):
    p, cfg = _opt()
    a = series.fidelity_f2(p, cfg, rel_tol=ctx.tol).f2
    b = series.fidelity_f2_grid(p, cfg, count=ctx.grid, n_tau=96)
    return _le(abs(a - b), 1e-3, f"grid {ctx.grid}: {b:.9f}")


@check("oracle")
def kernel_backends_agree(ctx):
    z = ctx.rng.uniform(-6, 6, size=200) + 1j * ctx.rng.uniform(-3, 3, size=200)
    e = float(np.max(np.abs(_accel.erf_complex_numba(z) - _accel.erf_complex_numpy(z)) / np.maximum(np.abs(_accel.erf_complex_numpy(z)), 1e-300)))
    p, cfg = _opt()
    co = series.second_order_coefficients(p, cfg, ctx.rng.normal(size=50) * cfg.sigma, ctx.rng.normal(size=50) * cfg.sigma)
    s, w = series._tau_nodes(64, 8.0)
    args = (co.a, co.d, co.b, co.c * np.ones(50), co.erf_offset, co.centre, s, w)
    f1, o1 = _accel.tau_sums_numpy(*args)
    f2, o2 = _accel.tau_sums_numba(*args)
    return _le(max(e, _rel(f1, f2), _rel(o1, o2)), 1e-11)


# -------------------------------------------------------------------- bellgate

@check("bellgate")
def bell_no_misclassification(ctx):
    wrong = 0
    for p in (0.0, 0.5, 1.0):
        _, _, w = bellgate.bell_monte_carlo(p, 100_000, ctx.seed)
        wrong += w
    return _le(float(wrong), 0.0)


@check("bellgate")
def bell_probability_conservation(ctx):
    worst = 0.0
    for p in (0.0, 0.3, 1.0):
        for vec in list(bellgate.BELL_STATES.values()) + [np.array([0.6, 0.0, 0.8j, 0.0])]:
            worst = max(worst, abs(sum(bellgate.bell_outcome_distribution(vec, p).values()) - 1.0))
    return _le(worst, 1e-12)


@check("bellgate")
def bell_success_rate(ctx):
    worst = 0.0
    for p in (0.0, 0.5, 1.0):
        rate, se, _ = bellgate.bell_monte_carlo(p, 100_000, ctx.seed + 1)
        worst = max(worst, abs(rate - bellgate.bell_success_probability(p)) / max(se, 1e-12))
    return _le(worst, 3.0, "worst deviation in standard errors")


@check("bellgate")
def cnot_truth_table(ctx):
    H, V = np.array([1, 0]), np.array([0, 1])
    worst = 0.0
    for c in (H, V):
        for t in (H, V):
            r = bellgate.teleport_cnot(c, t, 1.0, ctx.seed, 1000)
            worst = max(worst, 1.0 - r.success_rate, 1.0 - r.conditional_output_fidelity)
    return _le(worst, 1e-9)


@check("bellgate")
def correction_table_rederived(ctx):
    ok = bellgate.derive_correction_table(seed=ctx.seed) == bellgate.CORRECTION_TABLE
    return float(not ok), 0.0, ok


@check("bellgate")
def gate_success_rate(ctx):
    worst = 0.0
    fid = 1.0
    for p in (0.0, 0.5, 1.0):
        c = ctx.rng.normal(size=2) + 1j * ctx.rng.normal(size=2)
        t = ctx.rng.normal(size=2) + 1j * ctx.rng.normal(size=2)
        r = bellgate.teleport_cnot(c / np.linalg.norm(c), t / np.linalg.norm(t), p, ctx.seed, 100_000)
        expected = 0.25 * (1 + p) ** 2
        se = math.sqrt(expected * (1 - expected) / r.trials)
        worst = max(worst, abs(r.success_rate - expected) / max(se, 1e-12))
        fid = min(fid, r.conditional_output_fidelity)
    return worst, 3.0, worst <= 3.0 and fid >= 1 - 1e-9, f"min conditional fidelity {fid:.12f}"


@check("bellgate")
def seeded_determinism(ctx):
    a = bellgate.teleport_cnot([1, 0], [0, 1], 0.4, 11, 5000)
    b = bellgate.teleport_cnot([1, 0], [0, 1], 0.4, 11, 5000)
    ok = asdict(a) == asdict(b) and bellgate.bell_monte_carlo(0.4, 5000, 5) == bellgate.bell_monte_carlo(0.4, 5000, 5)
    return float(not ok), 0.0, ok


# ----------------------------------------------------------------------- runner

@dataclass
class _Context:
    seed: int
    tol: float
    grid: int
    rng: np.random.Generator


def run_validation(seed: int = 0, tol: float = 1e-6, grid: int = 512, inject_gamma: float | None = None,
                   only: list[str] | None = None) -> list[CheckResult]:
    """Run every check; ``inject_gamma`` corrupts gamma for the self-test."""
    results = []
    for name, module, fn, advisory in CHECKS:
        if only and name not in only:
            continue
        ctx = _Context(seed, tol, grid, np.random.default_rng([seed, len(results)]))
        start = time.perf_counter()
        try:
            if inject_gamma is None:
                measured, tol_, ok, *rest = fn(ctx)
            else:
                with gamma_override(inject_gamma):
                    measured, tol_, ok, *rest = fn(ctx)
            detail = rest[0] if rest else ""
        except Exception as exc:  # a crashing check is a failing check
            measured, tol_, ok, detail = float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, module, float(measured), float(tol_), bool(ok), detail,
                                   time.perf_counter() - start, advisory))
    return results


def suite_passed(results: list[CheckResult]) -> bool:
    return all(r.passed for r in results if not r.advisory)
