import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from chi2spectral import conversion
from chi2spectral.errors import DegenerateDispersionError, NoRealSolutionError
from chi2spectral.oracle import grid_inner_product
from chi2spectral.spectral import BASELINE_PROFILE, BASELINE_SIGMA, CrystalConfig, DispersionProfile, GaussianPhoton, pm_function

R2 = 1 / math.sqrt(2)


def _random_setup(seed):
    rng = np.random.default_rng(seed)
    prof = DispersionProfile(*rng.uniform(4e-9, 7e-9, size=3))
    return prof, CrystalConfig(rng.uniform(1, 10), BASELINE_SIGMA), rng.normal() * BASELINE_SIGMA


@pytest.mark.parametrize("seed", range(3))
def test_r_constant_vs_quadrature(seed):
    prof, cfg, nu_p = _random_setup(seed)
    assert conversion.r_quadrature(cfg, prof, nu_p) == pytest.approx(conversion.r_constant(cfg, prof), rel=1e-9)


def test_r_constant_independent_of_pump_detuning(optimum):
    p, cfg = optimum
    values = [conversion.r_quadrature(cfg, p, nu) for nu in (-3e9, 0.0, 2e9)]
    assert np.ptp(values) / values[0] < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_b_and_sigma_p_vs_quadrature(seed):
    prof, cfg, _ = _random_setup(seed)
    sp = conversion.sigma_p(cfg, prof)
    nu = np.linspace(-10 * sp, 10 * sp, 801)
    jp2 = np.abs(conversion.j_pump(cfg, prof, nu)) ** 2
    b2 = trapezoid(jp2, nu)
    assert b2 == pytest.approx(conversion.b_constant(cfg, prof) ** 2, rel=1e-9)
    assert math.sqrt(trapezoid(jp2 * nu * nu, nu) / b2) == pytest.approx(sp, rel=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_j_pump_closed_form(seed):
    prof, cfg, _ = _random_setup(seed)
    nu = np.linspace(-3, 3, 13) * conversion.sigma_p(cfg, prof)
    quad = conversion.j_pump(cfg, prof, nu)
    closed = conversion.j_pump_closed(cfg, prof, nu)
    assert np.allclose(np.abs(quad), np.abs(closed), rtol=1e-9, atol=0)


def test_optimum_constants(optimum):
    p, cfg = optimum
    rep = conversion.p_odd(cfg, p, math.pi / 2)
    assert rep.sigma_p == pytest.approx(math.sqrt(2) * cfg.sigma, rel=1e-12)
    assert rep.p_odd == pytest.approx(1.0, abs=1e-12)
    assert rep.p_odd_closed_form == pytest.approx(1.0, abs=1e-12)
    assert (rep.d_s, rep.d_i) == pytest.approx((R2, -R2), rel=1e-12)


def test_separability_phi_j_equals_r_f_f(optimum, rng):
    p, cfg = optimum
    nu = rng.uniform(-2, 2, size=(2, 8)) * cfg.sigma
    lhs = np.conj(pm_function(cfg, p, *nu, centered=True)) * conversion.j_pump(cfg, p, nu[0] + nu[1])
    ph = GaussianPhoton(0.0, cfg.sigma)
    rhs = conversion.r_constant(cfg, p) * ph.amplitude_detuning(nu[0]) * ph.amplitude_detuning(nu[1])
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=0)


@pytest.mark.parametrize("angle", [0.0, 0.4, math.pi / 4, 1.3, math.pi / 2, 2.5])
def test_rabi_closure(optimum, angle):
    p, cfg = optimum
    g = conversion.psi_even_grid(cfg, p, angle)
    podd = conversion.p_odd(cfg, p, angle).p_odd
    assert g.norm**2 == pytest.approx(math.cos(angle) ** 2, abs=1e-9)
    assert g.norm**2 + podd == pytest.approx(1.0, abs=1e-9)


def test_psi_even_vanishes_at_full_conversion(optimum):
    p, cfg = optimum
    g = conversion.psi_even_grid(cfg, p, math.pi / 2, count=256)
    assert g.norm < 1e-9


def test_psi_odd_profile(optimum):
    p, cfg = optimum
    photon, scale = conversion.psi_odd_profile(cfg, p, 1.0)
    assert photon.sigma == pytest.approx(math.sqrt(2) * cfg.sigma)
    assert abs(scale) ** 2 == pytest.approx(math.sin(1.0) ** 2, rel=1e-12)


def test_chi_for_rabi_round_trip(optimum):
    p, cfg = optimum
    chi = conversion.chi_for_rabi(cfg, p, 0.7)
    tuned = CrystalConfig(cfg.L, cfg.sigma, chi_mag=chi)
    assert conversion.rabi_angle(tuned, p) == pytest.approx(0.7, rel=1e-14)
    assert conversion.p_odd(tuned, p).p_odd == pytest.approx(math.sin(0.7) ** 2, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_closed_form_bounds_and_symmetry(d_s, d_i):
    f = conversion.p_odd_closed_form
    v = float(f(d_s, d_i))
    assert -1e-15 <= v <= 1 + 1e-12
    assert v == pytest.approx(float(f(d_i, d_s)), abs=1e-14)
    assert v == pytest.approx(float(f(-d_s, -d_i)), abs=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_ratio_route_matches_closed_form(seed):
    prof, cfg, _ = _random_setup(seed)
    rep = conversion.p_odd(cfg, prof, math.pi / 2)
    assert rep.p_odd == pytest.approx(rep.p_odd_closed_form, rel=1e-10)


def test_surface_maximum_and_trough():
    axis, surf = conversion.podd_surface(201, 2.0)
    assert surf.shape == (201, 201)
    assert float(np.max(np.diag(surf))) < 1e-12
    peaks = conversion.surface_maxima(axis, surf)
    assert len(peaks) == 2
    found = sorted(tuple(np.round(pt, 6)) for _, _, pt, _ in peaks)
    assert found == [(round(-R2, 6), round(R2, 6)), (round(R2, 6), round(-R2, 6))]
    for gpt, gval, _, rval in peaks:
        assert rval == pytest.approx(1.0, abs=1e-6)
        assert gval == pytest.approx(0.99994898, abs=1e-8)
        assert sorted(np.abs(gpt)) == pytest.approx([0.7, 0.7])


def test_epsilon_sensitivity():
    assert conversion.condition_error_sensitivity(0.01, 0.01, BASELINE_PROFILE, BASELINE_SIGMA) == pytest.approx(0.9803, abs=5e-4)
    assert conversion.condition_error_sensitivity(0.001, 0.001, BASELINE_PROFILE, BASELINE_SIGMA) == pytest.approx(0.9998, abs=2e-4)
    assert conversion.condition_error_sensitivity(0.0, 0.0, BASELINE_PROFILE, BASELINE_SIGMA) == pytest.approx(1.0, abs=1e-14)


def test_epsilon_condition_placement_differs():
    inside = conversion.condition_error_sensitivity(0.01, 0.01, BASELINE_PROFILE, BASELINE_SIGMA, placement="condition")
    assert inside == pytest.approx(0.981395, abs=1e-6)
    with pytest.raises(ValueError):
        conversion.condition_error_sensitivity(0.01, 0.01, BASELINE_PROFILE, BASELINE_SIGMA, placement="other")


@pytest.mark.parametrize("eps1", [0.5, -0.5, 0.08])
def test_epsilon_without_real_length(eps1):
    with pytest.raises(NoRealSolutionError):
        conversion.condition_error_sensitivity(eps1, 0.0, BASELINE_PROFILE, BASELINE_SIGMA)


def test_degenerate_profile_rejected():
    with pytest.raises(DegenerateDispersionError):
        conversion.r_constant(CrystalConfig(1.0, BASELINE_SIGMA), DispersionProfile(5e-9, 5e-9, 5e-9))


def test_psi_even_is_input_at_zero_angle(optimum):
    p, cfg = optimum
    g = conversion.psi_even_grid(cfg, p, 0.0, count=256)
    assert grid_inner_product(g, g).real == pytest.approx(1.0, abs=1e-9)
    axis = g.axis
    pair = np.exp(-(axis[:, None] ** 2 + axis[None, :] ** 2) / 4) / math.sqrt(2 * math.pi)
    overlap = grid_inner_product(g, type(g)(pair.astype(complex), g.extent, g.count))
    assert abs(overlap) == pytest.approx(1.0, abs=1e-9)
