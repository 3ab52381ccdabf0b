import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import special

from chi2spectral import _accel, series

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba disabled")


@needs_numba
def test_erf_backends_agree(rng):
    z = rng.uniform(-6, 6, 2000) + 1j * rng.uniform(-4, 4, 2000)
    ref = special.erf(z)
    got = _accel.erf_complex_numba(z)
    assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-12


@needs_numba
def test_erf_real_axis_and_symmetry():
    x = np.linspace(-5, 5, 41)
    assert np.allclose(_accel.erf_complex_numba(x + 0j).real, [math.erf(v) for v in x], rtol=1e-14, atol=1e-16)
    z = np.array([0.3 + 1.2j, 2.0 - 0.5j])
    assert np.allclose(_accel.erf_complex_numba(-z), -_accel.erf_complex_numba(z), rtol=1e-15)
    assert np.allclose(_accel.erf_complex_numba(np.conj(z)), np.conj(_accel.erf_complex_numba(z)), rtol=1e-14)


def test_erf_shape_preserved():
    z = np.zeros((3, 4), dtype=complex)
    assert _accel.erf_complex(z).shape == (3, 4)


@needs_numba
def test_tau_sums_backends_agree(optimum, rng):
    p, cfg = optimum
    co = series.second_order_coefficients(p, cfg, rng.normal(size=64) * cfg.sigma, rng.normal(size=64) * cfg.sigma)
    s, w = series._tau_nodes(96, 8.0)
    args = (co.a, co.d, co.b, co.c, co.erf_offset, co.centre, s, w)
    f1, o1 = _accel.tau_sums_numpy(*args)
    f2, o2 = _accel.tau_sums_numba(*args)
    assert np.allclose(f1, f2, rtol=1e-12, atol=0)
    assert np.allclose(o1, o2, rtol=1e-11, atol=0)


@needs_numba
def test_wedge_backends_agree(optimum, rng):
    p, cfg = optimum
    ker = series.two_time_kernel(series.single_slice_pm(p, cfg), rng.normal(size=8), rng.normal(size=8))
    t = np.linspace(-120, 120, 300)
    a = _accel.wedge_sum_numpy(ker.q11, ker.q12, ker.q22, ker.l1, ker.l2, ker.c0, t)
    b = _accel.wedge_sum_numba(ker.q11, ker.q12, ker.q22, ker.l1, ker.l2, ker.c0, t)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_wedge_sum_gaussian_quadrant():
    # exp(-t1^2 - t2^2) over t1 <= t2 is pi/2
    t = np.linspace(-9, 9, 1201)
    got = _accel.wedge_sum(-1.0, 0.0, -1.0, np.zeros(1), np.zeros(1), np.zeros(1), t)
    assert got[0].real == pytest.approx(math.pi / 2, rel=1e-9)


def test_env_flag_selects_numpy():
    env = dict(os.environ, CHI2SPECTRAL_DISABLE_NUMBA="1")
    code = ("import json, chi2spectral._accel as a; "
            "print(json.dumps([a.BACKEND, a.HAVE_NUMBA, a.tau_sums is a.tau_sums_numpy]))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ["numpy", False, True]


def test_numpy_fallback_reproduces_f2():
    env = dict(os.environ, CHI2SPECTRAL_DISABLE_NUMBA="1")
    code = ("from chi2spectral import conversion, series; from chi2spectral.spectral import BASELINE_PROFILE, BASELINE_SIGMA; "
            "p, c = conversion.optimal_config(BASELINE_PROFILE, BASELINE_SIGMA); print(repr(series.fidelity_f2(p, c).f2))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert float(out.stdout) == pytest.approx(0.7500024, abs=2e-7)
