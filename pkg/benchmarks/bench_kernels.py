"""Numba vs numpy timings for the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--points 20000]

Inputs are the real F2 workload at the baseline optimum: one coefficient set
per detuning point, Gauss-Legendre nodes in scaled time. Each kernel is run
once untimed so JIT compilation is excluded; results of the two backends
are compared before timing.
"""

import argparse
import time

import numpy as np

from chi2spectral import _accel
from chi2spectral.conversion import optimal_config
from chi2spectral.series import _tau_nodes, second_order_coefficients, single_slice_pm, two_time_kernel
from chi2spectral.spectral import BASELINE_PROFILE, BASELINE_SIGMA


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--wedge-points", type=int, default=64)
    ap.add_argument("--wedge-steps", type=int, default=400)
    args = ap.parse_args()

    if not _accel.HAVE_NUMBA:
        print("numba unavailable or disabled; nothing to compare")
        return

    rng = np.random.default_rng(1)
    profile, cfg = optimal_config(BASELINE_PROFILE, BASELINE_SIGMA)
    y = rng.uniform(-4, 4, size=(2, args.points))
    co = second_order_coefficients(profile, cfg, y[0] * cfg.sigma, y[1] * cfg.sigma)
    s, w = _tau_nodes(96, 8.0)
    tau_args = (co.a, co.d, co.b, co.c, co.erf_offset, co.centre, s, w)

    z = rng.uniform(-6, 6, args.points * 10) + 1j * rng.uniform(-3, 3, args.points * 10)

    ker = two_time_kernel(single_slice_pm(profile, cfg), y[0, : args.wedge_points], y[1, : args.wedge_points])
    t = np.linspace(-150.0, 150.0, args.wedge_steps)
    wedge_args = (ker.q11, ker.q12, ker.q22, ker.l1, ker.l2, ker.c0, t)

    cases = [
        ("erf_complex", (z,), _accel.erf_complex_numpy, _accel.erf_complex_numba),
        ("tau_sums", tau_args, _accel.tau_sums_numpy, _accel.tau_sums_numba),
        ("wedge_sum", wedge_args, _accel.wedge_sum_numpy, _accel.wedge_sum_numba),
    ]
    print(f"{'kernel':<12} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8} {'max rel diff':>13}")
    for name, a, f_np, f_nb in cases:
        r_np = np.concatenate([np.ravel(v) for v in np.atleast_1d(f_np(*a))]) if name == "tau_sums" else f_np(*a)
        r_nb = np.concatenate([np.ravel(v) for v in np.atleast_1d(f_nb(*a))]) if name == "tau_sums" else f_nb(*a)
        diff = float(np.max(np.abs(r_np - r_nb) / np.maximum(np.abs(r_np), 1e-300)))
        t_np = best_of(lambda: f_np(*a), args.repeat)
        t_nb = best_of(lambda: f_nb(*a), args.repeat)
        print(f"{name:<12} {t_np:>11.4f} {t_nb:>11.4f} {t_np / t_nb:>8.1f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
