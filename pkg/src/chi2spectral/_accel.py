"""Hot numerical kernels with a numba path and a pure-numpy fallback.

Numba is used when it imports cleanly and ``CHI2SPECTRAL_DISABLE_NUMBA`` is
unset (or ``0``). Both implementations are always importable under explicit
names so they can be compared in tests and benchmarks; the unsuffixed names
are the ones the rest of the package calls.
"""

import logging
import math
import os

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("CHI2SPECTRAL_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by CHI2SPECTRAL_DISABLE_NUMBA")
    import numba

    njit = numba.njit
    HAVE_NUMBA = True
except ImportError as exc:  # pragma: no cover - depends on environment
    logger.info("numba unavailable (%s); using numpy kernels", exc)
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# complex error function
# ---------------------------------------------------------------------------

def erf_complex_numpy(z):
    """Complex error function via scipy (Faddeeva-based, overflow-safe)."""
    return special.erf(np.asarray(z, dtype=np.complex128))


@njit(cache=True)
def _erf_scalar(x, y):
    # Abramowitz & Stegun series for erf(x + iy); relative error ~1e-16 for moderate |y|.
    sign = 1.0
    if x < 0.0:
        sign = -1.0
        x = -x
        y = -y
    ex2 = math.exp(-x * x)
    two_xy = 2.0 * x * y
    c2 = math.cos(two_xy)
    s2 = math.sin(two_xy)
    re = math.erf(x)
    im = 0.0
    if x == 0.0:
        im += y / math.pi
    else:
        sxy = math.sin(x * y)
        re += ex2 * (2.0 * sxy * sxy) / (2.0 * math.pi * x)
        im += ex2 * s2 / (2.0 * math.pi * x)
    if ex2 == 0.0:
        return sign * re, sign * im
    sre = 0.0
    sim = 0.0
    nmin = int(2.0 * abs(y)) + 2
    # exp(-n^2/4), exp(+-n y) by recurrence: no transcendental calls per term
    q = math.exp(-0.25)
    step = q
    en = 1.0
    ey = math.exp(y)
    iey = 1.0 / ey
    epos = 1.0
    eneg = 1.0
    for n in range(1, 200):
        en *= step
        step *= q * q
        epos *= ey
        eneg *= iey
        ch = 0.5 * (epos + eneg)
        sh = 0.5 * (epos - eneg)
        denom = n * n + 4.0 * x * x
        fn = 2.0 * x - 2.0 * x * ch * c2 + n * sh * s2
        gn = 2.0 * x * ch * s2 + n * sh * c2
        tr = en * fn / denom
        ti = en * gn / denom
        sre += tr
        sim += ti
        if n > nmin and abs(tr) + abs(ti) < 1e-17 * (abs(sre) + abs(sim) + 1e-300):
            break
    re += 2.0 / math.pi * ex2 * sre
    im += 2.0 / math.pi * ex2 * sim
    return sign * re, sign * im


@njit(cache=True)
def _erf_array(z):
    out = np.empty(z.shape, dtype=np.complex128)
    flat_in = z.ravel()
    flat_out = out.ravel()
    for k in range(flat_in.size):
        re, im = _erf_scalar(flat_in[k].real, flat_in[k].imag)
        flat_out[k] = complex(re, im)
    return out


def erf_complex_numba(z):
    """Complex error function from the jitted series kernel."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    return _erf_array(z.reshape(-1)).reshape(z.shape)


# ---------------------------------------------------------------------------
# time integrals of exp(-(a t^2 + b t + c)) (1 + erf(d t + e)) / 2
# ---------------------------------------------------------------------------

def tau_sums_numpy(a, d, b, c, e, centre, s_nodes, s_weights):
    """Quadrature of the full and time-ordered Gaussian time integrals.

    ``a`` and ``d`` are real scalars; ``b``, ``c``, ``e`` and ``centre`` are
    arrays over detuning points. Nodes live in the scaled variable
    ``s = sqrt(a) (t - centre)``. Returns ``(full, ordered)`` arrays.
    """
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    c = np.asarray(c, dtype=np.complex128).reshape(-1)
    e = np.asarray(e, dtype=np.complex128).reshape(-1)
    centre = np.asarray(centre, dtype=np.float64).reshape(-1)
    ra = math.sqrt(a)
    full = np.empty(b.size, dtype=np.complex128)
    ordered = np.empty(b.size, dtype=np.complex128)
    chunk = max(1, 2_000_000 // max(1, s_nodes.size))
    for lo in range(0, b.size, chunk):
        sl = slice(lo, lo + chunk)
        t = centre[sl, None] + s_nodes[None, :] / ra
        g = np.exp(-(a * t * t + b[sl, None] * t + c[sl, None])) * s_weights[None, :]
        full[sl] = g.sum(axis=1) / ra
        ordered[sl] = (g * (1.0 + special.erf(d * t + e[sl, None]))).sum(axis=1) / (2.0 * ra)
    return full, ordered


@njit(cache=True)
def _tau_sums_jit(a, d, b, c, e, centre, s_nodes, s_weights):
    ra = math.sqrt(a)
    n = b.size
    full = np.empty(n, dtype=np.complex128)
    ordered = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc_f = 0.0 + 0.0j
        acc_o = 0.0 + 0.0j
        for j in range(s_nodes.size):
            t = centre[k] + s_nodes[j] / ra
            g = np.exp(-(a * t * t + b[k] * t + c[k])) * s_weights[j]
            arg = d * t + e[k]
            er, ei = _erf_scalar(arg.real, arg.imag)
            acc_f += g
            acc_o += g * complex(1.0 + er, ei)
        full[k] = acc_f / ra
        ordered[k] = acc_o / (2.0 * ra)
    return full, ordered


def tau_sums_numba(a, d, b, c, e, centre, s_nodes, s_weights):
    return _tau_sums_jit(
        float(a),
        float(d),
        np.ascontiguousarray(b, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(c, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(e, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(centre, dtype=np.float64).reshape(-1),
        np.ascontiguousarray(s_nodes, dtype=np.float64),
        np.ascontiguousarray(s_weights, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# brute-force ordered double time integral of a Gaussian two-time kernel
# ---------------------------------------------------------------------------

def wedge_sum_numpy(q11, q12, q22, l1, l2, c0, t):
    """Trapezoid sum of exp(q11 t1^2 + q12 t1 t2 + q22 t2^2 + l1 t1 + l2 t2 + c0)
    over the wedge t1 <= t2 on the uniform grid ``t``.

    ``l1``, ``l2``, ``c0`` are arrays over detuning points. The diagonal
    carries half weight so the rule is second order across the step.
    """
    l1 = np.asarray(l1, dtype=np.complex128).reshape(-1)
    l2 = np.asarray(l2, dtype=np.complex128).reshape(-1)
    c0 = np.asarray(c0, dtype=np.complex128).reshape(-1)
    h = t[1] - t[0]
    w = np.full(t.size, h)
    w[0] = w[-1] = 0.5 * h
    out = np.zeros(l1.size, dtype=np.complex128)
    for j in range(t.size):
        t2 = t[j]
        t1 = t[: j + 1]
        wi = w[: j + 1].copy()
        wi[-1] *= 0.5
        expo = (q11 * t1 * t1 + q12 * t1 * t2 + q22 * t2 * t2)[None, :] + l1[:, None] * t1[None, :] + (l2 * t2 + c0)[:, None]
        out += w[j] * (np.exp(expo) * wi[None, :]).sum(axis=1)
    return out


@njit(cache=True)
def _wedge_sum_jit(q11, q12, q22, l1, l2, c0, t):
    n = t.size
    h = t[1] - t[0]
    out = np.zeros(l1.size, dtype=np.complex128)
    for k in range(l1.size):
        acc = 0.0 + 0.0j
        for j in range(n):
            t2 = t[j]
            wj = 0.5 * h if (j == 0 or j == n - 1) else h
            inner = 0.0 + 0.0j
            base = q22 * t2 * t2 + l2[k] * t2 + c0[k]
            for i in range(j + 1):
                t1 = t[i]
                wi = 0.5 * h if i == 0 else h
                if i == j:
                    wi *= 0.5
                inner += wi * np.exp(q11 * t1 * t1 + q12 * t1 * t2 + l1[k] * t1 + base)
            acc += wj * inner
        out[k] = acc
    return out


def wedge_sum_numba(q11, q12, q22, l1, l2, c0, t):
    return _wedge_sum_jit(
        float(q11),
        float(q12),
        float(q22),
        np.ascontiguousarray(l1, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(l2, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(c0, dtype=np.complex128).reshape(-1),
        np.ascontiguousarray(t, dtype=np.float64),
    )


if HAVE_NUMBA:
    erf_complex = erf_complex_numba
    tau_sums = tau_sums_numba
    wedge_sum = wedge_sum_numba
else:
    erf_complex = erf_complex_numpy
    tau_sums = tau_sums_numpy
    wedge_sum = wedge_sum_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
