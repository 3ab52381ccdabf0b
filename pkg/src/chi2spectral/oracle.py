"""Brute-force quadrature used to cross-check the closed forms.

Nothing here knows about phase matching; every routine takes plain callables
or sampled arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad_vec

from .errors import AxisMismatchError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "integrate_1d",
    "ordered_double_integral",
    "GridState",
    "grid_inner_product",
    "grid_fidelity",
    "gauss_legendre",
]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    window: float = 8.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate_1d(f, a: float, b: float, spec: QuadratureSpec = QuadratureSpec()):
    """Adaptive Gauss-Kronrod integral of a (possibly complex) scalar function.

    Real and imaginary parts share one subdivision tree. Returns
    ``(value, error_estimate)``; raises QuadratureError when the tolerance
    is not met within ``spec.max_subdivisions`` intervals.
    """
    res, err, info = quad_vec(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        norm="max",
        full_output=True,
    )
    if info.status != 0:
        raise QuadratureError(f"1-D quadrature did not converge on [{a}, {b}] (status {info.status}, error {err:.3e})")
    return res, err


def _inner_wedge(kernel, t_lo, t2, spec, order=24):
    # Composite Gauss-Legendre on [t_lo, t2]; panels doubled until stable.
    x, w = gauss_legendre(order)
    prev = None
    panels = 4
    while panels <= 4096:
        edges = np.linspace(t_lo, t2, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t1 = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wt = (half[:, None] * w[None, :]).ravel()
        val = np.sum(wt * kernel(t1, np.full_like(t1, t2)))
        if prev is not None and abs(val - prev) <= max(spec.abs_tol, 0.1 * spec.rel_tol * abs(val)):
            return val
        prev = val
        panels *= 2
    raise QuadratureError("inner wedge integral did not converge")


def ordered_double_integral(kernel, t_min: float, t_max: float, spec: QuadratureSpec = QuadratureSpec()):
    """Integral of ``kernel(t1, t2)`` over t_min <= t1 <= t2 <= t_max.

    The outer variable t2 is integrated adaptively; for each outer node the
    inner integral over t1 runs from t_min to t2 with refined fixed-order
    panels. ``kernel`` must accept numpy arrays. Returns ``(value, error)``.
    """
    if t_max <= t_min:
        return 0.0 + 0.0j, 0.0

    def outer(t2):
        if t2 <= t_min:
            return 0.0 + 0.0j
        return complex(_inner_wedge(kernel, t_min, t2, spec))

    return integrate_1d(outer, t_min, t_max, spec)


@dataclass(frozen=True)
class GridState:
    """Amplitude sampled on a square uniform grid over [-extent, extent]^2
    (units of sigma)."""

    samples: np.ndarray
    extent: float
    count: int

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.shape != (self.count, self.count):
            raise ValueError(f"samples shape {s.shape} does not match count {self.count}")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.count)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.count - 1)

    @property
    def norm(self) -> float:
        return math.sqrt(grid_inner_product(self, self).real)

    def edge_ratio(self) -> float:
        """Largest boundary magnitude relative to the peak."""
        s = np.abs(self.samples)
        edge = max(s[0].max(), s[-1].max(), s[:, 0].max(), s[:, -1].max())
        return float(edge / s.max())


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def grid_inner_product(a: GridState, b: GridState) -> complex:
    """Trapezoid-rule <a|b>, conjugate-linear in ``a``."""
    if a.count != b.count or a.extent != b.extent:
        raise AxisMismatchError(f"grids differ: ({a.extent}, {a.count}) vs ({b.extent}, {b.count})")
    w = _trapezoid_weights(a.count, a.spacing)
    return complex(np.einsum("i,j,ij->", w, w, np.conj(a.samples) * b.samples))


def grid_fidelity(a: GridState, b: GridState) -> float:
    """|<a|b>|^2 / (<a|a><b|b>)."""
    ab = grid_inner_product(a, b)
    return float(abs(ab) ** 2 / (grid_inner_product(a, a).real * grid_inner_product(b, b).real))
