"""Coefficient-space operations on diagonal kernels ``sum a_n (z conj w)^n``.

These are the exact counterparts of the jet-based operations for disc kernels:
powers, products, the Gaussian-curvature coefficients and the coefficients of
``d dbar K``, all computed by formal power series recursions.
"""

from __future__ import annotations

import numpy as np

from . import series as fps
from .errors import UnsupportedError
from .kernels import DiagonalSeriesKernel, K0Kernel, KernelExpr, SzegoPower


def coefficients(k: KernelExpr, n: int) -> np.ndarray:
    """First ``n + 1`` diagonal coefficients of a radial disc kernel."""
    if isinstance(k, DiagonalSeriesKernel):
        return k.coefficient_array(n)
    if not k.is_radial:
        raise UnsupportedError("only radial kernels have diagonal coefficients")
    c = k.radial_taylor(0.0, n)
    if np.max(np.abs(c.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(c))):
        raise UnsupportedError("kernel has non-real diagonal coefficients")
    return c.real.copy()


def as_series(k: KernelExpr, n: int = 60) -> DiagonalSeriesKernel:
    """Diagonal-series form of a radial kernel, with the best tail rule available.

    Exact tails are used for the Szego kernel (constant 1), the rational
    example ``(8 + 8q - q^2)/(1 - q)`` (constant 15) and Szego powers
    (analytic growth bound); other kernels get a fitted growth bound.
    """
    if isinstance(k, DiagonalSeriesKernel):
        return k
    dim = k.domain.m
    if isinstance(k, K0Kernel):
        return DiagonalSeriesKernel((8.0, 16.0), fps.TailRule("constant", value=15.0), 1.0, 1)
    if isinstance(k, SzegoPower):
        if k.alpha == 1.0:
            return DiagonalSeriesKernel((1.0,), fps.TailRule("constant", value=1.0), 1.0, dim)
        c = fps.szego_power_coefficients(k.alpha, n)
        return DiagonalSeriesKernel(tuple(c), fps.szego_power_tail(k.alpha), 1.0, dim)
    c = coefficients(k, n)
    sign = "nonnegative" if np.all(c >= 0) else "unknown"
    return DiagonalSeriesKernel(tuple(c), fps.fit_growth_bound(c, 1.0, sign), 1.0, dim)


def _result(k: KernelExpr, c: np.ndarray, exact: bool) -> DiagonalSeriesKernel:
    tail = None if exact else fps.fit_growth_bound(c, 1.0, "unknown")
    return DiagonalSeriesKernel(tuple(float(x) for x in c), tail, 1.0, k.domain.m)


def _terminates_within(k: KernelExpr, degree: int) -> bool:
    return isinstance(k, DiagonalSeriesKernel) and k.is_polynomial and k.N <= degree


def series_power(k: KernelExpr, alpha: float, n: int) -> DiagonalSeriesKernel:
    """First ``n + 1`` coefficients of ``K^alpha`` via ``exp(alpha log K)``; needs ``a_0 > 0``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    a = coefficients(k, n)
    if not a[0] > 0:
        raise ValueError(f"series power needs a_0 > 0, got {a[0]}")
    c = fps.power_coefficients(a, alpha, n)
    integral = float(alpha).is_integer()
    exact = integral and isinstance(k, DiagonalSeriesKernel) and k.is_polynomial and k.N * alpha <= n
    return _result(k, c, exact)


def series_product(k1: KernelExpr, k2: KernelExpr, n: int) -> DiagonalSeriesKernel:
    c = fps.product_coefficients(coefficients(k1, n), coefficients(k2, n), n)
    exact = (
        isinstance(k1, DiagonalSeriesKernel) and k1.is_polynomial
        and isinstance(k2, DiagonalSeriesKernel) and k2.is_polynomial
        and k1.N + k2.N <= n
    )
    return _result(k1, c, exact)


def series_gaussian_coeffs(k: KernelExpr, n: int) -> DiagonalSeriesKernel:
    """Coefficients ``g_0..g_n`` of ``K d dbar K - dK dbar K`` in ``q = z conj w``."""
    a = coefficients(k, n + 1)
    c = fps.gaussian_coefficients(a, n)
    return _result(k, c, _terminates_within(k, n + 1) and 2 * k.N - 2 <= n)


def series_mixed_derivative(k: KernelExpr, n: int) -> DiagonalSeriesKernel:
    """Coefficients of ``d dbar K``."""
    a = coefficients(k, n + 1)
    c = fps.mixed_derivative_coefficients(a, n)
    return _result(k, c, _terminates_within(k, n + 1))


def series_one_minus_q(k: KernelExpr, n: int) -> DiagonalSeriesKernel:
    """Coefficients of ``(1 - z conj w) K``."""
    c = fps.one_minus_q_coefficients(coefficients(k, n), n)
    return _result(k, c, _terminates_within(k, n - 1))
