"""Truncated bivariate Taylor arithmetic for sesqui-analytic functions.

A sesqui-analytic ``K(z, w)`` on a domain in C^m is a holomorphic function
``F(z, u)`` of ``2m`` complex variables evaluated at ``u = conj(w)``.  A
:class:`Jet` stores the Taylor coefficients of ``F`` around ``(z0, conj(w0))``
in the offsets ``x = z - z0`` and ``y = conj(w - w0)``, truncated so that no
single variable exceeds degree ``order``.  That truncation is an ideal, so
sums, products and compositions with univariate Taylor series are exact on the
retained coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal, special


@dataclass(frozen=True, eq=False)
class Jet:
    """Taylor coefficients of ``K`` at a point pair.

    ``coeffs`` has shape ``(order + 1,) * (2 * m)``; the first ``m`` axes index
    powers of ``z - z0``, the last ``m`` axes powers of ``conj(w - w0)``.
    """

    m: int
    order: int
    coeffs: np.ndarray

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, m: int, order: int, value: complex) -> Jet:
        c = np.zeros((order + 1,) * (2 * m), dtype=complex)
        c[(0,) * (2 * m)] = value
        return cls(m, order, c)

    @classmethod
    def inner_product(cls, z0, w0, order: int) -> Jet:
        """Jet of ``s = <z, w> = sum_i z_i conj(w_i)``."""
        z0 = np.asarray(z0, dtype=complex)
        w0 = np.asarray(w0, dtype=complex)
        m = z0.size
        jet = cls.constant(m, order, complex(np.sum(z0 * np.conj(w0))))
        if order == 0:
            return jet
        c = jet.coeffs
        for i in range(m):
            ex = [0] * (2 * m)
            ex[i] = 1
            c[tuple(ex)] = np.conj(w0[i])
            ey = [0] * (2 * m)
            ey[m + i] = 1
            c[tuple(ey)] = z0[i]
            exy = [0] * (2 * m)
            exy[i] = 1
            exy[m + i] = 1
            c[tuple(exy)] = 1.0
        return jet

    # -- access -----------------------------------------------------------

    @property
    def value(self) -> complex:
        return complex(self.coeffs[(0,) * (2 * self.m)])

    def derivative(self, a, b) -> complex:
        """``d^a dbar^b K`` at the expansion point, for multi-indices ``a, b``."""
        a = tuple(int(k) for k in a)
        b = tuple(int(k) for k in b)
        if len(a) != self.m or len(b) != self.m:
            raise ValueError(f"multi-indices must have length {self.m}")
        if max(a + b, default=0) > self.order:
            raise ValueError(f"jet of order {self.order} does not contain {a}, {b}")
        scale = math.prod(math.factorial(k) for k in a + b)
        return complex(self.coeffs[a + b]) * scale

    def __getitem__(self, key) -> complex:
        a, b = key
        return self.derivative(a, b)

    def entries(self, max_total: int | None = None) -> dict:
        """All derivatives with ``|a|, |b| <= max_total`` (default: ``order``)."""
        max_total = self.order if max_total is None else max_total
        out = {}
        for idx in itertools.product(range(self.order + 1), repeat=2 * self.m):
            a, b = idx[: self.m], idx[self.m:]
            if sum(a) <= max_total and sum(b) <= max_total:
                out[(a, b)] = self.derivative(a, b)
        return out

    def _unit(self, axis: int) -> tuple:
        e = [0] * (2 * self.m)
        e[axis] = 1
        return tuple(e)

    @property
    def dz(self) -> np.ndarray:
        """Vector of ``d_i K``."""
        return np.array([self.coeffs[self._unit(i)] for i in range(self.m)])

    @property
    def dwbar(self) -> np.ndarray:
        """Vector of ``dbar_j K``."""
        return np.array([self.coeffs[self._unit(self.m + j)] for j in range(self.m)])

    @property
    def dzdwbar(self) -> np.ndarray:
        """Matrix of ``d_i dbar_j K``."""
        out = np.empty((self.m, self.m), dtype=complex)
        for i in range(self.m):
            for j in range(self.m):
                e = [0] * (2 * self.m)
                e[i] = 1
                e[self.m + j] = 1
                out[i, j] = self.coeffs[tuple(e)]
        return out

    def gaussian(self) -> np.ndarray:
        """``K d_i dbar_j K - d_i K dbar_j K`` as an m x m matrix."""
        return self.value * self.dzdwbar - np.outer(self.dz, self.dwbar)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: Jet) -> None:
        if self.m != other.m or self.order != other.order:
            raise ValueError("jets of different shape")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.m, self.order, self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[(0,) * (2 * self.m)] += other
        return Jet(self.m, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.m, self.order, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            full = signal.convolve(self.coeffs, other.coeffs, method="direct")
            keep = (slice(0, self.order + 1),) * (2 * self.m)
            return Jet(self.m, self.order, np.ascontiguousarray(full[keep]))
        return Jet(self.m, self.order, self.coeffs * other)

    __rmul__ = __mul__

    @property
    def nilpotency(self) -> int:
        """Largest total degree retained; powers of a jet without constant term vanish beyond it."""
        return 2 * self.m * self.order

    def compose(self, taylor) -> Jet:
        """``phi(self)`` given the Taylor coefficients of ``phi`` at ``self.value``.

        ``taylor[k] = phi^(k)(c) / k!``; at most ``nilpotency + 1`` terms are used.
        """
        taylor = np.asarray(taylor, dtype=complex)
        n = min(len(taylor) - 1, self.nilpotency)
        d = self - self.value
        out = Jet.constant(self.m, self.order, taylor[n])
        for k in range(n - 1, -1, -1):
            out = out * d + taylor[k]
        return out

    def reciprocal(self) -> Jet:
        c = self.value
        if c == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        k = np.arange(self.nilpotency + 1)
        return self.compose((-1.0) ** k / c ** (k + 1))

    def power(self, alpha: float, value: complex | None = None) -> Jet:
        """``self ** alpha``; ``value`` fixes the branch of ``c ** alpha``."""
        c = self.value
        if c == 0:
            raise ZeroDivisionError("power of a jet with zero value")
        v = c ** alpha if value is None else value
        k = np.arange(self.nilpotency + 1)
        return self.compose(special.binom(alpha, k) * v / c ** k)

    # -- restriction and embedding ---------------------------------------

    def holomorphic_part(self) -> Jet:
        """Keep only the terms free of ``conj(w)`` offsets (a function of z alone)."""
        out = np.zeros_like(self.coeffs)
        idx = (slice(None),) * self.m + (0,) * self.m
        out[idx] = self.coeffs[idx]
        return Jet(self.m, self.order, out)

    def antiholomorphic_part(self) -> Jet:
        """Keep only the terms free of ``z`` offsets (a function of conj(w) alone)."""
        out = np.zeros_like(self.coeffs)
        idx = (0,) * self.m + (slice(None),) * self.m
        out[idx] = self.coeffs[idx]
        return Jet(self.m, self.order, out)

    def embed(self, m_total: int, offset: int) -> Jet:
        """View this jet in ``m_total`` variables, occupying slots ``offset .. offset + m - 1``."""
        p = self.order
        out = np.zeros((p + 1,) * (2 * m_total), dtype=complex)
        zsel = [0] * m_total
        for i in range(self.m):
            zsel[offset + i] = slice(None)
        idx = tuple(zsel) + tuple(zsel)
        out[idx] = self.coeffs
        return Jet(m_total, p, out)
