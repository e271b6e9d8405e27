"""Curvature of kernels, matrix-valued kernels built from derivatives, and related checks.

Curvature follows the sign ``-d_i dbar_j log K(z, z)``.  The matrix kernels
here are the Gaussian-curvature kernel ``K d_i dbar_j K - d_i K dbar_j K``,
its rescaling ``K^(alpha+beta) d_i dbar_j log K``, and ``d_i dbar_j K``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import finite_diff as fd
from .config import FD_MESH
from .errors import DegenerateError, DomainError, UnsupportedError
from .kernels import Domain, KernelExpr, as_point, power


# ---------------------------------------------------------------------------
# matrix kernels


@dataclass(frozen=True, eq=False)
class MatrixKernel:
    """An ``m x m``-matrix-valued kernel evaluable at point pairs.

    ``tag`` is one of ``gaussian``, ``kab``, ``derivative-kernel``,
    ``pullback-squared`` or ``difference``.
    """

    size: int
    tag: str
    evaluator: Callable
    domain: Domain

    def matrix(self, z, w) -> np.ndarray:
        z = self.domain.check(z, "z")
        w = self.domain.check(w, "w")
        return np.asarray(self.evaluator(z, w), dtype=complex).reshape(self.size, self.size)

    __call__ = matrix

    def __sub__(self, other: MatrixKernel) -> MatrixKernel:
        if other.size != self.size or other.domain != self.domain:
            raise DomainError("matrix kernels of different shape or domain")
        return MatrixKernel(
            self.size, "difference",
            lambda z, w: self.evaluator(z, w) - other.evaluator(z, w), self.domain,
        )

    def scaled(self, c: float) -> MatrixKernel:
        return MatrixKernel(self.size, self.tag, lambda z, w: c * self.evaluator(z, w), self.domain)


def gaussian_curvature_kernel(expr: KernelExpr) -> MatrixKernel:
    """``K d_i dbar_j K - d_i K dbar_j K``, assembled from exact first-order jets."""
    return MatrixKernel(expr.m, "gaussian", lambda z, w: expr._jet(z, w, 1).gaussian(), expr.domain)


def derivative_kernel(expr: KernelExpr) -> MatrixKernel:
    """``d_i dbar_j K``."""
    return MatrixKernel(expr.m, "derivative-kernel", lambda z, w: expr._jet(z, w, 1).dzdwbar, expr.domain)


def kab_kernel(expr: KernelExpr, alpha: float, beta: float) -> MatrixKernel:
    """``K^(alpha+beta) d_i dbar_j log K``; depends on ``alpha`` and ``beta`` only through their sum."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    total = float(alpha) + float(beta)
    if total == 2.0:
        return MatrixKernel(expr.m, "kab", gaussian_curvature_kernel(expr).evaluator, expr.domain)
    lifted = power(expr, total)

    def evaluate(z, w):
        j = expr._jet(z, w, 1)
        return lifted._value(z, w) * j.gaussian() / j.value ** 2

    return MatrixKernel(expr.m, "kab", evaluate, expr.domain)


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True, eq=False)
class CurvatureMatrix:
    at: np.ndarray
    entries: np.ndarray


def _diagonal_jet(expr: KernelExpr, z):
    z = expr.domain.check(z, "z")
    j = expr._jet(z, z, 1)
    k = j.value
    if not (k.real > 0 and abs(k.imag) <= 1e-10 * abs(k)):
        raise DomainError(f"K(z, z) = {k} is not positive")
    return z, j


def log_hessian(expr: KernelExpr, z) -> np.ndarray:
    """``d_i dbar_j log K(z, z)`` (hermitian)."""
    _, j = _diagonal_jet(expr, z)
    h = j.gaussian() / j.value.real ** 2
    return 0.5 * (h + h.conj().T)


def curvature_matrix(expr: KernelExpr, z) -> CurvatureMatrix:
    """``-d_i dbar_j log K(z, z)``."""
    z = as_point(z, expr.m)
    return CurvatureMatrix(z, -log_hessian(expr, z))


def curvature(expr: KernelExpr, z) -> float:
    """Scalar curvature of a disc kernel."""
    if expr.m != 1:
        raise UnsupportedError("scalar curvature needs a one-variable kernel")
    return float(curvature_matrix(expr, z).entries[0, 0].real)


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """The 2 x 2 matrix of ``(M - w)*`` on ``span{K(., w), dbar K(., w)}`` in the Gram-Schmidt basis."""

    at: complex
    entries: np.ndarray
    entry: float
    contractive: bool
    degenerate: bool


def local_operator(expr: KernelExpr, w) -> LocalOperator:
    if expr.m != 1:
        raise UnsupportedError("local operator is defined for disc kernels only")
    w_pt, j = _diagonal_jet(expr, w)
    w = complex(w_pt[0])
    k = j.value.real
    dk = j.dz[0]
    ddk = j.dzdwbar[0, 0].real
    # squared norm of dbar K(., w) after removing its component along K(., w)
    schur = ddk - abs(dk) ** 2 / k
    degenerate = not schur > 1e-14 * max(abs(ddk), 1e-300)
    entry = math.inf if degenerate else math.sqrt(k / schur)
    entries = np.array([[0.0, entry], [0.0, 0.0]], dtype=complex)
    bound = 1.0 - abs(w) ** 2
    contractive = (not degenerate) and entry <= bound * (1 + 1e-12)
    return LocalOperator(w, entries, entry, contractive, degenerate)


# ---------------------------------------------------------------------------
# pull-back of the squared Szego kernel


@dataclass(frozen=True, eq=False)
class HolomorphicMap:
    """A holomorphic self-map candidate of the disc, given with its derivative."""

    f: Callable
    df: Callable
    name: str = "f"
    is_constant: bool = False


def polynomial_map(coeffs) -> HolomorphicMap:
    """``f(z) = sum c_k z^k`` for complex ``coeffs`` in ascending order."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    dc = c[1:] * np.arange(1, c.size)
    return HolomorphicMap(
        lambda z: complex(np.polyval(c[::-1], z)),
        lambda z: complex(np.polyval(dc[::-1], z)) if dc.size else 0j,
        "polynomial",
        c.size == 1,
    )


class PullbackKernel(KernelExpr):
    """``f'(z) conj(f'(w)) / (1 - f(z) conj(f(w)))^2`` on the disc."""

    def __init__(self, fmap: HolomorphicMap):
        if fmap.is_constant:
            raise DegenerateError("pull-back by a constant map is degenerate (f' = 0)")
        self.fmap = fmap

    @property
    def domain(self):
        return Domain.disc()

    def _point_data(self, z: complex):
        fz = self.fmap.f(z)
        dfz = self.fmap.df(z)
        if not abs(fz) < 1:
            raise DomainError(f"|f({z})| = {abs(fz):.6g} is not below 1")
        if abs(dfz) < 1e-14:
            raise DegenerateError(f"f' vanishes at {z}")
        return fz, dfz

    def _value(self, z, w):
        fz, dfz = self._point_data(complex(z[0]))
        fw, dfw = self._point_data(complex(w[0]))
        return dfz * np.conj(dfw) / (1.0 - fz * np.conj(fw)) ** 2

    def to_spec(self):
        raise UnsupportedError("pull-back kernels have no JSON form")


def pullback_szego_sq(fmap: HolomorphicMap) -> PullbackKernel:
    return PullbackKernel(fmap)


# ---------------------------------------------------------------------------
# bundle curvature trace


@dataclass(frozen=True, eq=False)
class TraceCheckReport:
    """Both sides of ``tr(bundle curvature of K^(a,b)) = m(a+b) curv(K) + curv(det(d dbar log K))``.

    Values use the curvature sign (``-d dbar``).  ``literal_residual`` compares
    against the same right side with ``1/m`` in place of ``m`` for the first term.
    """

    m: int
    points: list
    lhs: list
    rhs: list
    residual: float
    literal_residual: float


def _metric(kab: MatrixKernel):
    def H(p):
        return kab.evaluator(p, p)

    return H


def bundle_curvature_trace(H, z, h: float = FD_MESH) -> np.ndarray:
    """``tr dbar_j(H^-1 d_i H)`` by nested central differences, as an ``m x m`` array."""
    z = np.asarray(z, dtype=complex)
    m = z.size
    out = np.empty((m, m), dtype=complex)
    for i in range(m):
        def connection(p, i=i):
            Hp = np.atleast_2d(H(p))
            return np.linalg.solve(Hp, np.atleast_2d(fd.wirtinger_d(H, p, i, h)))

        for j in range(m):
            out[i, j] = np.trace(np.atleast_2d(fd.wirtinger_dbar(connection, z, j, h)))
    return out


def bundle_curvature_trace_check(expr: KernelExpr, alpha: float, beta: float, grid,
                                 h: float = FD_MESH) -> TraceCheckReport:
    m = expr.m
    if m not in (1, 2):
        raise UnsupportedError("trace identity check supports m = 1 and m = 2")
    kab = kab_kernel(expr, alpha, beta)
    H = _metric(kab)
    total = float(alpha) + float(beta)

    def log_det_L(p):
        sign, val = np.linalg.slogdet(log_hessian(expr, p))
        if sign.real <= 0:
            raise DegenerateError("d dbar log K is not positive definite")
        return val

    points, lhs, rhs = [], [], []
    res = lit = 0.0
    for z in grid:
        Hz = np.atleast_2d(H(z))
        if abs(np.linalg.det(Hz)) < 1e-300:
            raise DegenerateError(f"metric is singular at {z}")
        left = -bundle_curvature_trace(H, z, h)
        base = -log_hessian(expr, z)
        det_term = -fd.wirtinger_hessian(log_det_L, z, h)
        right = m * total * base + det_term
        literal = total / m * base + det_term
        res = max(res, float(np.max(np.abs(left - right))))
        lit = max(lit, float(np.max(np.abs(left - literal))))
        points.append(np.asarray(z))
        lhs.append(left)
        rhs.append(right)
    return TraceCheckReport(m, points, lhs, rhs, res, lit)


# ---------------------------------------------------------------------------
# grids


QUANTITIES = ("K", "curvature", "gaussian", "ratio", "margin")


def grid_values(expr: KernelExpr, quantity: str, points) -> list:
    """Matrix values of ``quantity`` at the diagonal points ``(z, z)``.

    ``ratio`` is ``d dbar log K(z, z) (1 - |z|^2)^2``, which is ``>= 1`` where
    the curvature inequality holds; ``margin`` is the curvature minus
    ``-1/(1 - |z|^2)^2``, which is ``<= 0`` there.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    out = []
    for z in points:
        z = expr.domain.check(z, "grid point")
        if quantity == "K":
            v = np.array([[expr._value(z, z)]])
        elif quantity == "curvature":
            v = curvature_matrix(expr, z).entries
        elif quantity == "gaussian":
            v = gaussian_curvature_kernel(expr).matrix(z, z)
        else:
            if expr.m != 1:
                raise UnsupportedError(f"{quantity} grids need a disc kernel")
            s = 1.0 - abs(z[0]) ** 2
            c = curvature_matrix(expr, z).entries
            v = -c * s ** 2 if quantity == "ratio" else c + 1.0 / s ** 2
        out.append(np.atleast_2d(v))
    return out


def emit_grid_csv(expr: KernelExpr, quantity: str, points) -> str:
    points = [expr.domain.check(p, "grid point") for p in points]
    values = grid_values(expr, quantity, points)
    m = expr.m
    size = values[0].shape[0] if values else (1 if quantity in ("K", "ratio", "margin") else m)
    header = []
    for k in range(1, m + 1):
        header += [f"re(z{k})", f"im(z{k})"]
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            header += [f"entry_{i}{j}_re", f"entry_{i}{j}_im"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for z, v in zip(points, values):
        if not np.all(np.isfinite(v)):
            raise DegenerateError(f"non-finite {quantity} at {z.tolist()}")
        row = []
        for c in z:
            row += [repr(float(c.real) + 0.0), repr(float(c.imag) + 0.0)]
        for x in v.ravel():
            row += [repr(float(x.real) + 0.0), repr(float(x.imag) + 0.0)]
        writer.writerow(row)
    return buf.getvalue()
