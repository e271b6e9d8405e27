"""Formal power series on coefficient arrays.

All functions take and return 1-D numpy arrays of Taylor coefficients
``a[0], a[1], ...`` of a univariate series and truncate at a requested degree.
They carry no notion of kernels; :mod:`kervature.kernels` and
:mod:`kervature.diagonal` build on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import TruncationError


def _pad(a, n: int) -> np.ndarray:
    a = np.asarray(a)
    out = np.zeros(n + 1, dtype=np.result_type(a.dtype, float))
    k = min(len(a), n + 1)
    out[:k] = a[:k]
    return out


def product_coefficients(a, b, n: int) -> np.ndarray:
    """Cauchy product truncated at degree ``n``."""
    return np.convolve(_pad(a, n), _pad(b, n))[: n + 1]


def log_coefficients(a, n: int) -> np.ndarray:
    """Coefficients of ``log(a)`` for ``a[0] > 0`` (principal branch at the constant term)."""
    a = _pad(a, n)
    if not a[0] > 0:
        raise ValueError("log of a series needs a positive constant term")
    out = np.zeros_like(a)
    out[0] = math.log(a[0])
    # a' = a * L'  =>  k a_k = sum_{j=1}^{k} j L_j a_{k-j}
    for k in range(1, n + 1):
        acc = k * a[k]
        for j in range(1, k):
            acc -= j * out[j] * a[k - j]
        out[k] = acc / (k * a[0])
    return out


def exp_coefficients(c, n: int) -> np.ndarray:
    """Coefficients of ``exp(c)``."""
    c = _pad(c, n)
    out = np.zeros_like(c)
    out[0] = np.exp(c[0])
    # E' = c' E  =>  k E_k = sum_{j=1}^{k} j c_j E_{k-j}
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        out[k] = np.dot(j * c[1:k + 1], out[k - 1::-1][:k]) / k
    return out


def power_coefficients(a, alpha: float, n: int) -> np.ndarray:
    """Coefficients of ``a ** alpha`` via ``exp(alpha * log(a))``; needs ``a[0] > 0``."""
    if alpha == 0:
        return _pad([1.0], n)
    return exp_coefficients(alpha * log_coefficients(a, n), n)


def gaussian_coefficients(a, n: int) -> np.ndarray:
    """Coefficients of ``K d dbar K - dK dbar K`` for ``K = sum a_k (z conj w)^k``.

    In the variable ``q = z conj(w)`` this equals
    ``g_k = 1/2 sum_{i + j = k + 1} (i - j)^2 a_i a_j``; coefficients of
    ``a`` beyond its length are taken as zero, so pass at least ``n + 2`` of them
    when the series does not terminate.
    """
    a = _pad(a, n + 1)
    out = np.zeros(n + 1, dtype=a.dtype)
    for k in range(n + 1):
        i = np.arange(k + 2)
        out[k] = 0.5 * np.sum((2 * i - (k + 1)) ** 2 * a[i] * a[k + 1 - i])
    return out


def mixed_derivative_coefficients(a, n: int) -> np.ndarray:
    """Coefficients of ``d dbar K`` in ``q``: ``(k + 1)^2 a_{k+1}``."""
    a = _pad(a, n + 1)
    k = np.arange(n + 1)
    return (k + 1) ** 2 * a[1:]


def one_minus_q_coefficients(a, n: int) -> np.ndarray:
    """Coefficients of ``(1 - q) K``."""
    a = _pad(a, n)
    out = a.copy()
    out[1:] -= a[:-1]
    return out


def taylor_shift(a, s0: complex, n: int) -> np.ndarray:
    """Taylor coefficients at ``s0`` of the polynomial ``sum a_j s^j``, up to degree ``n``."""
    a = np.asarray(a, dtype=complex)
    deg = len(a) - 1
    out = np.zeros(n + 1, dtype=complex)
    j = np.arange(deg + 1)
    for k in range(min(n, deg) + 1):
        jj = j[k:]
        out[k] = np.sum(special.comb(jj, k) * a[k:] * s0 ** (jj - k))
    return out


def compose_univariate(outer, inner, n: int) -> np.ndarray:
    """``outer(inner)`` truncated at ``n``.

    ``outer`` holds Taylor coefficients around ``inner[0]``; ``inner`` holds
    Taylor coefficients of the inner function around the expansion point.
    """
    d = _pad(np.asarray(inner, dtype=complex), n)
    d[0] = 0.0
    outer = np.asarray(outer, dtype=complex)
    k_max = min(len(outer) - 1, n)
    out = np.zeros(n + 1, dtype=complex)
    out[0] = outer[k_max]
    for k in range(k_max - 1, -1, -1):
        out = np.convolve(out, d)[: n + 1]
        out[0] += outer[k]
    return out


# ---------------------------------------------------------------------------
# tails


@dataclass(frozen=True)
class TailRule:
    """What is known about coefficients past the stored ones.

    ``kind == "constant"``: every later coefficient equals ``value``.
    ``kind == "bound"``: ``|a_n| <= C (n + 1)^degree / radius^n``; ``sign`` is
    ``"nonnegative"`` when every later coefficient is known to be >= 0,
    otherwise ``"unknown"``.
    """

    kind: str
    value: float = 0.0
    C: float = 0.0
    degree: float = 0.0
    radius: float = 1.0
    sign: str = "unknown"

    def __post_init__(self):
        if self.kind not in ("constant", "bound"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "bound" and not (self.C >= 0 and self.radius > 0):
            raise ValueError("bound tail needs C >= 0 and radius > 0")

    @property
    def nonnegative(self) -> bool | None:
        """True/False when the tail sign is known, None otherwise."""
        if self.kind == "constant":
            return self.value >= 0
        if self.sign == "nonnegative":
            return True
        if self.C == 0:
            return True
        return None

    def bound(self, start: int, r: float, k: int = 0) -> float:
        """Upper bound of ``sum_{n >= start} |a_n| C(n, k) r^(n - k)`` for a bound tail.

        The sum bounds the tail of the ``k``-th derivative at ``|q| = r``.
        """
        if self.kind != "bound":
            raise ValueError("only bound tails have a numerical bound")
        if self.C == 0:
            return 0.0
        x = r / self.radius
        if x >= 1:
            return math.inf
        total = 0.0
        n = max(start, k)
        while n < start + 1_000_000:
            term = self.C * (n + 1) ** self.degree * math.comb(n, k) * x ** (n - k) * self.radius ** -k
            total += term
            # consecutive-term ratio decreases in n, so the remainder is geometric once it drops below 1
            ratio = x * ((n + 2) / (n + 1)) ** self.degree * (n + 1) / (n + 1 - k)
            if ratio < 1 and term <= 1e-17 * total:
                return total + term * ratio / (1 - ratio)
            n += 1
        return math.inf

    def to_spec(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": repr(float(self.value))}
        return {
            "kind": "bound",
            "C": repr(float(self.C)),
            "degree": repr(float(self.degree)),
            "radius": repr(float(self.radius)),
            "sign": self.sign,
        }

    @classmethod
    def from_spec(cls, spec: dict) -> TailRule:
        kind = spec.get("kind")
        if kind == "constant":
            return cls("constant", value=float(spec["value"]))
        return cls(
            "bound",
            C=float(spec.get("C", 0.0)),
            degree=float(spec.get("degree", 0.0)),
            radius=float(spec.get("radius", 1.0)),
            sign=spec.get("sign", "unknown"),
        )


def fit_growth_bound(coeffs, radius: float = 1.0, sign: str = "unknown") -> TailRule:
    """Empirical growth bound ``C (n + 1)^d radius^-n`` for the continuation of ``coeffs``.

    The exponent is the least-squares slope of ``log|a_n| radius^n`` against
    ``log(n + 1)`` over the upper half of the data, plus one; the constant
    doubles the largest observed ratio.  This is a heuristic certificate: it
    is exact for the usual ``n^d`` growth but cannot see structure beyond the
    stored coefficients.
    """
    a = np.abs(np.asarray(coeffs, dtype=float))
    n = np.arange(len(a))
    scaled = a * float(radius) ** n
    half = n >= len(a) // 2
    mask = half & (scaled > 0)
    if mask.sum() >= 2:
        slope = np.polyfit(np.log(n[mask] + 1.0), np.log(scaled[mask]), 1)[0]
        degree = max(0.0, float(slope)) + 1.0
    else:
        degree = 1.0
    tail = scaled[half] / (n[half] + 1.0) ** degree
    C = 2.0 * float(tail.max()) if tail.size else 0.0
    if C == 0.0 and scaled.any():
        C = 2.0 * float((scaled / (n + 1.0) ** degree).max())
    return TailRule("bound", C=C, degree=degree, radius=float(radius), sign=sign)


def szego_power_tail(alpha: float) -> TailRule:
    """Analytic bound for ``binom(n + alpha - 1, n)``, the coefficients of ``(1 - q)^-alpha``.

    The coefficient is ``prod_{k<=n} (1 + (alpha - 1)/k)``, which is at most 1
    for ``alpha <= 1`` and at most ``e^(alpha-1) (n+1)^(alpha-1)`` otherwise.
    """
    if alpha <= 1:
        return TailRule("bound", C=1.0, degree=0.0, radius=1.0, sign="nonnegative")
    return TailRule("bound", C=math.exp(alpha - 1), degree=alpha - 1, radius=1.0, sign="nonnegative")


def szego_power_coefficients(alpha: float, n: int) -> np.ndarray:
    """``binom(k + alpha - 1, k)`` for ``k = 0..n``."""
    k = np.arange(n + 1)
    return special.binom(k + alpha - 1, k)


def check_tail(tail: TailRule | None, start: int, r: float, scale: float, what: str = "series") -> None:
    """Raise :class:`TruncationError` when a bound tail cannot certify the accuracy."""
    from .config import TAIL_ACCURACY

    if tail is None or tail.kind != "bound":
        return
    err = tail.bound(start, r)
    if not err <= TAIL_ACCURACY * max(1.0, scale):
        raise TruncationError(
            f"{what}: tail bound {err:.3g} at |q| = {r:.6g} exceeds {TAIL_ACCURACY:g}"
        )
