"""Sesqui-analytic kernels as immutable expression trees.

Atoms are functions of the inner product ``s = <z, w>`` on a ball (the disc
when ``m == 1``): Szego powers, the Drury-Arveson kernel, the rational
example ``(8 + 8s - s^2)/(1 - s)``, explicit rationals and diagonal series.
Composite nodes add, multiply, scale, raise to real powers, multiply by
``1 - <z, w>``, normalize at a point, or form tensor products.

Every node supports plain evaluation and exact derivative jets; jets of
composites come from truncated Taylor arithmetic (:mod:`kervature.jets`), never
from finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from . import series as fps
from .errors import BranchError, DegenerateError, DomainError, UnsupportedError
from .jets import Jet


# ---------------------------------------------------------------------------
# points and domains


def as_point(z, m: int | None = None) -> np.ndarray:
    """Coerce a scalar or sequence to a 1-D complex coordinate array."""
    p = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if m is not None and p.size != m:
        raise DomainError(f"expected a point in C^{m}, got {p.size} coordinates")
    if not np.all(np.isfinite(p)):
        raise DomainError("point has non-finite coordinates")
    return p


@dataclass(frozen=True)
class Domain:
    """Product of open unit balls; ``factors`` lists their dimensions.

    ``(1,)`` is the disc, ``(m,)`` the ball in C^m, ``(1, 1)`` the bidisc.
    """

    factors: tuple

    @classmethod
    def disc(cls) -> Domain:
        return cls((1,))

    @classmethod
    def ball(cls, m: int) -> Domain:
        return cls((int(m),))

    @classmethod
    def polydisc(cls, d: int) -> Domain:
        return cls((1,) * int(d))

    @property
    def m(self) -> int:
        return sum(self.factors)

    @property
    def kind(self) -> str:
        if self.factors == (1,):
            return "disc"
        if len(self.factors) == 1:
            return f"ball({self.factors[0]})"
        if all(f == 1 for f in self.factors):
            return f"polydisc({len(self.factors)})"
        return "product(" + ",".join(str(f) for f in self.factors) + ")"

    def product(self, other: Domain) -> Domain:
        return Domain(self.factors + other.factors)

    def split(self, z: np.ndarray) -> list:
        out, k = [], 0
        for f in self.factors:
            out.append(z[k:k + f])
            k += f
        return out

    def contains(self, z) -> bool:
        z = as_point(z, self.m)
        return all(np.sum(np.abs(part) ** 2) < 1.0 for part in self.split(z))

    def check(self, z, name: str = "point") -> np.ndarray:
        z = as_point(z, self.m)
        if not self.contains(z):
            raise DomainError(f"{name} {z.tolist()} lies outside the {self.kind}")
        return z


# ---------------------------------------------------------------------------
# base classes


class KernelExpr:
    """Base class of all kernel nodes.  Instances are immutable."""

    is_radial = False

    @property
    def domain(self) -> Domain:
        raise NotImplementedError

    @property
    def m(self) -> int:
        return self.domain.m

    def __call__(self, z, w) -> complex:
        return eval_kernel(self, z, w)

    def jet(self, z, w, order: int = 2) -> Jet:
        return eval_jet(self, z, w, order)

    def _value(self, z: np.ndarray, w: np.ndarray) -> complex:
        raise NotImplementedError

    def _jet(self, z: np.ndarray, w: np.ndarray, order: int) -> Jet:
        raise UnsupportedError(f"{type(self).__name__} has no derivative jets")

    def to_spec(self) -> dict:
        raise NotImplementedError

    # arithmetic sugar
    def __add__(self, other):
        if isinstance(other, KernelExpr):
            return SumKernel((self, other))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, KernelExpr):
            return ProductKernel((self, other))
        if isinstance(other, (int, float)):
            return ScaledKernel(float(other), self)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, alpha):
        return PowerKernel(float(alpha), self)


class RadialKernel(KernelExpr):
    """A kernel ``g(<z, w>)`` with ``g`` holomorphic on the unit disc."""

    is_radial = True

    @property
    def domain(self) -> Domain:
        return Domain.ball(self.dim)

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def radial_value(self, s: complex) -> complex:
        raise NotImplementedError

    def radial_taylor(self, s0: complex, n: int) -> np.ndarray:
        """Taylor coefficients ``g^(k)(s0)/k!`` for ``k = 0..n``."""
        raise NotImplementedError

    def _value(self, z, w):
        return complex(self.radial_value(complex(np.vdot(w, z))))

    def _jet(self, z, w, order):
        s = Jet.inner_product(z, w, order)
        return s.compose(self.radial_taylor(s.value, s.nilpotency))


def _spec_float(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# atoms


_SZEGO_NAMES = ("szego", "szego-power", "bergman", "drury-arveson")


@dataclass(frozen=True)
class SzegoPower(RadialKernel):
    """``(1 - <z, w>)^-alpha``, principal branch (``Re(1 - s) > 0`` on the ball)."""

    alpha: float = 1.0
    m_: int = 1
    name: str = "szego-power"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("Szego power needs alpha > 0")
        if self.name not in _SZEGO_NAMES:
            raise ValueError(f"unknown Szego-family name {self.name!r}")

    @property
    def dim(self):
        return self.m_

    def radial_value(self, s):
        return (1.0 - s) ** -self.alpha

    def radial_taylor(self, s0, n):
        k = np.arange(n + 1)
        return special.binom(self.alpha + k - 1, k) * (1.0 - s0) ** (-self.alpha - k)

    def to_spec(self):
        if self.name == "szego":
            return {"type": "szego"}
        if self.name == "bergman":
            return {"type": "bergman"}
        if self.name == "drury-arveson":
            return {"type": "drury-arveson", "m": self.m_}
        spec = {"type": "szego-power", "alpha": _spec_float(self.alpha)}
        if self.m_ != 1:
            spec["m"] = self.m_
        return spec


def szego(m: int = 1) -> SzegoPower:
    """Szego kernel of the disc, ``1/(1 - z conj w)``."""
    if m != 1:
        return drury_arveson(m)
    return SzegoPower(1.0, 1, "szego")


def bergman() -> SzegoPower:
    """Bergman kernel of the disc, ``(1 - z conj w)^-2``."""
    return SzegoPower(2.0, 1, "bergman")


def drury_arveson(m: int) -> SzegoPower:
    """Drury-Arveson kernel ``1/(1 - <z, w>)`` on the ball in C^m."""
    return SzegoPower(1.0, int(m), "drury-arveson")


def szego_power(alpha: float, m: int = 1) -> SzegoPower:
    return SzegoPower(float(alpha), int(m), "szego-power")


@dataclass(frozen=True)
class K0Kernel(RadialKernel):
    """``(8 + 8s - s^2)/(1 - s) = 8 + 16 s + 15 s^2/(1 - s)`` on the disc.

    Its coefficients are nonnegative, so it is NND, but ``(1 - s) K0`` has a
    negative coefficient: multiplication by ``z`` is not a contraction even
    though the pointwise curvature inequality holds.
    """

    @property
    def dim(self):
        return 1

    def radial_value(self, s):
        return (8.0 + 8.0 * s - s * s) / (1.0 - s)

    def radial_taylor(self, s0, n):
        # s - 7 + 15/(1 - s)
        k = np.arange(n + 1)
        out = 15.0 / (1.0 - s0) ** (k + 1) + 0j
        out[0] += s0 - 7.0
        if n >= 1:
            out[1] += 1.0
        return out

    def to_spec(self):
        return {"type": "paper-k0"}


@dataclass(frozen=True)
class RationalKernel(RadialKernel):
    """``P(s)/Q(s)`` with real coefficient lists (ascending powers), ``Q`` zero-free on the disc."""

    num: tuple = (1.0,)
    den: tuple = (1.0,)
    m_: int = 1

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(float(c) for c in self.num))
        object.__setattr__(self, "den", tuple(float(c) for c in self.den))
        if not self.den or self.den[0] == 0:
            raise ValueError("denominator must have a nonzero constant term")
        roots = np.roots(self.den[::-1]) if len(self.den) > 1 else np.array([])
        if np.any(np.abs(roots) < 1.0):
            raise ValueError("denominator vanishes inside the unit disc")

    @property
    def dim(self):
        return self.m_

    def radial_value(self, s):
        return np.polyval(self.num[::-1], s) / np.polyval(self.den[::-1], s)

    def radial_taylor(self, s0, n):
        p = fps.taylor_shift(self.num, s0, n)
        q = fps.taylor_shift(self.den, s0, n)
        out = np.zeros(n + 1, dtype=complex)
        for k in range(n + 1):
            out[k] = (p[k] - np.dot(q[1:k + 1], out[k - 1::-1][:k])) / q[0]
        return out

    def to_spec(self):
        spec = {
            "type": "rational",
            "num": [_spec_float(c) for c in self.num],
            "den": [_spec_float(c) for c in self.den],
        }
        if self.m_ != 1:
            spec["m"] = self.m_
        return spec


@dataclass(frozen=True)
class DiagonalSeriesKernel(RadialKernel):
    """``sum_n a_n <z, w>^n`` from stored coefficients plus an optional tail rule.

    Without a tail the series is the polynomial of the stored coefficients.
    With a ``constant`` tail the continuation is summed in closed form.  With
    a ``bound`` tail the stored partial sum is returned only when the bound
    certifies the truncation error below the package accuracy.
    """

    coeffs: tuple = (1.0,)
    tail: fps.TailRule | None = None
    declared_radius: float = 1.0
    m_: int = 1

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        if not c:
            raise ValueError("a diagonal series needs at least one coefficient")
        if not all(math.isfinite(x) for x in c):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return self.m_

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_polynomial(self) -> bool:
        return self.tail is None

    def coefficient(self, n: int) -> float:
        if n <= self.N:
            return self.coeffs[n]
        if self.tail is None:
            return 0.0
        if self.tail.kind == "constant":
            return self.tail.value
        from .errors import TruncationError

        raise TruncationError(f"coefficient {n} lies beyond the {self.N + 1} stored ones")

    def coefficient_array(self, n: int) -> np.ndarray:
        return np.array([self.coefficient(k) for k in range(n + 1)])

    def _check_radius(self, s):
        if abs(s) >= self.declared_radius:
            raise DomainError(f"|<z, w>| = {abs(s):.6g} outside declared radius {self.declared_radius}")

    def radial_value(self, s):
        self._check_radius(s)
        partial = np.polyval(self.coeffs[::-1], s)
        if self.tail is not None:
            if self.tail.kind == "constant":
                partial += self.tail.value * s ** (self.N + 1) / (1.0 - s)
            else:
                fps.check_tail(self.tail, self.N + 1, abs(s), abs(partial), "diagonal series")
        return partial

    def radial_taylor(self, s0, n):
        self._check_radius(s0)
        out = fps.taylor_shift(self.coeffs, s0, n)
        if self.tail is None:
            return out
        if self.tail.kind == "constant":
            p = self.N + 1
            k = np.arange(n + 1)
            mono = np.where(k <= p, special.comb(p, k) * s0 ** np.maximum(p - k, 0) + 0j, 0)
            geo = (1.0 - s0) ** -(k + 1.0)
            return out + self.tail.value * np.convolve(mono, geo)[: n + 1]
        from .config import TAIL_ACCURACY
        from .errors import TruncationError

        for k in range(n + 1):
            err = self.tail.bound(self.N + 1, abs(s0), k)
            if not err <= TAIL_ACCURACY * max(1.0, abs(out[k])):
                raise TruncationError(
                    f"diagonal series: derivative {k} tail bound {err:.3g} at |q| = {abs(s0):.6g} too large"
                )
        return out

    def to_spec(self):
        spec = {"type": "diagonal-series", "coeffs": [_spec_float(c) for c in self.coeffs]}
        if self.tail is not None:
            spec["tail"] = self.tail.to_spec()
        if self.declared_radius != 1.0:
            spec["declared_radius"] = _spec_float(self.declared_radius)
        if self.m_ != 1:
            spec["m"] = self.m_
        return spec


def constant(c: float = 1.0, m: int = 1) -> DiagonalSeriesKernel:
    """The constant kernel ``c``."""
    return DiagonalSeriesKernel((float(c),), None, 1.0, int(m))


def k0() -> K0Kernel:
    return K0Kernel()


# ---------------------------------------------------------------------------
# composites


def _same_domain(children) -> Domain:
    d = children[0].domain
    for c in children[1:]:
        if c.domain != d:
            raise DomainError(f"cannot combine kernels on {d.kind} and {c.domain.kind}")
    return d


@dataclass(frozen=True)
class SumKernel(KernelExpr):
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("sum of no kernels")
        _same_domain(self.children)

    @property
    def domain(self):
        return self.children[0].domain

    @property
    def is_radial(self):
        return all(c.is_radial for c in self.children)

    def radial_value(self, s):
        return sum(c.radial_value(s) for c in self.children)

    def radial_taylor(self, s0, n):
        return sum(c.radial_taylor(s0, n) for c in self.children)

    def _value(self, z, w):
        return sum(c._value(z, w) for c in self.children)

    def _jet(self, z, w, order):
        if self.is_radial:
            return RadialKernel._jet(self, z, w, order)
        out = self.children[0]._jet(z, w, order)
        for c in self.children[1:]:
            out = out + c._jet(z, w, order)
        return out

    def to_spec(self):
        return {"type": "sum", "children": [c.to_spec() for c in self.children]}


@dataclass(frozen=True)
class ProductKernel(KernelExpr):
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("product of no kernels")
        _same_domain(self.children)

    @property
    def domain(self):
        return self.children[0].domain

    @property
    def is_radial(self):
        return all(c.is_radial for c in self.children)

    def radial_value(self, s):
        return math.prod(c.radial_value(s) for c in self.children)

    def radial_taylor(self, s0, n):
        out = self.children[0].radial_taylor(s0, n)
        for c in self.children[1:]:
            out = np.convolve(out, c.radial_taylor(s0, n))[: n + 1]
        return out

    def _value(self, z, w):
        return math.prod(c._value(z, w) for c in self.children)

    def _jet(self, z, w, order):
        if self.is_radial:
            return RadialKernel._jet(self, z, w, order)
        out = self.children[0]._jet(z, w, order)
        for c in self.children[1:]:
            out = out * c._jet(z, w, order)
        return out

    def to_spec(self):
        return {"type": "product", "children": [c.to_spec() for c in self.children]}


@dataclass(frozen=True)
class ScaledKernel(KernelExpr):
    c: float = 1.0
    child: KernelExpr = None

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("scale factor must be positive")

    @property
    def domain(self):
        return self.child.domain

    @property
    def is_radial(self):
        return self.child.is_radial

    def radial_value(self, s):
        return self.c * self.child.radial_value(s)

    def radial_taylor(self, s0, n):
        return self.c * self.child.radial_taylor(s0, n)

    def _value(self, z, w):
        return self.c * self.child._value(z, w)

    def _jet(self, z, w, order):
        return self.child._jet(z, w, order) * self.c

    def to_spec(self):
        return {"type": "scale", "c": _spec_float(self.c), "children": [self.child.to_spec()]}


@dataclass(frozen=True)
class OneMinusKernel(KernelExpr):
    """``(1 - <z, w>) K``; on the ball this is ``B_m^-1 K``."""

    child: KernelExpr = None

    def __post_init__(self):
        if len(self.child.domain.factors) != 1:
            raise DomainError("1 - <z, w> is only defined on a single ball")

    @property
    def domain(self):
        return self.child.domain

    @property
    def is_radial(self):
        return self.child.is_radial

    def radial_value(self, s):
        return (1.0 - s) * self.child.radial_value(s)

    def radial_taylor(self, s0, n):
        t = self.child.radial_taylor(s0, n)
        out = (1.0 - s0) * t
        out[1:] -= t[:-1]
        return out

    def _value(self, z, w):
        return (1.0 - complex(np.vdot(w, z))) * self.child._value(z, w)

    def _jet(self, z, w, order):
        s = Jet.inner_product(z, w, order)
        return (1.0 - s) * self.child._jet(z, w, order)

    def to_spec(self):
        return {"type": "one-minus-zw", "children": [self.child.to_spec()]}


def _tracked_power(fn, s: complex, alpha: float) -> complex:
    """``g(s)^alpha`` continued along ``t -> g(t s)``, ``t in [0, 1]``, from ``g(0)^alpha > 0``."""
    g0 = complex(fn(0.0))
    if g0.real <= 0 or abs(g0.imag) > 1e-12 * abs(g0):
        raise BranchError(f"base kernel value at the origin is {g0}, not positive")
    if s == 0:
        return g0.real ** alpha + 0j
    for samples in (65, 1025):
        t = np.linspace(0.0, 1.0, samples)
        vals = np.array([complex(fn(ti * s)) for ti in t])
        mags = np.abs(vals)
        if mags.min() <= 1e-12 * mags.max():
            raise BranchError("kernel vanishes along the evaluation path; power undefined")
        phase = np.unwrap(np.angle(vals))
        if np.max(np.abs(np.diff(phase))) < np.pi / 4:
            return complex(np.exp(alpha * (np.log(mags[-1]) + 1j * phase[-1])))
    raise BranchError("argument of the kernel varies too fast to track a branch")


@dataclass(frozen=True)
class PowerKernel(KernelExpr):
    """``K^alpha`` with the branch fixed by continuity from the diagonal origin.

    Supported bases: radial kernels (branch tracked along ``t <z, w>``),
    and products, tensor products, scalings and powers of supported bases.
    """

    alpha: float = 1.0
    child: KernelExpr = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("power needs alpha > 0")

    @property
    def domain(self):
        return self.child.domain

    @property
    def is_radial(self):
        return self.child.is_radial

    @cached_property
    def resolved(self) -> KernelExpr:
        """An equivalent tree whose powers sit directly on radial bases."""
        return _distribute_power(self.child, self.alpha)

    def radial_value(self, s):
        c = self.child
        if isinstance(c, SzegoPower):
            return (1.0 - s) ** -(c.alpha * self.alpha)
        return _tracked_power(c.radial_value, s, self.alpha)

    def radial_taylor(self, s0, n):
        c = self.child
        if isinstance(c, SzegoPower):
            return SzegoPower(c.alpha * self.alpha, c.m_).radial_taylor(s0, n)
        t = c.radial_taylor(s0, n)
        v = self.radial_value(s0)
        k = np.arange(n + 1)
        outer = special.binom(self.alpha, k) * v / t[0] ** k
        return fps.compose_univariate(outer, t, n)

    def _value(self, z, w):
        if self.is_radial:
            return RadialKernel._value(self, z, w)
        return self.resolved._value(z, w)

    def _jet(self, z, w, order):
        if self.is_radial:
            return RadialKernel._jet(self, z, w, order)
        return self.resolved._jet(z, w, order)

    def to_spec(self):
        return {"type": "power", "alpha": _spec_float(self.alpha), "children": [self.child.to_spec()]}


def _distribute_power(expr: KernelExpr, alpha: float) -> KernelExpr:
    if expr.is_radial:
        return PowerKernel(alpha, expr)
    if isinstance(expr, ProductKernel):
        return ProductKernel(tuple(_distribute_power(c, alpha) for c in expr.children))
    if isinstance(expr, TensorKernel):
        return TensorKernel(_distribute_power(expr.left, alpha), _distribute_power(expr.right, alpha))
    if isinstance(expr, ScaledKernel):
        return ScaledKernel(expr.c ** alpha, _distribute_power(expr.child, alpha))
    if isinstance(expr, PowerKernel):
        return _distribute_power(expr.child, expr.alpha * alpha)
    raise UnsupportedError(
        f"power not representable: no branch convention for a {type(expr).__name__} base"
    )


def power(expr: KernelExpr, alpha: float) -> PowerKernel:
    """``expr ** alpha``; raises :class:`UnsupportedError` when no branch convention applies."""
    p = PowerKernel(float(alpha), expr)
    if not p.is_radial:
        p.resolved  # noqa: B018 - fail early
    return p


@dataclass(frozen=True)
class NormalizedKernel(KernelExpr):
    """``K(w0, w0) K(z, w) / (K(z, w0) K(w0, w))``, so that ``K~(z, w0) = 1``."""

    child: KernelExpr = None
    w0: tuple = field(default=(0j,))

    def __post_init__(self):
        w0 = self.child.domain.check(self.w0, "normalization point")
        object.__setattr__(self, "w0", tuple(complex(c) for c in w0))
        k00 = self.child._value(w0, w0)
        if not (k00.real > 0 and abs(k00.imag) <= 1e-12 * abs(k00)):
            raise DegenerateError(f"K(w0, w0) = {k00} is not positive")

    @property
    def domain(self):
        return self.child.domain

    @cached_property
    def _k00(self) -> float:
        w0 = np.array(self.w0)
        return self.child._value(w0, w0).real

    def _value(self, z, w):
        w0 = np.array(self.w0)
        a = self.child._value(z, w0)
        b = self.child._value(w0, w)
        if a == 0 or b == 0:
            raise DegenerateError("K(., w0) vanishes at an evaluation point")
        return self._k00 * self.child._value(z, w) / (a * b)

    def _jet(self, z, w, order):
        w0 = np.array(self.w0)
        a = self.child._jet(z, w0, order).holomorphic_part()
        b = self.child._jet(w0, w, order).antiholomorphic_part()
        if a.value == 0 or b.value == 0:
            raise DegenerateError("K(., w0) vanishes at an evaluation point")
        return self.child._jet(z, w, order) * a.reciprocal() * b.reciprocal() * self._k00

    def to_spec(self):
        from .serialization import encode_point

        return {"type": "normalize", "w0": encode_point(self.w0), "children": [self.child.to_spec()]}


def normalize_at(expr: KernelExpr, w0) -> NormalizedKernel:
    """Rescale ``expr`` so that ``K~(z, w0) = 1`` for every ``z``."""
    return NormalizedKernel(expr, tuple(as_point(w0, expr.domain.m)))


@dataclass(frozen=True)
class TensorKernel(KernelExpr):
    """``K1(z, w) K2(zeta, rho)`` on the product domain."""

    left: KernelExpr = None
    right: KernelExpr = None

    @property
    def domain(self):
        return self.left.domain.product(self.right.domain)

    def _value(self, z, w):
        k = self.left.domain.m
        return self.left._value(z[:k], w[:k]) * self.right._value(z[k:], w[k:])

    def _jet(self, z, w, order):
        k = self.left.domain.m
        m = self.domain.m
        a = self.left._jet(z[:k], w[:k], order).embed(m, 0)
        b = self.right._jet(z[k:], w[k:], order).embed(m, k)
        return a * b

    def to_spec(self):
        return {"type": "tensor", "children": [self.left.to_spec(), self.right.to_spec()]}


def tensor_product(k1: KernelExpr, k2: KernelExpr) -> TensorKernel:
    return TensorKernel(k1, k2)


# ---------------------------------------------------------------------------
# evaluation entry points


def eval_kernel(expr: KernelExpr, z, w) -> complex:
    """``K(z, w)`` after checking both points lie in the domain."""
    d = expr.domain
    z = d.check(z, "z")
    w = d.check(w, "w")
    return complex(expr._value(z, w))


def eval_jet(expr: KernelExpr, z, w, order: int = 2) -> Jet:
    """Exact derivatives ``d^a dbar^b K(z, w)`` with every component of ``a, b`` at most ``order``."""
    if int(order) != order or order < 0:
        raise ValueError("order must be a nonnegative integer")
    d = expr.domain
    z = d.check(z, "z")
    w = d.check(w, "w")
    return expr._jet(z, w, int(order))
