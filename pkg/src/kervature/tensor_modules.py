"""Truncated tensor products ``(H, K^alpha) (x) (H, K^beta)`` over the disc and their diagonal submodules.

Polynomials in ``(z1, z2)`` are stored by total degree: ``blocks[d][i]`` is
the coefficient of ``z1^i z2^(d-i)``.  Monomials are orthogonal with
``||z1^i z2^j||^2 = 1/(a_i b_j)``, where ``a`` and ``b`` are the diagonal
coefficients of ``K^alpha`` and ``K^beta``.  Different total degrees are
orthogonal, so every Gram matrix below is block diagonal by degree and each
block is factored once per space.

``A0`` is spanned by ``(z1 - z2) z1^k z2^(d-1-k)`` (functions vanishing on the
diagonal), ``A1`` by ``(z1 - z2)^2 z1^k z2^(d-2-k)``; ``S1 = A0 - A1`` has
dimension one in each degree ``d >= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import diagonal
from . import finite_diff as fd
from . import series as fps
from .config import (
    LIMIT_FIT_DEGREE,
    LIMIT_SHRINK,
    LIMIT_STEPS,
    LIMIT_T0,
    MAX_CONDITION,
    MEMBERSHIP_TOL,
    TRUNCATION_N,
)
from .curvature import kab_kernel, log_hessian
from .errors import (
    DegenerateError,
    DomainError,
    IllConditionedError,
    TruncationError,
    UnsupportedError,
)
from .kernels import KernelExpr


# ---------------------------------------------------------------------------
# polynomials


def monomials(x, d: int) -> np.ndarray:
    """``x1^i x2^(d-i)`` for ``i = 0..d``."""
    i = np.arange(d + 1)
    return np.asarray(x[0], dtype=complex) ** i * np.asarray(x[1], dtype=complex) ** (d - i)


def poly_from_dict(coeffs: dict, N: int) -> list:
    """Degree blocks from ``{(i, j): c}``; raises if a term exceeds total degree ``N``."""
    blocks = [np.zeros(d + 1, dtype=complex) for d in range(N + 1)]
    for (i, j), c in coeffs.items():
        if i + j > N:
            raise TruncationError(f"monomial z1^{i} z2^{j} exceeds truncation degree {N}")
        blocks[i + j][i] += c
    return blocks


def poly_eval(blocks, x) -> complex:
    return complex(sum(np.dot(b, monomials(x, d)) for d, b in enumerate(blocks)))


def _a0_generators(d: int) -> np.ndarray:
    """Rows: ``(z1 - z2) z1^k z2^(d-1-k)`` in the degree-``d`` monomial basis."""
    C = np.zeros((d, d + 1))
    for k in range(d):
        C[k, k + 1] += 1.0
        C[k, k] -= 1.0
    return C


def _a1_generators(d: int) -> np.ndarray:
    """Rows: ``(z1 - z2)^2 z1^k z2^(d-2-k)``."""
    C = np.zeros((max(d - 1, 0), d + 1))
    for k in range(d - 1):
        C[k, k + 2] += 1.0
        C[k, k + 1] -= 2.0
        C[k, k] += 1.0
    return C


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True, eq=False)
class TruncatedTensorSpace:
    base: KernelExpr
    alpha: float
    beta: float
    N: int
    a: np.ndarray  # diagonal coefficients of K^alpha
    b: np.ndarray  # diagonal coefficients of K^beta
    weights: list = field(repr=False)  # weights[d][i] = ||z1^i z2^(d-i)||^2
    _factors: list = field(repr=False, default_factory=list)
    condition: float = 1.0

    def inner(self, f, g) -> complex:
        """``<f, g>``, linear in ``f``."""
        return complex(sum(np.sum(fb * np.conj(gb) * w) for fb, gb, w in zip(f, g, self.weights)))

    def norm(self, f) -> float:
        return math.sqrt(max(self.inner(f, f).real, 0.0))

    def kernel_section(self, y) -> list:
        """Monomial coefficients of ``(K^alpha (x) K^beta)(.; y)``."""
        return [np.conj(monomials(y, d)) / w for d, w in enumerate(self.weights)]

    def _solve(self, d: int, rhs: np.ndarray) -> np.ndarray:
        """``G_d^-1 rhs`` with one step of iterative refinement."""
        G, fac = self._factors[d]
        x = linalg.cho_solve(fac, rhs)
        return x + linalg.cho_solve(fac, rhs - G @ x)

    def project_a0(self, f) -> list:
        """Orthogonal projection of ``f`` onto the span of the ``A0`` generators."""
        out = [np.zeros(1, dtype=complex)]
        for d in range(1, self.N + 1):
            C = _a0_generators(d)
            c = self._solve(d, C @ (self.weights[d] * f[d]))
            out.append(C.T @ c)
        return out

    def a0_ratio_terms(self, x) -> np.ndarray:
        """Per-degree terms of ``K_A0(x; x) / |x1 - x2|^2``, computed without the cancelling factor."""
        terms = np.zeros(self.N + 1)
        for d in range(1, self.N + 1):
            u = monomials(x, d - 1)
            terms[d] = np.real(np.vdot(u, self._solve(d, u)))
        return terms


def build_truncated_space(K: KernelExpr, alpha: float, beta: float, N: int = TRUNCATION_N) -> TruncatedTensorSpace:
    """Truncated ``(H, K^alpha) (x) (H, K^beta)`` with all polynomials of total degree at most ``N``."""
    if K.m != 1:
        raise UnsupportedError("tensor-product spaces are built over disc kernels")
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if int(N) != N or N < 0:
        raise ValueError("N must be a nonnegative integer")
    N = int(N)
    a = diagonal.series_power(K, alpha, N).coefficient_array(N)
    b = diagonal.series_power(K, beta, N).coefficient_array(N)
    if np.any(a <= 0) or np.any(b <= 0):
        bad = "alpha" if np.any(a <= 0) else "beta"
        raise DegenerateError(f"K^{bad} has a nonpositive coefficient below degree {N + 1}")
    weights = [1.0 / (a[: d + 1] * b[d::-1]) for d in range(N + 1)]
    factors = [None]
    lo, hi = math.inf, 0.0
    for d in range(1, N + 1):
        C = _a0_generators(d)
        G = (C * weights[d]) @ C.T
        ev = np.linalg.eigvalsh(G)
        lo, hi = min(lo, ev[0]), max(hi, ev[-1])
        factors.append((G, linalg.cho_factor(G, lower=False)))
    cond = hi / lo if N >= 1 else 1.0
    if cond > MAX_CONDITION:
        raise IllConditionedError(f"A0 Gram condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    return TruncatedTensorSpace(K, float(alpha), float(beta), N, a, b, weights, factors, float(cond))


# ---------------------------------------------------------------------------
# projections of kernel sections


@dataclass(frozen=True, eq=False)
class A0Projection:
    """``K_A0^(N)(.; y)``: the projection of the kernel section at ``y`` onto ``A0``."""

    space: TruncatedTensorSpace
    at: np.ndarray
    coefficients: list
    gram_condition: float

    def __call__(self, x) -> complex:
        return poly_eval(self.coefficients, np.asarray(x, dtype=complex))


def _bidisc_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != 2 or np.any(np.abs(x) >= 1):
        raise DomainError(f"{x.tolist()} is not a point of the bidisc")
    return x


def project_kernel_onto_A0(space: TruncatedTensorSpace, w, rho) -> A0Projection:
    y = _bidisc_point([w, rho])
    coeffs = space.project_a0(space.kernel_section(y))
    return A0Projection(space, y, coeffs, space.condition)


def a0_diagonal_value(space: TruncatedTensorSpace, x) -> float:
    """``K_A0^(N)(x; x)``."""
    x = _bidisc_point(x)
    return float(abs(x[0] - x[1]) ** 2 * space.a0_ratio_terms(x).sum())


def tensor_diagonal_value(space: TruncatedTensorSpace, x) -> float:
    """``K^alpha(x1, x1) K^beta(x2, x2)`` from the closed form of the base kernel."""
    from .kernels import power

    x = _bidisc_point(x)
    k = space.base
    ka = power(k, space.alpha)._value(x[:1], x[:1]) if space.alpha != 1 else k._value(x[:1], x[:1])
    kb = power(k, space.beta)._value(x[1:], x[1:]) if space.beta != 1 else k._value(x[1:], x[1:])
    return float((ka * kb).real)


# ---------------------------------------------------------------------------
# Hardy space of the bidisc


def hardy_s0_closed_form(z1: complex, z2: complex) -> float:
    """``log(|1 - z1 conj z2|^2 / ((1 - |z1|^2)(1 - |z2|^2))) / |z1 - z2|^2`` for ``z1 != z2``."""
    z1, z2 = complex(z1), complex(z2)
    if abs(z1) >= 1 or abs(z2) >= 1:
        raise DomainError("points must lie in the disc")
    if z1 == z2:
        raise DomainError("closed form is singular at z1 = z2; use hardy_s0_diagonal")
    return _hardy_s0_stable(z1, z2)


def _hardy_s0_stable(z1: complex, z2: complex) -> float:
    # |1 - z1 conj z2|^2 = (1 - |z1|^2)(1 - |z2|^2) + |z1 - z2|^2
    p = (1 - abs(z1) ** 2) * (1 - abs(z2) ** 2)
    t = abs(z1 - z2) ** 2
    u = t / p
    if u < 1e-8:
        return (1 - u / 2 + u * u / 3) / p
    return math.log1p(u) / t


def hardy_s0_diagonal(z: complex) -> float:
    """Limit of the closed form as ``z2 -> z1 = z``: ``1/(1 - |z|^2)^2``."""
    return _hardy_s0_stable(complex(z), complex(z))


def hardy_s0_curvature(z: complex, h: float = 1e-3) -> float:
    """``d dbar log`` of the closed form restricted to the diagonal, by finite differences."""
    g = lambda p: math.log(_hardy_s0_stable(complex(p[0]), complex(p[0])))  # noqa: E731
    return float(fd.wirtinger_hessian(g, np.array([complex(z)]), h)[0, 0].real)


# ---------------------------------------------------------------------------
# limit along the approach to the diagonal


@dataclass(frozen=True, eq=False)
class LimitEstimate:
    alpha: float
    beta: float
    z: complex
    samples: list  # (t, ratio) with t strictly decreasing
    extrapolated: float
    error_estimate: float
    target: float
    truncation_N: int
    gram_condition: float
    tail_estimate: float

    @property
    def abs_error(self) -> float:
        return abs(self.extrapolated - self.target)

    def to_dict(self) -> dict:
        from .serialization import encode_complex, to_jsonable

        return to_jsonable({
            "alpha": self.alpha,
            "beta": self.beta,
            "z": encode_complex(self.z),
            "samples": [{"t": t, "ratio": r} for t, r in self.samples],
            "extrapolated": self.extrapolated,
            "error_estimate": self.error_estimate,
            "target": self.target,
            "abs_error": self.abs_error,
            "truncation_N": self.truncation_N,
            "gram_condition": self.gram_condition,
            "tail_estimate": self.tail_estimate,
        })


def limit_target(space: TruncatedTensorSpace, z) -> float:
    """``alpha beta / (alpha + beta) K(z, z)^(alpha+beta) d dbar log K(z, z)``, from jets."""
    s = space.alpha + space.beta
    m = kab_kernel(space.base, space.alpha, space.beta).matrix(z, z)
    return float((space.alpha * space.beta / s) * m[0, 0].real)


def _tail_estimate(terms: np.ndarray) -> float:
    """Geometric continuation of the last two per-degree terms."""
    last, prev = terms[-1], terms[-2] if len(terms) > 2 else 0.0
    if last == 0:
        return 0.0
    rho = last / prev if prev > 0 else math.inf
    if not rho < 1:
        return math.inf
    return last * rho / (1 - rho)


def limit_ratio(space: TruncatedTensorSpace, z, t0: float = LIMIT_T0, shrink: float = LIMIT_SHRINK,
                steps: int = LIMIT_STEPS, degree: int = LIMIT_FIT_DEGREE,
                fit_tol: float = 1e-2) -> LimitEstimate:
    """Extrapolate ``K_A0(z, zeta; z, zeta)/|z - zeta|^2`` to ``zeta = z`` along ``zeta = z - t``.

    The samples are fitted by a polynomial of degree ``degree`` in ``t`` whose
    value at 0 is the estimate; ``error_estimate`` is the change in that value
    when the fit degree is raised by one.
    """
    z = complex(z)
    if abs(z) > 0.7 + 1e-12:
        raise DomainError("limit computation requires |z| <= 0.7")
    ts = t0 * shrink ** np.arange(steps)
    if abs(z - ts[0]) >= 1:
        raise DomainError("approach path leaves the disc")
    ratios, tail = [], 0.0
    for t in ts:
        terms = space.a0_ratio_terms(np.array([z, z - t]))
        r = float(terms.sum())
        tail = max(tail, _tail_estimate(terms) / max(1.0, abs(r)))
        ratios.append(r)
    ratios = np.array(ratios)
    if not tail <= 1e-6:
        raise TruncationError(f"truncation N = {space.N} leaves relative tail {tail:.3g}")
    coef = np.polynomial.polynomial.polyfit(ts, ratios, degree)
    resid = ratios - np.polynomial.polynomial.polyval(ts, coef)
    scale = max(1.0, float(np.max(np.abs(ratios))))
    if np.max(np.abs(resid)) > fit_tol * scale:
        raise DegenerateError(f"fit residual {np.max(np.abs(resid)):.3g} above threshold")
    extrapolated = float(coef[0])
    if steps > degree + 1:
        higher = np.polynomial.polynomial.polyfit(ts, ratios, degree + 1)
        err = abs(float(higher[0]) - extrapolated)
    else:
        err = math.inf
    return LimitEstimate(
        space.alpha, space.beta, z, [(float(t), float(r)) for t, r in zip(ts, ratios)],
        extrapolated, err, limit_target(space, z), space.N, space.condition, tail,
    )


def curvature_via_limit(space: TruncatedTensorSpace, z, tol: float = 1e-3) -> dict:
    """``(2/K(z, z)^2) * limit``, which equals ``d dbar log K(z, z)`` when ``alpha = beta = 1``.

    Returns the limit-based value, the jet value, their difference and the
    curvature ``-d dbar log K``; raises if they disagree beyond ``tol``.
    """
    if space.alpha != 1 or space.beta != 1:
        raise UnsupportedError("the curvature limit needs alpha = beta = 1")
    est = limit_ratio(space, z)
    k = space.base(z, z).real
    value = 2.0 / k ** 2 * est.extrapolated
    direct = float(log_hessian(space.base, z)[0, 0].real)
    diff = abs(value - direct)
    if diff > tol:
        raise DegenerateError(f"limit value {value:.8g} differs from d dbar log K = {direct:.8g}")
    return {"value": value, "direct": direct, "abs_error": diff, "curvature": -value, "limit": est}


# ---------------------------------------------------------------------------
# S1 and the map R1


def s1_basis(space: TruncatedTensorSpace) -> list:
    """Unit vectors spanning ``S1`` in each degree ``d = 1..N`` (as degree blocks)."""
    out = []
    for d in range(1, space.N + 1):
        C0 = _a0_generators(d)
        C1 = _a1_generators(d)
        if C1.shape[0]:
            ns = linalg.null_space((C1 * space.weights[d]) @ C0.T)
            if ns.shape[1] != 1:
                raise DegenerateError(f"S1 has dimension {ns.shape[1]} in degree {d}")
            coeff = C0.T @ ns[:, 0]
        else:
            coeff = C0[0].copy()
        f = [np.zeros(k + 1, dtype=complex) for k in range(space.N + 1)]
        f[d] = coeff.astype(complex)
        f[d] /= space.norm(f)
        out.append(f)
    return out


def random_s1_elements(space: TruncatedTensorSpace, count: int = 10, seed: int = 0) -> list:
    """Unit-norm random combinations of the ``S1`` basis."""
    rng = np.random.default_rng(seed)
    basis = s1_basis(space)
    out = []
    for _ in range(count):
        g = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        f = [sum(c * e[d] for c, e in zip(g, basis)) for d in range(space.N + 1)]
        norm = space.norm(f)
        out.append([b / norm for b in f])
    return out


def s1_membership_defect(space: TruncatedTensorSpace, f) -> float:
    """Relative size of the parts of ``f`` outside ``S1``: the value on the diagonal and the ``A1`` component."""
    norm = max(space.norm(f), 1e-300)
    worst = 0.0
    for d in range(space.N + 1):
        fd_ = f[d]
        if d == 0:
            worst = max(worst, abs(fd_[0]))
            continue
        worst = max(worst, abs(fd_.sum()))  # restriction to the diagonal z1 = z2
        C1 = _a1_generators(d)
        if C1.shape[0]:
            g = (C1 * space.weights[d]) @ fd_
            hn = np.sqrt(np.einsum("ij,j,ij->i", C1, space.weights[d], C1))
            worst = max(worst, float(np.max(np.abs(g) / hn)))
    return worst / norm


def r1_apply(space: TruncatedTensorSpace, f) -> np.ndarray:
    """``(beta d1 f - alpha d2 f)`` on the diagonal over ``sqrt(alpha beta (alpha + beta))``.

    Returns coefficients of the one-variable polynomial, degrees ``0..N-1``.
    """
    a, b = space.alpha, space.beta
    out = np.zeros(max(space.N, 1), dtype=complex)
    for d in range(1, space.N + 1):
        i = np.arange(d + 1)
        out[d - 1] = np.sum((b * i - a * (d - i)) * f[d])
    return out / math.sqrt(a * b * (a + b))


def kab_series(space: TruncatedTensorSpace, n: int) -> np.ndarray:
    """Diagonal coefficients of ``K^(alpha+beta) d dbar log K``, degrees ``0..n``."""
    c = diagonal.coefficients(space.base, n + 1)
    log_k = fps.log_coefficients(c, n + 1)
    lifted = fps.power_coefficients(c, space.alpha + space.beta, n)
    return fps.product_coefficients(lifted, fps.mixed_derivative_coefficients(log_k, n), n)


def kab_norm(space: TruncatedTensorSpace, p) -> float:
    """Norm of a one-variable polynomial in ``(H, K^(alpha,beta))``."""
    p = np.asarray(p, dtype=complex)
    k = kab_series(space, len(p) - 1)
    if np.any(k[np.abs(p) > 0] <= 0):
        raise DegenerateError("a needed coefficient of K^(alpha,beta) is not positive")
    return math.sqrt(float(np.sum(np.abs(p) ** 2 / np.where(k > 0, k, 1.0))))


@dataclass(frozen=True)
class IsometryReport:
    max_mismatch: float
    mismatches: tuple
    count: int


def verify_r1_isometry(space: TruncatedTensorSpace, elements=None, tol: float = MEMBERSHIP_TOL) -> IsometryReport:
    """Largest ``| ||f|| - ||R1 f|| | / ||f||`` over ``elements`` (default: 10 random ``S1`` elements)."""
    if elements is None:
        elements = random_s1_elements(space, 10, 0)
    mism = []
    for f in elements:
        defect = s1_membership_defect(space, f)
        if defect > tol:
            raise DomainError(f"element is not in the truncated S1 (defect {defect:.3g})")
        nf = space.norm(f)
        mism.append(abs(nf - kab_norm(space, r1_apply(space, f))) / nf)
    return IsometryReport(max(mism, default=0.0), tuple(mism), len(mism))
