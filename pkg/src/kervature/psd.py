"""Finite-sample Gram matrices and non-negative-definiteness verdicts."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import MAX_GRID_RADIUS, MIN_SEPARATION, NND_TOL
from .errors import (
    DomainError,
    GramEvaluationError,
    KervatureError,
    ShapeError,
    SpecError,
    UndeterminedSignError,
)
from .kernels import DiagonalSeriesKernel, Domain, KernelExpr, as_point


# ---------------------------------------------------------------------------
# sample sets


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct points of a domain together with the recipe that produced them."""

    points: tuple
    domain: Domain = field(default_factory=Domain.disc)
    recipe: dict = field(default_factory=lambda: {"recipe": "explicit"})

    def __post_init__(self):
        pts = tuple(self.domain.check(p, f"sample point {k}") for k, p in enumerate(self.points))
        object.__setattr__(self, "points", pts)
        if len(pts) > 1:
            arr = np.array(pts)
            d = np.sqrt(np.sum(np.abs(arr[:, None, :] - arr[None, :, :]) ** 2, axis=-1))
            np.fill_diagonal(d, np.inf)
            if d.min() < MIN_SEPARATION:
                i, j = np.unravel_index(np.argmin(d), d.shape)
                raise DomainError(
                    f"sample points {i} and {j} are closer than {MIN_SEPARATION:g}"
                )

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def subset(self, indices) -> SampleSet:
        idx = [int(i) for i in indices]
        return SampleSet(
            tuple(self.points[i] for i in idx),
            self.domain,
            {"recipe": "subset", "of": self.recipe, "indices": idx},
        )

    # -- recipes ----------------------------------------------------------

    @classmethod
    def explicit(cls, points, domain: Domain | None = None) -> SampleSet:
        pts = [as_point(p) for p in points]
        if domain is None:
            domain = Domain.ball(pts[0].size) if pts else Domain.disc()
        return cls(tuple(pts), domain, {"recipe": "explicit"})

    @classmethod
    def radial_grid(cls, radii, angles=8, domain: Domain | None = None) -> SampleSet:
        """Points ``r e^{i theta}`` (disc), or ``r`` times a rotating unit direction in each ball factor.

        ``angles`` is a count of equally spaced angles or an explicit list in radians.
        """
        domain = Domain.disc() if domain is None else domain
        if isinstance(angles, (int, np.integer)):
            thetas = [2 * math.pi * k / int(angles) for k in range(int(angles))]
        else:
            thetas = [float(a) for a in angles]
        radii = [float(r) for r in radii]
        pts = [_grid_point(domain, r, th) for r in radii for th in thetas]
        recipe = {"recipe": "radial-grid", "radii": radii, "angles": angles if isinstance(angles, int) else thetas}
        return cls(tuple(pts), domain, recipe)

    @classmethod
    def random(cls, seed: int, count: int, max_radius: float = MAX_GRID_RADIUS,
               domain: Domain | None = None) -> SampleSet:
        """``count`` points drawn uniformly from the radius-``max_radius`` ball in every factor."""
        domain = Domain.disc() if domain is None else domain
        if not 0 < max_radius < 1:
            raise SpecError("max_radius must lie in (0, 1)")
        rng = np.random.default_rng(seed)
        pts: list = []
        while len(pts) < count:
            parts = []
            for f in domain.factors:
                v = rng.standard_normal(f) + 1j * rng.standard_normal(f)
                v /= np.linalg.norm(v)
                parts.append(v * max_radius * rng.random() ** (1.0 / (2 * f)))
            p = np.concatenate(parts)
            if all(np.linalg.norm(p - q) >= MIN_SEPARATION for q in pts):
                pts.append(p)
        recipe = {"recipe": "random", "seed": int(seed), "count": int(count), "max_radius": float(max_radius)}
        return cls(tuple(pts), domain, recipe)

    # -- JSON -------------------------------------------------------------

    def to_spec(self) -> dict:
        from .serialization import encode_point

        spec = dict(self.recipe)
        if spec.get("recipe") in ("explicit", "subset"):
            spec = {"recipe": "explicit", "points": [encode_point(p) for p in self.points]}
        if self.domain != Domain.disc():
            spec["domain"] = list(self.domain.factors)
        return spec

    @classmethod
    def from_spec(cls, spec, domain: Domain | None = None) -> SampleSet:
        from .serialization import decode_point

        if isinstance(spec, list):
            spec = {"recipe": "explicit", "points": spec}
        if not isinstance(spec, dict):
            raise SpecError("sample spec must be an object or a list of points")
        if "domain" in spec:
            domain = Domain(tuple(int(f) for f in spec["domain"]))
        recipe = spec.get("recipe", "explicit")
        try:
            if recipe == "explicit":
                pts = [decode_point(p) for p in spec["points"]]
                if domain is None:
                    domain = Domain.ball(pts[0].size)
                return cls(tuple(pts), domain, {"recipe": "explicit"})
            if recipe == "radial-grid":
                angles = spec.get("angles", 8)
                return cls.radial_grid(spec["radii"], angles, domain)
            if recipe == "random":
                return cls.random(int(spec["seed"]), int(spec["count"]),
                                  float(spec.get("max_radius", MAX_GRID_RADIUS)), domain)
        except KeyError as exc:
            raise SpecError(f"sample recipe {recipe!r} is missing {exc}") from exc
        raise SpecError(f"unknown sample recipe {recipe!r}")


def _grid_point(domain: Domain, r: float, theta: float) -> np.ndarray:
    parts = []
    for k, f in enumerate(domain.factors):
        l = np.arange(f)
        parts.append(r * np.exp(1j * (l + 1 + k) * theta) / math.sqrt(f))
    return np.concatenate(parts)


def default_grid(domain: Domain | None = None) -> SampleSet:
    from .config import DEFAULT_ANGLES, DEFAULT_RADII

    return SampleSet.radial_grid(DEFAULT_RADII, DEFAULT_ANGLES, domain)


# ---------------------------------------------------------------------------
# Gram matrices


def _block_size(kernel) -> int:
    return int(getattr(kernel, "size", 1)) if hasattr(kernel, "matrix") else 1


def _entry(kernel, z, w) -> np.ndarray:
    if hasattr(kernel, "matrix"):
        return np.asarray(kernel.matrix(z, w), dtype=complex)
    return np.array([[kernel(z, w)]], dtype=complex)


def gram_matrix(kernel, pts: SampleSet) -> np.ndarray:
    """Hermitian Gram matrix; blocks ``K(x_i, x_j)`` of size ``m x m`` for matrix kernels.

    Only the upper block triangle is evaluated; the lower one is its conjugate
    transpose and diagonal blocks are symmetrized.
    """
    b = _block_size(kernel)
    p = len(pts)
    G = np.zeros((p * b, p * b), dtype=complex)
    for i, j in itertools.combinations_with_replacement(range(p), 2):
        try:
            blk = _entry(kernel, pts.points[i], pts.points[j])
        except KervatureError as exc:
            raise GramEvaluationError(i, j, exc) from exc
        except (ArithmeticError, ValueError) as exc:
            raise GramEvaluationError(i, j, exc) from exc
        if i == j:
            blk = 0.5 * (blk + blk.conj().T)
        G[i * b:(i + 1) * b, j * b:(j + 1) * b] = blk
        if i != j:
            G[j * b:(j + 1) * b, i * b:(i + 1) * b] = blk.conj().T
    return G


@dataclass(frozen=True, eq=False)
class GramVerdict:
    is_nnd: bool
    min_eigenvalue: float
    max_eigenvalue: float
    tolerance_used: float
    witness: np.ndarray | None = None
    size: int = 0

    def to_dict(self) -> dict:
        from .serialization import to_jsonable

        return to_jsonable({
            "is_nnd": self.is_nnd,
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "tolerance": self.tolerance_used,
            "witness": None if self.witness is None else self.witness,
            "size": self.size,
        })


def nnd_verdict(G: np.ndarray, tol: float = NND_TOL) -> GramVerdict:
    """Verdict for an explicit hermitian matrix."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    G = np.asarray(G, dtype=complex)
    if G.size == 0:
        return GramVerdict(True, 0.0, 0.0, tol, None, 0)
    G = 0.5 * (G + G.conj().T)
    evals, evecs = np.linalg.eigh(G)
    lo, hi = float(evals[0]), float(evals[-1])
    ok = lo >= -tol * max(1.0, hi)
    witness = None if ok else evecs[:, 0]
    return GramVerdict(bool(ok), lo, hi, tol, witness, G.shape[0])


def check_nnd(kernel, pts: SampleSet, tol: float = NND_TOL) -> GramVerdict:
    return nnd_verdict(gram_matrix(kernel, pts), tol)


def check_order(k1, k2, pts: SampleSet, tol: float = NND_TOL) -> GramVerdict:
    """Verdict for ``k1 - k2 >= 0`` on ``pts``."""
    if _block_size(k1) != _block_size(k2):
        raise ShapeError(f"kernels have block sizes {_block_size(k1)} and {_block_size(k2)}")
    return nnd_verdict(gram_matrix(k1, pts) - gram_matrix(k2, pts), tol)


# ---------------------------------------------------------------------------
# exact criterion for diagonal kernels


@dataclass(frozen=True)
class CoefficientVerdict:
    is_nnd: bool
    first_negative: int | None


def coefficient_nnd(k) -> CoefficientVerdict:
    """``sum a_n (z conj w)^n`` is NND on the disc iff every ``a_n >= 0``."""
    if not isinstance(k, DiagonalSeriesKernel):
        from .diagonal import as_series

        if not isinstance(k, KernelExpr):
            k = DiagonalSeriesKernel(tuple(k))
        else:
            k = as_series(k)
    for n, a in enumerate(k.coeffs):
        if a < 0:
            return CoefficientVerdict(False, n)
    if k.tail is None:
        return CoefficientVerdict(True, None)
    sign = k.tail.nonnegative
    if sign is None:
        raise UndeterminedSignError("the sign of the series tail is unknown")
    if not sign:
        return CoefficientVerdict(False, k.N + 1)
    return CoefficientVerdict(True, None)
