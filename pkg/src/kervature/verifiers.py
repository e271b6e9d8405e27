"""Pass/fail verdicts, with evidence, for curvature and kernel-order inequalities.

Each verifier returns an :class:`InequalityReport`.  Gram-type checks split
the sample into strided chunks of at most ``GRAM_CAP`` points (to bound the
conditioning of each eigenproblem) and report the worst chunk; a failing
chunk yields its points and the eigenvector of the most negative eigenvalue
as a reproducible counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diagonal
from .config import GRAM_CAP, MARGIN_TOL, NND_TOL
from .curvature import (
    MatrixKernel,
    curvature,
    derivative_kernel,
    gaussian_curvature_kernel,
)
from .errors import DegenerateError, KervatureError, UndeterminedSignError, UnsupportedError
from .kernels import (
    DiagonalSeriesKernel,
    KernelExpr,
    OneMinusKernel,
    SzegoPower,
    drury_arveson,
)
from .psd import GramVerdict, SampleSet, check_nnd, coefficient_nnd, default_grid


@dataclass(frozen=True, eq=False)
class InequalityReport:
    """Outcome of one inequality check.

    ``status`` is ``pass``, ``fail``, ``hypothesis-failed`` or ``error``;
    ``verdict`` is True only for ``pass``.
    """

    name: str
    verdict: bool
    status: str
    min_eigenvalue: float | None = None
    tolerance: float | None = None
    sample: SampleSet | None = None
    witness: dict | None = None
    margins: list | None = None
    evidence: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        from .serialization import to_jsonable

        return to_jsonable({
            "name": self.name,
            "verdict": self.verdict,
            "status": self.status,
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "sample": None if self.sample is None else self.sample.to_spec(),
            "witness": self.witness,
            "margins": self.margins,
            "evidence": self.evidence,
            "message": self.message,
        })


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _chunks(p: int, cap: int = GRAM_CAP) -> list:
    k = max(1, math.ceil(p / cap))
    return [list(range(c, p, k)) for c in range(k)]


@dataclass(frozen=True, eq=False)
class _GramEvidence:
    verdict: GramVerdict
    chunk: SampleSet
    chunks: int

    @property
    def ok(self) -> bool:
        return self.verdict.is_nnd

    def witness(self) -> dict | None:
        if self.verdict.witness is None:
            return None
        from .serialization import encode_point

        return {
            "points": [encode_point(p) for p in self.chunk.points],
            "vector": self.verdict.witness,
        }

    def summary(self) -> dict:
        v = self.verdict
        return {"max_eigenvalue": v.max_eigenvalue, "chunks": self.chunks, "chunk_size": v.size}


def gram_evidence(kernel, pts: SampleSet, tol: float = NND_TOL) -> _GramEvidence:
    """Worst chunk (smallest normalized minimum eigenvalue) of a chunked NND check."""
    worst = None
    parts = _chunks(len(pts))
    for idx in parts:
        sub = pts.subset(idx)
        v = check_nnd(kernel, sub, tol)
        score = v.min_eigenvalue / max(1.0, v.max_eigenvalue)
        if worst is None or score < worst[0]:
            worst = (score, v, sub)
    return _GramEvidence(worst[1], worst[2], len(parts))


def _gram_report(name: str, kernel, pts: SampleSet, tol: float, **extra) -> InequalityReport:
    ev = gram_evidence(kernel, pts, tol)
    evidence = ev.summary()
    evidence.update(extra.pop("evidence", {}))
    return InequalityReport(
        name, ev.ok, _status(ev.ok), ev.verdict.min_eigenvalue, tol, pts,
        ev.witness(), None, evidence, **extra,
    )


def _require_disc(expr: KernelExpr, what: str):
    if expr.m != 1:
        raise UnsupportedError(f"{what} is stated for kernels on the disc")


def _points(expr: KernelExpr, pts):
    return default_grid(expr.domain) if pts is None else pts


# ---------------------------------------------------------------------------
# pointwise curvature inequality


def verify_curvature_inequality(expr: KernelExpr, pts: SampleSet | None = None,
                                tol: float = MARGIN_TOL) -> InequalityReport:
    """Curvature of ``K`` at most the Szego curvature ``-1/(1 - |z|^2)^2`` at every sample point.

    Margins are ``curvature - bound``; a point passes when its margin is at
    most ``tol * max(1, |bound|)``.
    """
    _require_disc(expr, "the curvature inequality")
    pts = _points(expr, pts)
    margins, worst, worst_pt = [], -math.inf, None
    for z in pts:
        bound = -1.0 / (1.0 - abs(z[0]) ** 2) ** 2
        try:
            c = curvature(expr, z)
        except KervatureError as exc:
            raise DegenerateError(f"curvature undefined at {z.tolist()}: {exc}") from exc
        margin = c - bound
        margins.append(margin)
        scaled = margin / max(1.0, abs(bound))
        if scaled > worst:
            worst, worst_pt = scaled, z
    ok = worst <= tol
    witness = None
    if not ok:
        from .serialization import encode_point

        witness = {"points": [encode_point(worst_pt)]}
    return InequalityReport(
        "curvature-inequality", ok, _status(ok), None, tol, pts, witness, margins,
        {"worst_scaled_margin": worst},
    )


# ---------------------------------------------------------------------------
# Gram-type inequalities


def strong_difference_kernel(expr: KernelExpr) -> MatrixKernel:
    """``(1 - z conj w)^2 G_K(z, w) - K(z, w)^2``; it equals the Gaussian-curvature kernel of ``(1 - z conj w) K``."""
    _require_disc(expr, "the strong curvature inequality")

    def evaluate(z, w):
        j = expr._jet(z, w, 1)
        q = complex(z[0] * np.conj(w[0]))
        return (1.0 - q) ** 2 * j.gaussian() - j.value ** 2

    return MatrixKernel(1, "difference", evaluate, expr.domain)


def verify_strong_inequality(expr: KernelExpr, pts: SampleSet | None = None,
                             tol: float = NND_TOL) -> InequalityReport:
    return _gram_report("strong-curvature-inequality", strong_difference_kernel(expr), _points(expr, pts), tol)


def exact_one_minus_q(expr: KernelExpr) -> DiagonalSeriesKernel | None:
    """Exact diagonal series of ``(1 - q) K`` when the coefficients of ``K`` are fully known."""
    if isinstance(expr, SzegoPower) and expr.m == 1:
        if expr.alpha == 1.0:
            return DiagonalSeriesKernel((1.0,))
        if expr.alpha > 1.0:
            return diagonal.as_series(SzegoPower(expr.alpha - 1.0), 60)
        # (1 - q)^(1 - alpha) with 0 < alpha < 1: every coefficient after the first is negative
        return DiagonalSeriesKernel((1.0, expr.alpha - 1.0))
    if not expr.is_radial or expr.m != 1:
        return None
    try:
        k = diagonal.as_series(expr)
    except KervatureError:
        return None
    if k.tail is None or k.tail.kind == "constant":
        a = list(k.coeffs)
        out = [a[0]] + [a[n] - a[n - 1] for n in range(1, len(a))]
        out.append((k.tail.value if k.tail is not None else 0.0) - a[-1])
        return DiagonalSeriesKernel(tuple(out))
    return None


def verify_contractivity(expr: KernelExpr, pts: SampleSet | None = None,
                         tol: float = NND_TOL) -> InequalityReport:
    """``(1 - z conj w) K`` NND, with the exact coefficient criterion when the series is known."""
    _require_disc(expr, "contractivity of multiplication by z")
    pts = _points(expr, pts)
    ev = gram_evidence(OneMinusKernel(expr), pts, tol)
    evidence = ev.summary()
    exact = None
    series = exact_one_minus_q(expr)
    if series is not None:
        try:
            cv = coefficient_nnd(series)
            exact = cv.is_nnd
            evidence["exact_verdict"] = cv.is_nnd
            evidence["first_negative_coefficient"] = cv.first_negative
            evidence["coefficients"] = list(series.coeffs[:12])
        except UndeterminedSignError:
            evidence["exact_verdict"] = None
    ok = ev.ok and exact is not False
    if exact is not None:
        evidence["consistent"] = exact == ev.ok
    return InequalityReport(
        "contractivity", ok, _status(ok), ev.verdict.min_eigenvalue, tol, pts,
        ev.witness(), None, evidence,
    )


def verify_row_contraction(expr: KernelExpr, pts: SampleSet | None = None,
                           tol: float = NND_TOL) -> InequalityReport:
    """``B_m^-1 K = (1 - <z, w>) K`` NND on the ball."""
    if len(expr.domain.factors) != 1:
        raise UnsupportedError("row contractivity is defined on the ball")
    return _gram_report("row-contractivity", OneMinusKernel(expr), _points(expr, pts), tol)


def row_difference_kernel(expr: KernelExpr) -> MatrixKernel:
    """``B^-2 G_K - K^2 B^-2 (d_i dbar_j log B)`` with ``B`` the Drury-Arveson kernel."""
    if len(expr.domain.factors) != 1:
        raise UnsupportedError("the row inequality is defined on the ball")
    m = expr.m
    b = drury_arveson(m)

    def evaluate(z, w):
        j = expr._jet(z, w, 1)
        jb = b._jet(z, w, 1)
        s = complex(np.vdot(w, z))
        return (1.0 - s) ** 2 * (j.gaussian() - j.value ** 2 * jb.gaussian() / jb.value ** 2)

    return MatrixKernel(m, "difference", evaluate, expr.domain)


def verify_row_inequality(expr: KernelExpr, pts: SampleSet | None = None,
                          tol: float = NND_TOL) -> InequalityReport:
    return _gram_report("row-curvature-inequality", row_difference_kernel(expr), _points(expr, pts), tol)


def verify_monotonicity(k1: KernelExpr, k2: KernelExpr, pts: SampleSet | None = None,
                        tol: float = NND_TOL) -> InequalityReport:
    """``K1 >= K2`` (hypothesis, checked first) implies ``G_K1 >= G_K2``."""
    pts = _points(k1, pts)
    hyp = gram_evidence(_difference(k1, k2), pts, tol)
    if not hyp.ok:
        return InequalityReport(
            "gaussian-monotonicity", False, "hypothesis-failed", hyp.verdict.min_eigenvalue, tol, pts,
            hyp.witness(), None, {"hypothesis": hyp.summary()},
            "K1 - K2 is not NND on the sample; no conclusion drawn",
        )
    diff = gaussian_curvature_kernel(k1) - gaussian_curvature_kernel(k2)
    return _gram_report(
        "gaussian-monotonicity", diff, pts, tol,
        evidence={"hypothesis_min_eigenvalue": hyp.verdict.min_eigenvalue},
    )


def _difference(k1: KernelExpr, k2: KernelExpr) -> MatrixKernel:
    if k1.domain != k2.domain:
        raise UnsupportedError("kernels live on different domains")
    return MatrixKernel(1, "difference", lambda z, w: np.array([[k1._value(z, w) - k2._value(z, w)]]), k1.domain)


def verify_normalized_row_monotonicity(expr: KernelExpr, pts: SampleSet | None = None,
                                       tol: float = NND_TOL) -> InequalityReport:
    """For ``K`` normalized at 0 with ``B_m^-1 K`` NND: ``G_K >= G_{B_m}``.

    Both hypotheses are checked before the conclusion.
    """
    pts = _points(expr, pts)
    m = expr.m
    zero = np.zeros(m, dtype=complex)
    drift = max(abs(expr._value(z, zero) - 1.0) for z in pts)
    row = gram_evidence(OneMinusKernel(expr), pts, tol)
    if drift > 1e-10 or not row.ok:
        reason = "K(., 0) is not identically 1" if drift > 1e-10 else "B_m^-1 K is not NND on the sample"
        return InequalityReport(
            "normalized-row-monotonicity", False, "hypothesis-failed", row.verdict.min_eigenvalue, tol, pts,
            row.witness(), None, {"normalization_drift": drift}, reason,
        )
    diff = gaussian_curvature_kernel(expr) - gaussian_curvature_kernel(drury_arveson(m))
    return _gram_report("normalized-row-monotonicity", diff, pts, tol)


def norm_of_one_squared(expr: KernelExpr) -> float:
    """``||1||^2`` in a diagonal space: ``1/a_0``."""
    a0 = float(diagonal.coefficients(expr, 0)[0])
    if not a0 > 0:
        raise DegenerateError("constant not in space: a_0 = 0")
    return 1.0 / a0


def verify_derivative_domination(expr: KernelExpr, pts: SampleSet | None = None,
                                 tol: float = NND_TOL) -> InequalityReport:
    """``c G_K - (d_i dbar_j K)`` NND with ``c = ||1||^2 = 1/a_0``."""
    c = norm_of_one_squared(expr)
    diff = gaussian_curvature_kernel(expr).scaled(c) - derivative_kernel(expr)
    return _gram_report("derivative-domination", diff, _points(expr, pts), tol, evidence={"c": c})


def derivative_norms(expr: KernelExpr, f) -> tuple:
    """``(||f||_K, ||f'||_G, ||1||_K)`` for a polynomial ``f`` and a diagonal kernel ``K``."""
    _require_disc(expr, "the derivative bound")
    f = np.trim_zeros(np.asarray(f, dtype=complex), "b")
    deg = max(len(f) - 1, 0)
    a = diagonal.coefficients(expr, deg + 1)
    g = diagonal.series_gaussian_coeffs(expr, max(deg - 1, 0)).coeffs
    if not a[0] > 0:
        raise DegenerateError("constant not in space: a_0 = 0")
    f_sq = 0.0
    df_sq = 0.0
    for n, fn in enumerate(f):
        if fn == 0:
            continue
        if not a[n] > 0:
            raise DegenerateError(f"coefficient a_{n} = {a[n]} is not positive")
        f_sq += abs(fn) ** 2 / a[n]
        if n >= 1:
            if not g[n - 1] > 0:
                raise DegenerateError(f"Gaussian coefficient g_{n - 1} = {g[n - 1]} is not positive")
            df_sq += n * n * abs(fn) ** 2 / g[n - 1]
    return math.sqrt(f_sq), math.sqrt(df_sq), 1.0 / math.sqrt(a[0])


def verify_derivative_bound(expr: KernelExpr, f, rel_tol: float = 1e-12) -> InequalityReport:
    """``||f'||_G <= ||1||_K ||f||_K`` for a polynomial ``f`` (ascending coefficients)."""
    fk, dfg, one = derivative_norms(expr, f)
    bound = one * fk
    ok = dfg <= bound * (1 + rel_tol)
    return InequalityReport(
        "derivative-bound", ok, _status(ok), None, rel_tol, None, None,
        [bound - dfg], {"norm_f": fk, "norm_df": dfg, "norm_one": one, "bound": bound},
    )


REPORT_NAMES = (
    "curvature-inequality",
    "strong-curvature-inequality",
    "contractivity",
    "row-contractivity",
    "row-curvature-inequality",
    "gaussian-monotonicity",
    "normalized-row-monotonicity",
    "derivative-domination",
    "derivative-bound",
)
