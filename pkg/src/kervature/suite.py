"""Batch verification: a JSON config names kernels and checks, each with an expected outcome."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import curvature as cv
from . import diagonal
from . import psd
from . import tensor_modules as tm
from . import verifiers as vf
from .errors import KervatureError, SpecError
from .kernels import DiagonalSeriesKernel, KernelExpr, OneMinusKernel, tensor_product
from .serialization import decode_complex, dumps, kernel_from_spec, to_jsonable

EXPECTATIONS = ("pass", "fail", "report-only", "error")
FORMATS = ("json", "csv", "both")


# ---------------------------------------------------------------------------
# seeded random kernels


def random_diagonal_kernel(rng: np.random.Generator, max_degree: int = 30) -> DiagonalSeriesKernel:
    """A polynomial diagonal kernel with nonnegative coefficients and ``a_0 > 0``.

    About a quarter of the coefficients above degree 0 are zero; the rest are
    uniform on ``(0, 1]`` times a geometric decay with a random rate.
    """
    n = int(rng.integers(1, max_degree + 1))
    decay = rng.uniform(0.3, 1.0)
    c = (1.0 - rng.random(n + 1)) * decay ** np.arange(n + 1)
    c[1:] *= rng.random(n) >= 0.25
    return DiagonalSeriesKernel(tuple(float(x) for x in c))


def add_series(k1: DiagonalSeriesKernel, k2: DiagonalSeriesKernel) -> DiagonalSeriesKernel:
    n = max(k1.N, k2.N)
    return DiagonalSeriesKernel(tuple(k1.coefficient_array(n) + k2.coefficient_array(n)))


def random_polynomial(rng: np.random.Generator, degree: int) -> np.ndarray:
    return rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)


# ---------------------------------------------------------------------------
# checks


def _kernel(ctx: dict, params: dict, key: str = "kernel") -> KernelExpr:
    ref = params.get(key)
    if ref is None:
        raise SpecError(f"check needs a {key!r}")
    if isinstance(ref, dict):
        return kernel_from_spec(ref)
    if ref not in ctx:
        raise SpecError(f"unknown kernel reference {ref!r}")
    return ctx[ref]


def _sample(params: dict, k: KernelExpr):
    spec = params.get("sample")
    return None if spec is None else psd.SampleSet.from_spec(spec, k.domain)


def _report(rep: vf.InequalityReport) -> dict:
    return rep.to_dict()


def _verdict(name: str, ok: bool, **details) -> dict:
    return {"name": name, "verdict": bool(ok), "status": "pass" if ok else "fail", **details}


def check_inequality(fn):
    def run(ctx, params):
        k = _kernel(ctx, params)
        kwargs = {"tol": float(params["tol"])} if "tol" in params else {}
        return _report(fn(k, _sample(params, k), **kwargs))

    return run


def check_monotonicity(ctx, params):
    k1 = _kernel(ctx, params)
    k2 = _kernel(ctx, params, "kernel2")
    return _report(vf.verify_monotonicity(k1, k2, _sample(params, k1)))


def check_derivative_bound(ctx, params):
    """``||f'||_G <= ||1|| ||f||_K`` for given or seeded random polynomials, and equality at ``f = z``."""
    k = _kernel(ctx, params)
    polys = []
    if "f" in params:
        polys.append(np.array([decode_complex(c) for c in params["f"]]))
    rng = np.random.default_rng(int(params.get("seed", 0)))
    for _ in range(int(params.get("count", 0))):
        polys.append(random_polynomial(rng, int(params.get("degree", 10))))
    reports = [vf.verify_derivative_bound(k, f) for f in polys]
    ok = all(r.verdict for r in reports)
    details = {"count": len(reports), "min_margin": min((r.margins[0] for r in reports), default=None)}
    if params.get("equality_at_z", False):
        fk, dfg, one = vf.derivative_norms(k, [0.0, 1.0])
        gap = abs(dfg - one * fk)
        details["equality_gap"] = gap
        ok = ok and gap <= float(params.get("equality_tol", 1e-12))
    return _verdict("derivative-bound", ok, **details)


def check_coefficient_nnd(ctx, params):
    """Exact coefficient criterion for ``K``, ``(1 - q) K`` or the Gaussian-curvature series of either."""
    k = _kernel(ctx, params)
    transform = params.get("transform", "none")
    n = int(params.get("n", 40))
    if transform == "none":
        series = diagonal.as_series(k, n)
    elif transform == "one-minus-q":
        series = vf.exact_one_minus_q(k)
        if series is None:
            raise SpecError("no exact series of (1 - q) K for this kernel")
    else:
        raise SpecError(f"unknown transform {transform!r}")
    v = psd.coefficient_nnd(series)
    return _verdict("coefficient-nnd", v.is_nnd, transform=transform, first_negative=v.first_negative,
                    coefficients=list(series.coeffs[:12]))


def check_gaussian_coefficients(ctx, params):
    """Gaussian-curvature series of ``K`` (or ``(1 - q) K``) equals ``expected`` exactly; reports its NND verdict."""
    k = _kernel(ctx, params)
    if params.get("transform") == "one-minus-q":
        k = vf.exact_one_minus_q(k)
    expected = [float(x) for x in params["expected"]]
    n = len(expected) + int(params.get("extra", 4)) - 1
    got = diagonal.series_gaussian_coeffs(k, n).coeffs
    target = expected + [0.0] * (n + 1 - len(expected))
    equal = all(g == t for g, t in zip(got, target))
    nnd = psd.coefficient_nnd(DiagonalSeriesKernel(tuple(got)))
    ok = equal and (nnd.is_nnd == bool(params.get("expect_nnd", nnd.is_nnd)))
    return _verdict("gaussian-coefficients", ok, coefficients=list(got), exact_match=equal,
                    nnd=nnd.is_nnd, first_negative=nnd.first_negative)


def check_gram_nnd(ctx, params):
    """Finite-sample NND of the kernel itself or of a derived kernel (``quantity``)."""
    k = _kernel(ctx, params)
    quantity = params.get("quantity", "kernel")
    if quantity == "kernel":
        kern = k
    elif quantity == "one-minus-q":
        kern = OneMinusKernel(k)
    elif quantity == "gaussian":
        kern = cv.gaussian_curvature_kernel(k)
    elif quantity == "kab":
        kern = cv.kab_kernel(k, float(params["alpha"]), float(params["beta"]))
    else:
        raise SpecError(f"unknown quantity {quantity!r}")
    pts = _sample(params, k) or psd.default_grid(k.domain)
    ev = vf.gram_evidence(kern, pts, float(params.get("tol", vf.NND_TOL)))
    return _verdict("gram-nnd", ev.ok, quantity=quantity, min_eigenvalue=ev.verdict.min_eigenvalue,
                    witness=ev.witness(), **ev.summary())


def check_random_gaussian_nnd(ctx, params):
    """Seeded random nonnegative diagonal kernels: the Gaussian-curvature kernel passes on random 8-point sets."""
    rng = np.random.default_rng(int(params.get("seed", 0)))
    count = int(params.get("count", 50))
    worst = math.inf
    failures = []
    for c in range(count):
        k = random_diagonal_kernel(rng, int(params.get("max_degree", 30)))
        pts = psd.SampleSet.random(int(rng.integers(2**31)), int(params.get("points", 8)),
                                   float(params.get("max_radius", 0.95)))
        v = psd.check_nnd(cv.gaussian_curvature_kernel(k), pts)
        worst = min(worst, v.min_eigenvalue / max(1.0, v.max_eigenvalue))
        if not v.is_nnd:
            failures.append(c)
    return _verdict("random-gaussian-nnd", not failures, count=count, failures=failures,
                    worst_normalized_min_eigenvalue=worst)


def check_random_monotonicity(ctx, params):
    """Seeded pairs ``K2``, ``K1 = K2 + D``: order hypothesis and Gaussian-curvature order both pass."""
    rng = np.random.default_rng(int(params.get("seed", 0)))
    count = int(params.get("count", 25))
    failures = []
    for c in range(count):
        k2 = random_diagonal_kernel(rng, int(params.get("max_degree", 30)))
        k1 = add_series(k2, random_diagonal_kernel(rng, int(params.get("max_degree", 30))))
        pts = psd.SampleSet.random(int(rng.integers(2**31)), int(params.get("points", 8)),
                                   float(params.get("max_radius", 0.95)))
        rep = vf.verify_monotonicity(k1, k2, pts)
        if rep.status != "pass":
            failures.append({"pair": c, "status": rep.status})
    return _verdict("random-monotonicity", not failures, count=count, failures=failures)


def check_derivative_domination_series(ctx, params):
    """``c G_K - d dbar K`` against an expected series (coefficientwise, relative tolerance)."""
    k = _kernel(ctx, params)
    n = int(params.get("n", 30))
    c = vf.norm_of_one_squared(k)
    g = np.asarray(diagonal.series_gaussian_coeffs(k, n).coeffs)
    diff = c * g - np.asarray(diagonal.series_mixed_derivative(k, n).coeffs)
    oracle = params.get("expected", "q2-over-one-minus-q-4")
    if oracle != "q2-over-one-minus-q-4":
        raise SpecError(f"unknown expected series {oracle!r}")
    # q^2 (1 - q)^-4 = sum binom(j + 1, 3) q^j
    j = np.arange(n + 1)
    target = (j + 1) * j * (j - 1) / 6.0
    rel = float(np.max(np.abs(diff - target) / np.maximum(1.0, np.abs(target))))
    ok = rel <= float(params.get("rel_tol", 1e-10))
    return _verdict("derivative-domination-series", ok, max_relative_error=rel, c=c)


def check_hardy_s0(ctx, params):
    """``K (x) K - K_A0`` against the closed form of the Hardy-bidisc ``S0`` kernel."""
    from .kernels import szego

    N = int(params.get("N", 40))
    space = tm.build_truncated_space(szego(), 1.0, 1.0, N)
    pts = [(decode_complex(a), decode_complex(b)) for a, b in params["points"]]
    errs = []
    for z1, z2 in pts:
        value = tm.tensor_diagonal_value(space, (z1, z2)) - tm.a0_diagonal_value(space, (z1, z2))
        errs.append(abs(value - tm.hardy_s0_closed_form(z1, z2)))
    err = max(errs)
    return _verdict("hardy-s0", err < float(params.get("tol", 1e-6)), max_abs_error=err, errors=errs,
                    truncation_N=N, gram_condition=space.condition)


def check_limit(ctx, params):
    """Approach-to-diagonal limit against ``alpha beta/(alpha + beta) K^(alpha+beta) d dbar log K``."""
    k = _kernel(ctx, params)
    N = int(params.get("N", 40))
    tol = float(params.get("tol", 1e-3))
    combos = params.get("pairs", [[params.get("alpha", 1.0), params.get("beta", 1.0)]])
    zs = [decode_complex(z) for z in params.get("points", [params.get("z", 0.0)])]
    estimates = []
    ok = True
    for a, b in combos:
        space = tm.build_truncated_space(k, float(a), float(b), N)
        for z in zs:
            est = tm.limit_ratio(space, z)
            estimates.append(est.to_dict())
            ok = ok and est.abs_error < tol
            if "expected" in params:
                ok = ok and abs(est.extrapolated - float(params["expected"])) <= float(params.get("expected_tol", tol))
    return _verdict("limit", ok, estimates=estimates, tol=tol)


def check_r1_isometry(ctx, params):
    k = _kernel(ctx, params)
    space = tm.build_truncated_space(k, float(params.get("alpha", 1.0)), float(params.get("beta", 1.0)),
                                     int(params.get("N", 30)))
    els = tm.random_s1_elements(space, int(params.get("count", 10)), int(params.get("seed", 0)))
    rep = tm.verify_r1_isometry(space, els)
    return _verdict("r1-isometry", rep.max_mismatch < float(params.get("tol", 1e-6)),
                    max_mismatch=rep.max_mismatch, mismatches=list(rep.mismatches))


def check_curvature_via_limit(ctx, params):
    k = _kernel(ctx, params)
    tol = float(params.get("tol", 1e-3))
    space = tm.build_truncated_space(k, 1.0, 1.0, int(params.get("N", 40)))
    rows = []
    for z in params.get("points", [0.0]):
        r = tm.curvature_via_limit(space, decode_complex(z), tol)
        rows.append({"z": decode_complex(z), "value": r["value"], "direct": r["direct"],
                     "abs_error": r["abs_error"], "curvature": r["curvature"]})
    ok = all(r["abs_error"] <= tol for r in rows)
    return _verdict("curvature-via-limit", ok, points=rows, tol=tol)


def check_trace_identity(ctx, params):
    k = _kernel(ctx, params)
    if params.get("tensor_square", False):
        k = tensor_product(k, k)
    pts = _sample(params, k) or psd.SampleSet.random(int(params.get("seed", 0)), int(params.get("count", 4)),
                                                     float(params.get("max_radius", 0.6)), k.domain)
    rep = cv.bundle_curvature_trace_check(k, float(params.get("alpha", 1.0)), float(params.get("beta", 1.0)), pts)
    tol = float(params.get("tol", 1e-5))
    return _verdict("trace-identity", rep.residual < tol, m=rep.m, residual=rep.residual,
                    literal_residual=rep.literal_residual, tol=tol)


def check_local_operator(ctx, params):
    k = _kernel(ctx, params)
    rows = []
    ok = True
    for w in params.get("points", [0.0]):
        op = cv.local_operator(k, decode_complex(w))
        rows.append({"w": op.at, "entry": op.entry, "contractive": op.contractive, "degenerate": op.degenerate})
        ok = ok and op.contractive
    return _verdict("local-operator", ok, points=rows)


CHECKS = {
    "curvature-inequality": check_inequality(vf.verify_curvature_inequality),
    "strong-curvature-inequality": check_inequality(vf.verify_strong_inequality),
    "contractivity": check_inequality(vf.verify_contractivity),
    "row-contractivity": check_inequality(vf.verify_row_contraction),
    "row-curvature-inequality": check_inequality(vf.verify_row_inequality),
    "gaussian-monotonicity": check_monotonicity,
    "normalized-row-monotonicity": check_inequality(vf.verify_normalized_row_monotonicity),
    "derivative-domination": check_inequality(vf.verify_derivative_domination),
    "derivative-domination-series": check_derivative_domination_series,
    "derivative-bound": check_derivative_bound,
    "coefficient-nnd": check_coefficient_nnd,
    "gaussian-coefficients": check_gaussian_coefficients,
    "gram-nnd": check_gram_nnd,
    "random-gaussian-nnd": check_random_gaussian_nnd,
    "random-monotonicity": check_random_monotonicity,
    "hardy-s0": check_hardy_s0,
    "limit": check_limit,
    "r1-isometry": check_r1_isometry,
    "curvature-via-limit": check_curvature_via_limit,
    "trace-identity": check_trace_identity,
    "local-operator": check_local_operator,
}


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class CheckSpec:
    id: str
    name: str
    params: dict
    expect: str


@dataclass(frozen=True)
class SuiteConfig:
    kernels: dict
    checks: tuple
    output: str = "kervature-reports"
    format: str = "json"
    workers: int | None = None
    name: str = "suite"
    kernel_specs: dict = field(default_factory=dict)


def load_config(obj, name: str = "suite") -> SuiteConfig:
    if not isinstance(obj, dict):
        raise SpecError("suite config must be a JSON object")
    raw_kernels = obj.get("kernels", {})
    if isinstance(raw_kernels, list):
        raw_kernels = {k["name"]: k["spec"] for k in raw_kernels}
    kernels = {ref: kernel_from_spec(spec) for ref, spec in raw_kernels.items()}
    checks = []
    seen = set()
    for n, c in enumerate(obj.get("checks", [])):
        cname = c.get("name")
        if cname not in CHECKS:
            raise SpecError(f"unknown check {cname!r}")
        expect = c.get("expect", "report-only")
        if expect not in EXPECTATIONS:
            raise SpecError(f"check {n}: expect must be one of {EXPECTATIONS}")
        params = dict(c.get("params", {}))
        for key in ("kernel", "kernel2"):
            if key in c:
                params[key] = c[key]
        for key in ("kernel", "kernel2"):
            ref = params.get(key)
            if isinstance(ref, str) and ref not in kernels:
                raise SpecError(f"check {n}: unknown kernel reference {ref!r}")
        for key, val in params.items():
            if key.endswith("tol") and not float(val) > 0:
                raise SpecError(f"check {n}: tolerance {key} must be positive")
        cid = c.get("id") or f"{n:03d}-{cname}" + (f"-{params['kernel']}" if isinstance(params.get("kernel"), str) else "")
        if cid in seen:
            raise SpecError(f"duplicate check id {cid!r}")
        seen.add(cid)
        checks.append(CheckSpec(cid, cname, params, expect))
    fmt = obj.get("format", "json")
    if fmt not in FORMATS:
        raise SpecError(f"format must be one of {FORMATS}")
    workers = obj.get("workers")
    return SuiteConfig(kernels, tuple(checks), obj.get("output", "kervature-reports"), fmt,
                       None if workers is None else int(workers), obj.get("name", name), raw_kernels)


def builtin_config(name: str) -> dict:
    fname = name.replace("-", "_") + ".json"
    try:
        text = resources.files("kervature").joinpath("data", fname).read_text()
    except FileNotFoundError:
        raise SpecError(f"no built-in suite named {name!r}") from None
    return json.loads(text)


def read_config(path_or_name: str) -> SuiteConfig:
    p = Path(path_or_name)
    if p.is_file():
        return load_config(json.loads(p.read_text()), p.stem)
    return load_config(builtin_config(path_or_name), path_or_name)


# ---------------------------------------------------------------------------
# running


def run_check(cfg: SuiteConfig, check: CheckSpec) -> dict:
    try:
        result = CHECKS[check.name](cfg.kernels, check.params)
        outcome = result["status"]
    except (KervatureError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        result = {"name": check.name, "verdict": False, "status": "error",
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        outcome = "error"
    matched = check.expect == "report-only" or check.expect == outcome
    return to_jsonable({
        "id": check.id,
        "check": check.name,
        "kernel": check.params.get("kernel") if isinstance(check.params.get("kernel"), str) else None,
        "expect": check.expect,
        "outcome": outcome,
        "matched": matched,
        "report": result,
    })


def worker_count(cfg: SuiteConfig) -> int:
    env = os.environ.get("KERVATURE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SpecError(f"KERVATURE_WORKERS must be an integer, got {env!r}") from None
    if cfg.workers:
        return max(1, cfg.workers)
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class SuiteResult:
    results: list
    files: list

    @property
    def all_matched(self) -> bool:
        return all(r["matched"] for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_matched else 1


def summary_csv(results: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "check", "kernel", "expect", "outcome", "matched"])
    for r in results:
        w.writerow([r["id"], r["check"], r["kernel"] or "", r["expect"], r["outcome"], r["matched"]])
    return buf.getvalue()


def run_suite(cfg: SuiteConfig, output: str | None = None, fmt: str | None = None) -> SuiteResult:
    """Run every check; write one report file per check plus a summary (nothing when there are no checks)."""
    fmt = fmt or cfg.format
    out_dir = Path(output or cfg.output)
    with ThreadPoolExecutor(max_workers=worker_count(cfg)) as pool:
        results = list(pool.map(lambda c: run_check(cfg, c), cfg.checks))
    files = []
    if results:
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt in ("json", "both"):
            for r in results:
                path = out_dir / f"{r['id']}.json"
                path.write_text(dumps(r))
                files.append(path)
            summary = {"suite": cfg.name, "all_matched": all(r["matched"] for r in results),
                       "checks": [{k: r[k] for k in ("id", "check", "expect", "outcome", "matched")} for r in results]}
            path = out_dir / "summary.json"
            path.write_text(dumps(summary))
            files.append(path)
        if fmt in ("csv", "both"):
            path = out_dir / "summary.csv"
            path.write_text(summary_csv(results))
            files.append(path)
    return SuiteResult(results, files)
