"""Command-line front end.

    kervature kernel eval --kernel SPEC --z POINT --w POINT [--order N]
    kervature psd check --kernel SPEC [--sample SPEC] [--quantity Q] [--tol T]
    kervature curvature grid --kernel SPEC [--quantity Q] [--radii R,...] [--angles N]
    kervature verify NAME --kernel SPEC [--kernel2 SPEC] [--sample SPEC] [--f COEFFS]
    kervature decompose limit --kernel SPEC --alpha A --beta B --z POINT [--N N]
    kervature suite run --config FILE|paper-suite [--output DIR] [--format F]

SPEC arguments accept JSON text, ``@path`` or a path to a JSON file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import curvature as cv
from . import psd
from . import suite as st
from . import tensor_modules as tm
from . import verifiers as vf
from .errors import KervatureError, SpecError
from .kernels import OneMinusKernel
from .serialization import decode_complex, decode_point, dumps, encode_complex, kernel_from_spec, to_jsonable


def _load_json(arg: str):
    text = arg
    if arg.startswith("@"):
        text = Path(arg[1:]).read_text()
    elif not arg.lstrip().startswith(("{", "[")) and os.path.isfile(arg):
        text = Path(arg).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON argument: {exc}") from exc


def _kernel_arg(arg: str):
    return kernel_from_spec(_load_json(arg))


def _point_arg(arg: str) -> np.ndarray:
    """A point as JSON (see the serialization formats) or comma-separated complex literals."""
    s = arg.strip()
    if s.startswith(("[", "{", '"')):
        return decode_point(json.loads(s))
    try:
        return np.array([complex(p.replace(" ", "")) for p in s.split(",")])
    except ValueError:
        raise SpecError(f"cannot parse point {arg!r}") from None


def _floats(arg: str) -> list:
    return [float(x) for x in arg.split(",") if x.strip()]


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _sample_arg(args, kernel) -> psd.SampleSet:
    if getattr(args, "sample", None):
        return psd.SampleSet.from_spec(_load_json(args.sample), kernel.domain)
    return psd.default_grid(kernel.domain)


# ---------------------------------------------------------------------------
# commands


def cmd_kernel_eval(args) -> int:
    k = _kernel_arg(args.kernel)
    z, w = _point_arg(args.z), _point_arg(args.w)
    out = {"kernel": k.to_spec(), "z": [encode_complex(c) for c in z], "w": [encode_complex(c) for c in w],
           "value": encode_complex(k(z, w))}
    if args.order is not None:
        jet = k.jet(z, w, args.order)
        out["order"] = args.order
        out["jet"] = [
            {"a": list(a), "b": list(b), "value": encode_complex(v)}
            for (a, b), v in sorted(jet.entries(args.order).items())
        ]
    _emit(dumps(to_jsonable(out)), args.output)
    return 0


def cmd_psd_check(args) -> int:
    k = _kernel_arg(args.kernel)
    pts = _sample_arg(args, k)
    kern = {
        "kernel": lambda: k,
        "one-minus-q": lambda: OneMinusKernel(k),
        "gaussian": lambda: cv.gaussian_curvature_kernel(k),
        "kab": lambda: cv.kab_kernel(k, args.alpha, args.beta),
    }[args.quantity]()
    v = psd.check_nnd(kern, pts, args.tol)
    out = {"quantity": args.quantity, "sample": pts.to_spec(), **v.to_dict()}
    _emit(dumps(to_jsonable(out)), args.output)
    return 0


def cmd_curvature_grid(args) -> int:
    k = _kernel_arg(args.kernel)
    if args.sample:
        pts = list(psd.SampleSet.from_spec(_load_json(args.sample), k.domain))
    else:
        radii = _floats(args.radii)
        thetas = [2 * np.pi * j / args.angles for j in range(args.angles)]
        pts = [np.array([r * np.exp(1j * t)]) for r in radii for t in thetas]
        if k.m != 1:
            raise SpecError("--radii grids are for disc kernels; pass --sample for other domains")
    _emit(cv.emit_grid_csv(k, args.quantity, pts), args.output)
    return 0


VERIFIERS = {
    "curvature-inequality": vf.verify_curvature_inequality,
    "strong-curvature-inequality": vf.verify_strong_inequality,
    "contractivity": vf.verify_contractivity,
    "row-contractivity": vf.verify_row_contraction,
    "row-curvature-inequality": vf.verify_row_inequality,
    "normalized-row-monotonicity": vf.verify_normalized_row_monotonicity,
    "derivative-domination": vf.verify_derivative_domination,
}


def cmd_verify(args) -> int:
    k = _kernel_arg(args.kernel)
    if args.name == "gaussian-monotonicity":
        if not args.kernel2:
            raise SpecError("gaussian-monotonicity needs --kernel2")
        rep = vf.verify_monotonicity(k, _kernel_arg(args.kernel2), _sample_arg(args, k))
    elif args.name == "derivative-bound":
        if not args.f:
            raise SpecError("derivative-bound needs --f")
        rep = vf.verify_derivative_bound(k, [decode_complex(c.strip()) for c in args.f.split(",")])
    else:
        fn = VERIFIERS[args.name]
        kwargs = {"tol": args.tol} if args.tol is not None else {}
        rep = fn(k, _sample_arg(args, k), **kwargs)
    _emit(dumps(rep.to_dict()), args.output)
    return 0 if rep.verdict else 1


def cmd_decompose_limit(args) -> int:
    k = _kernel_arg(args.kernel)
    space = tm.build_truncated_space(k, args.alpha, args.beta, args.N)
    z = _point_arg(args.z)
    if z.size != 1:
        raise SpecError("--z must be a single complex number")
    est = tm.limit_ratio(space, complex(z[0]), t0=args.t0, shrink=args.shrink, steps=args.steps)
    _emit(dumps(est.to_dict()), args.output)
    return 0


def cmd_suite_run(args) -> int:
    try:
        cfg = st.read_config(args.config)
        result = st.run_suite(cfg, args.output, args.format)
    except (OSError, SpecError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in result.results:
        mark = "ok  " if r["matched"] else "FAIL"
        print(f"{mark} {r['id']}: expected {r['expect']}, got {r['outcome']}")
    n_bad = sum(not r["matched"] for r in result.results)
    print(f"{len(result.results) - n_bad}/{len(result.results)} checks matched expectations")
    return result.exit_code


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kervature", description="Curvature and positivity checks for reproducing kernels.")
    sub = p.add_subparsers(dest="group", required=True)

    g = sub.add_parser("kernel", help="evaluate kernels").add_subparsers(dest="cmd", required=True)
    e = g.add_parser("eval", help="K(z, w) and optionally its derivative jet")
    e.add_argument("--kernel", required=True)
    e.add_argument("--z", required=True)
    e.add_argument("--w", required=True)
    e.add_argument("--order", type=int)
    e.add_argument("--output")
    e.set_defaults(func=cmd_kernel_eval)

    g = sub.add_parser("psd", help="finite-sample NND verdicts").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("check")
    c.add_argument("--kernel", required=True)
    c.add_argument("--sample")
    c.add_argument("--quantity", choices=("kernel", "one-minus-q", "gaussian", "kab"), default="kernel")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--beta", type=float, default=1.0)
    c.add_argument("--tol", type=float, default=vf.NND_TOL)
    c.add_argument("--output")
    c.set_defaults(func=cmd_psd_check)

    g = sub.add_parser("curvature", help="curvature fields as CSV").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("grid")
    c.add_argument("--kernel", required=True)
    c.add_argument("--quantity", choices=cv.QUANTITIES, default="curvature")
    c.add_argument("--radii", default="0,0.2,0.4,0.6,0.8")
    c.add_argument("--angles", type=int, default=1)
    c.add_argument("--sample")
    c.add_argument("--output")
    c.set_defaults(func=cmd_curvature_grid)

    c = sub.add_parser("verify", help="run one inequality check")
    c.add_argument("name", choices=sorted(list(VERIFIERS) + ["gaussian-monotonicity", "derivative-bound"]))
    c.add_argument("--kernel", required=True)
    c.add_argument("--kernel2")
    c.add_argument("--sample")
    c.add_argument("--f", help="comma-separated polynomial coefficients, ascending")
    c.add_argument("--tol", type=float)
    c.add_argument("--output")
    c.set_defaults(func=cmd_verify)

    g = sub.add_parser("decompose", help="tensor-product decompositions").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("limit")
    c.add_argument("--kernel", required=True)
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--beta", type=float, default=1.0)
    c.add_argument("--z", default="0")
    c.add_argument("--N", type=int, default=tm.TRUNCATION_N)
    c.add_argument("--t0", type=float, default=tm.LIMIT_T0)
    c.add_argument("--shrink", type=float, default=tm.LIMIT_SHRINK)
    c.add_argument("--steps", type=int, default=tm.LIMIT_STEPS)
    c.add_argument("--output")
    c.set_defaults(func=cmd_decompose_limit)

    g = sub.add_parser("suite", help="batch verification").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("run")
    c.add_argument("--config", required=True, help="config file, or the name of a built-in suite")
    c.add_argument("--output")
    c.add_argument("--format", choices=st.FORMATS)
    c.set_defaults(func=cmd_suite_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KervatureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
