"""JSON encoding of complex numbers, points and kernel specifications.

Floats are written as ``repr`` strings, which round-trip bit-exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import kernels as kx
from .errors import SpecError
from .series import TailRule


def _real(x) -> float:
    if isinstance(x, bool):
        raise SpecError(f"expected a number, got {x!r}")
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise SpecError(f"expected a number, got {x!r}") from None
    if not math.isfinite(v):
        raise SpecError(f"non-finite number {x!r}")
    return v


def encode_real(x: float) -> str:
    return repr(float(x))


def encode_complex(z: complex) -> dict:
    z = complex(z)
    return {"re": repr(z.real), "im": repr(z.imag)}


def decode_complex(obj) -> complex:
    """Accept ``{"re", "im"}``, a ``[re, im]`` pair, a number, or a Python-style complex string."""
    if isinstance(obj, dict):
        return complex(_real(obj.get("re", 0.0)), _real(obj.get("im", 0.0)))
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(_real(obj[0]), _real(obj[1]))
    if isinstance(obj, str):
        try:
            return complex(obj.replace(" ", ""))
        except ValueError:
            raise SpecError(f"cannot parse complex number {obj!r}") from None
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(_real(obj))
    raise SpecError(f"cannot parse complex number {obj!r}")


def encode_point(z) -> list:
    return [encode_complex(c) for c in np.atleast_1d(np.asarray(z, dtype=complex))]


def decode_point(obj) -> np.ndarray:
    """A point is a list of complex coordinates; a bare complex number is a point in C^1."""
    if isinstance(obj, list):
        if len(obj) == 2 and all(isinstance(c, (str, int, float)) for c in obj):
            # a bare pair of scalars is one complex number [re, im]
            return np.array([decode_complex(obj)])
        if not obj:
            raise SpecError("empty point")
        return np.array([decode_complex(c) for c in obj])
    return np.array([decode_complex(obj)])


# ---------------------------------------------------------------------------
# kernel specifications


def _children(spec: dict, count: int | None = None) -> list:
    ch = spec.get("children")
    if not isinstance(ch, list) or not ch:
        raise SpecError(f"{spec.get('type')!r} node needs a non-empty 'children' list")
    if count is not None and len(ch) != count:
        raise SpecError(f"{spec['type']!r} node needs exactly {count} children, got {len(ch)}")
    return [kernel_from_spec(c) for c in ch]


def _positive(spec: dict, key: str) -> float:
    if key not in spec:
        raise SpecError(f"{spec.get('type')!r} node needs {key!r}")
    v = _real(spec[key])
    if not v > 0:
        raise SpecError(f"{key} must be positive, got {v}")
    return v


def _dim(spec: dict, default: int = 1) -> int:
    m = spec.get("m", default)
    if isinstance(m, bool) or not isinstance(m, (int, str)) or int(m) < 1:
        raise SpecError(f"'m' must be a positive integer, got {m!r}")
    return int(m)


def kernel_from_spec(spec) -> kx.KernelExpr:
    """Build a kernel expression from a parsed JSON object."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("kernel spec must be an object with a 'type' field")
    t = spec["type"]
    try:
        if t == "szego":
            return kx.szego(_dim(spec))
        if t == "bergman":
            return kx.bergman()
        if t == "drury-arveson":
            return kx.drury_arveson(_dim(spec, 0) if "m" in spec else _missing("m", t))
        if t == "szego-power":
            return kx.szego_power(_positive(spec, "alpha"), _dim(spec))
        if t == "paper-k0":
            return kx.k0()
        if t == "constant":
            return kx.constant(_positive(spec, "c") if "c" in spec else 1.0, _dim(spec))
        if t == "rational":
            num = [_real(c) for c in spec.get("num", [])]
            den = [_real(c) for c in spec.get("den", [])]
            return kx.RationalKernel(tuple(num), tuple(den), _dim(spec))
        if t == "diagonal-series":
            coeffs = spec.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise SpecError("diagonal-series needs a non-empty 'coeffs' list")
            tail = spec.get("tail")
            rule = TailRule.from_spec(tail) if tail is not None else None
            radius = _positive(spec, "declared_radius") if "declared_radius" in spec else 1.0
            return kx.DiagonalSeriesKernel(tuple(_real(c) for c in coeffs), rule, radius, _dim(spec))
        if t == "sum":
            return kx.SumKernel(tuple(_children(spec)))
        if t == "product":
            return kx.ProductKernel(tuple(_children(spec)))
        if t == "scale":
            return kx.ScaledKernel(_positive(spec, "c"), _children(spec, 1)[0])
        if t == "one-minus-zw":
            return kx.OneMinusKernel(_children(spec, 1)[0])
        if t == "power":
            alpha = _positive(spec, "alpha")
            return kx.power(_children(spec, 1)[0], alpha)
        if t == "tensor":
            left, right = _children(spec, 2)
            return kx.tensor_product(left, right)
        if t == "normalize":
            child = _children(spec, 1)[0]
            w0 = decode_point(spec["w0"]) if "w0" in spec else np.zeros(child.domain.m, dtype=complex)
            return kx.normalize_at(child, w0)
    except SpecError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise SpecError(f"invalid {t!r} node: {exc}") from exc
    raise SpecError(f"unknown kernel type {t!r}")


def _missing(key: str, t: str):
    raise SpecError(f"{t!r} node needs {key!r}")


def parse_kernel_spec(text: str) -> kx.KernelExpr:
    """Parse kernel-spec JSON text."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"kernel spec is not valid JSON: {exc}") from exc
    return kernel_from_spec(obj)


def kernel_to_spec(expr: kx.KernelExpr) -> dict:
    return expr.to_spec()


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def to_jsonable(x):
    """Convert numpy scalars/arrays and complex numbers into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return encode_complex(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return x
