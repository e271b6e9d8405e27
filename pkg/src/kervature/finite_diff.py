"""Central finite differences with one Richardson step.

Used as an independent oracle for jets, and to differentiate metrics that
are only available numerically (bundle curvature).  Wirtinger operators are
``d = (d_x - i d_y)/2`` and ``dbar = (d_x + i d_y)/2``.
"""

from __future__ import annotations

import math

import numpy as np


def central(f, z: np.ndarray, direction: np.ndarray, h: float):
    return (np.asarray(f(z + h * direction)) - np.asarray(f(z - h * direction))) / (2 * h)


def richardson(f, z: np.ndarray, direction: np.ndarray, h: float):
    """Directional derivative with the ``h^2`` error term removed."""
    return (4 * central(f, z, direction, h / 2) - central(f, z, direction, h)) / 3


def _unit(m: int, i: int, scale: complex = 1.0) -> np.ndarray:
    e = np.zeros(m, dtype=complex)
    e[i] = scale
    return e


def wirtinger_d(f, z, i: int, h: float):
    z = np.asarray(z, dtype=complex)
    dx = richardson(f, z, _unit(z.size, i), h)
    dy = richardson(f, z, _unit(z.size, i, 1j), h)
    return 0.5 * (dx - 1j * dy)


def wirtinger_dbar(f, z, j: int, h: float):
    z = np.asarray(z, dtype=complex)
    dx = richardson(f, z, _unit(z.size, j), h)
    dy = richardson(f, z, _unit(z.size, j, 1j), h)
    return 0.5 * (dx + 1j * dy)


def wirtinger_hessian(g, z, h: float) -> np.ndarray:
    """Matrix of ``d_i dbar_j g`` by nested differences."""
    z = np.asarray(z, dtype=complex)
    m = z.size
    out = np.empty((m, m), dtype=complex)
    for j in range(m):
        dbar_j = lambda p, j=j: wirtinger_dbar(g, p, j, h)  # noqa: E731
        for i in range(m):
            out[i, j] = wirtinger_d(dbar_j, z, i, h)
    return out


def sesqui_derivative(K, z, w, a, b, h: float = 1e-3) -> complex:
    """``d^a dbar^b K(z, w)`` for a sesqui-analytic ``K``.

    Holomorphy in ``z`` and anti-holomorphy in ``w`` make every such derivative
    a real-direction derivative in the corresponding coordinate, so nested
    one-dimensional differences suffice.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    m = z.size
    steps = [k for k in range(m) for _ in range(int(a[k]))]
    steps += [m + k for k in range(m) for _ in range(int(b[k]))]

    def build(remaining):
        if not remaining:
            return lambda p: complex(K(p[:m], p[m:]))
        inner = build(remaining[1:])
        axis = remaining[0]
        return lambda p: richardson(inner, p, _unit(2 * m, axis), h)

    return complex(build(steps)(np.concatenate([z, w])))


def cauchy_derivative(K, z, w, a, b, radius: float = 0.05, nodes: int = 32) -> complex:
    """Same quantity via the trapezoidal rule for Cauchy's integral in every differentiated variable.

    Exponentially accurate in ``nodes`` for analytic integrands; the
    evaluation circles must stay inside the domain.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    m = z.size
    orders = list(a) + list(b)
    axes = [k for k in range(2 * m) if orders[k] > 0]
    theta = 2 * np.pi * np.arange(nodes) / nodes
    roots = radius * np.exp(1j * theta)
    base = np.concatenate([z, np.conj(w)])
    total = 0j
    for idx in np.ndindex(*([nodes] * len(axes))):
        p = base.copy()
        weight = 1.0 + 0j
        for ax, k in zip(axes, idx):
            p[ax] += roots[k]
            weight /= roots[k] ** orders[ax]
        total += weight * K(p[:m], np.conj(p[m:]))
    fact = math.prod(math.factorial(orders[ax]) for ax in axes)
    return complex(total * fact / nodes ** len(axes))
