"""Curvature, positivity and tensor-product decompositions for sesqui-analytic reproducing kernels."""

from .curvature import (
    MatrixKernel,
    bundle_curvature_trace_check,
    curvature_matrix,
    derivative_kernel,
    gaussian_curvature_kernel,
    kab_kernel,
    local_operator,
    polynomial_map,
    pullback_szego_sq,
)
from .diagonal import series_gaussian_coeffs, series_power, series_product
from .kernels import (
    DiagonalSeriesKernel,
    Domain,
    KernelExpr,
    bergman,
    constant,
    drury_arveson,
    eval_jet,
    eval_kernel,
    k0,
    normalize_at,
    power,
    szego,
    szego_power,
    tensor_product,
)
from .psd import SampleSet, check_nnd, check_order, coefficient_nnd, gram_matrix
from .serialization import kernel_to_spec, parse_kernel_spec

__version__ = "0.1.0"
