"""Small worked examples: closed forms and degenerate cases."""

import numpy as np
import pytest

from kervature import curvature as cv
from kervature import diagonal, psd
from kervature.kernels import constant, drury_arveson, eval_jet, k0, szego


def test_drury_arveson_curvature_at_origin():
    np.testing.assert_allclose(cv.curvature_matrix(drury_arveson(2), [0, 0]).entries, -np.eye(2), atol=1e-15)


def test_constant_kernel_is_flat():
    assert cv.curvature(constant(1.0), 0.4j) == 0.0
    jet = eval_jet(constant(1.0), 0.3, 0.2, order=2)
    assert jet.value == 1
    assert all(v == 0 for (a, b), v in jet.entries().items() if a != (0,) or b != (0,))
    assert not any(diagonal.series_gaussian_coeffs(constant(1.0), 5).coeffs)


def test_szego_curvature_at_origin():
    assert cv.curvature(szego(), 0.0) == -1.0


def test_square_root_of_k0_squares_back():
    r = diagonal.series_power(k0(), 0.5, 6)
    sq = diagonal.series_product(r, r, 6)
    np.testing.assert_allclose(np.asarray(sq.coeffs)[:7], [8, 16, 15, 15, 15, 15, 15], rtol=1e-12)


def test_gaussian_series_matches_jet_values():
    rng = np.random.default_rng(11)
    g = diagonal.series_gaussian_coeffs(k0(), 80)
    gk = cv.gaussian_curvature_kernel(k0())
    for _ in range(10):
        z, w = 0.5 * rng.random(2) * np.exp(2j * np.pi * rng.random(2))
        assert g(z, w) == pytest.approx(gk.matrix(z, w)[0, 0], rel=1e-10)


def test_k0_gaussian_kernel_dominates_szego_on_sample():
    pts = psd.default_grid().subset(range(1, 40, 4))
    diff = cv.gaussian_curvature_kernel(k0()) - cv.gaussian_curvature_kernel(szego())
    assert psd.check_nnd(diff, pts).is_nnd
