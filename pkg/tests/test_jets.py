import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kervature import finite_diff as fd
from kervature.jets import Jet
from kervature.kernels import RationalKernel, bergman, k0, normalize_at, szego_power, tensor_product

disc_points = st.tuples(st.floats(0, 0.6), st.floats(0, 6.3)).map(lambda rt: rt[0] * np.exp(1j * rt[1]))
kernels = st.sampled_from([k0(), bergman(), szego_power(0.6), RationalKernel((2.0, 1.0), (1.0, -0.5)),
                           normalize_at(k0(), 0.2j)])


@given(kernels, disc_points, disc_points)
def test_jet_conjugate_symmetry(K, z, w):
    jz = K.jet(z, w, order=2)
    jw = K.jet(w, z, order=2)
    for a in range(3):
        for b in range(3):
            assert jz.derivative((a,), (b,)) == pytest.approx(np.conj(jw.derivative((b,), (a,))), rel=1e-10, abs=1e-12)
    assert jz.value == pytest.approx(K(z, w), rel=1e-13)


@given(kernels, disc_points, disc_points)
def test_jet_first_order_against_finite_differences(K, z, w):
    j = K.jet(z, w, order=1)
    ref = fd.sesqui_derivative(K, [z], [w], (1,), (1,))
    assert j.derivative((1,), (1,)) == pytest.approx(ref, rel=1e-6, abs=1e-8)


def test_inner_product_jet():
    j = Jet.inner_product([0.3, 0.1j], [0.2, -0.4], order=2)
    assert j.value == pytest.approx(0.3 * 0.2 + 0.1j * -0.4)
    assert j.derivative((1, 0), (0, 0)) == pytest.approx(0.2)
    assert j.derivative((0, 0), (0, 1)) == pytest.approx(0.1j)
    assert j.derivative((0, 1), (0, 1)) == 1
    assert j.derivative((1, 0), (0, 1)) == 0
    assert j.nilpotency >= 2


def test_arithmetic_is_exact_truncation():
    s = Jet.inner_product([0.5], [0.5], order=3)
    one = Jet.constant(1, 3, 1.0)
    inv = (one - s).reciprocal()
    prod = inv * (one - s)
    np.testing.assert_allclose(prod.coeffs, one.coeffs, atol=1e-14)
    half = inv.power(0.5)
    np.testing.assert_allclose((half * half).coeffs, inv.coeffs, atol=1e-13)


def test_derivative_bounds_checked():
    j = Jet.constant(1, 1, 2.0)
    with pytest.raises(ValueError):
        j.derivative((2,), (0,))
    with pytest.raises(ValueError):
        j.derivative((0, 0), (0,))


def test_gaussian_from_jet():
    z, w = 0.3 + 0.2j, 0.1 - 0.5j
    K = bergman()
    j = K.jet(z, w, order=1)
    q = z * np.conj(w)
    # G of (1 - q)^-2 is 2 (1 - q)^-6
    assert j.gaussian()[0, 0] == pytest.approx(2 / (1 - q) ** 6)


def test_embedding_in_tensor_jets():
    T = tensor_product(k0(), bergman())
    z = np.array([0.2, 0.1j])
    w = np.array([0.3j, -0.2])
    j = T.jet(z, w, order=1)
    j1 = k0().jet(z[:1], w[:1], order=1)
    j2 = bergman().jet(z[1:], w[1:], order=1)
    assert j.derivative((1, 0), (1, 0)) == pytest.approx(j1.derivative((1,), (1,)) * j2.value)
    assert j.derivative((1, 0), (0, 1)) == pytest.approx(j1.derivative((1,), (0,)) * j2.derivative((0,), (1,)))


def test_finite_difference_helpers():
    f = lambda p: np.exp(p[0])  # noqa: E731
    z = np.array([0.2 + 0.1j])
    assert fd.wirtinger_d(f, z, 0, 1e-3) == pytest.approx(np.exp(z[0]), rel=1e-9)
    assert abs(fd.wirtinger_dbar(f, z, 0, 1e-3)) < 1e-9
    g = lambda p: abs(p[0]) ** 4  # noqa: E731
    # d dbar |z|^4 = 4 |z|^2
    assert fd.wirtinger_hessian(g, z, 1e-3)[0, 0] == pytest.approx(4 * abs(z[0]) ** 2, rel=1e-8)
    assert fd.cauchy_derivative(lambda a, b: np.exp(a[0] * np.conj(b[0])), [0.1], [0.2], (2,), (1,)) == pytest.approx(
        np.exp(0.02) * (2 * 0.2 + 0.2**2 * 0.1), rel=1e-12)
