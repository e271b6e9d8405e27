import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kervature import errors
from kervature import tensor_modules as tm
from kervature.curvature import gaussian_curvature_kernel
from kervature.finite_diff import wirtinger_hessian
from kervature.kernels import bergman, drury_arveson, k0, szego


@pytest.fixture(scope="module")
def hardy():
    return tm.build_truncated_space(szego(), 1.0, 1.0, 40)


@pytest.fixture(scope="module")
def small():
    return tm.build_truncated_space(szego(), 2.0, 3.0, 12)


def test_block_layout_and_weights():
    space = tm.build_truncated_space(szego(), 2.0, 1.0, 5)
    # K^2 has coefficients n + 1, K has coefficients 1
    assert [len(w) for w in space.weights] == list(range(1, 7))
    np.testing.assert_allclose(space.weights[3], [1 / 1, 1 / 2, 1 / 3, 1 / 4])
    f = tm.poly_from_dict({(2, 1): 1.0, (0, 3): 2.0j}, 5)
    assert f[3][2] == 1.0 and f[3][0] == 2.0j
    x = np.array([0.3, -0.2j])
    assert tm.poly_eval(f, x) == pytest.approx(0.09 * -0.2j + 2j * (-0.2j) ** 3)
    np.testing.assert_allclose(tm.monomials(x, 2), [x[1] ** 2, x[0] * x[1], x[0] ** 2])


def test_kernel_section_reproduces(small):
    rng = np.random.default_rng(1)
    f = [rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1) for d in range(small.N + 1)]
    y = np.array([0.4 + 0.1j, -0.3j])
    assert small.inner(f, small.kernel_section(y)) == pytest.approx(tm.poly_eval(f, y), rel=1e-12)


def test_projection_is_orthogonal_and_idempotent(small):
    y = np.array([0.5, 0.2 - 0.3j])
    k = small.kernel_section(y)
    p = small.project_a0(k)
    pp = small.project_a0(p)
    assert all(np.allclose(a, b, atol=1e-12) for a, b in zip(p, pp))
    # residual orthogonal to every A0 generator
    for d in range(1, small.N + 1):
        for g in tm._a0_generators(d):
            gen = [np.zeros(j + 1, dtype=complex) for j in range(small.N + 1)]
            gen[d] = g.astype(complex)
            r = [a - b for a, b in zip(k, p)]
            assert abs(small.inner(r, gen)) < 1e-10 * small.norm(k)
    # projected functions vanish on the diagonal
    assert abs(tm.poly_eval(p, np.array([0.3j, 0.3j]))) < 1e-12


def test_projection_reproducing_property(small):
    w = np.array([0.3, -0.1j])
    x = np.array([-0.2 + 0.4j, 0.1])
    pw = tm.project_kernel_onto_A0(small, *w)
    px = tm.project_kernel_onto_A0(small, *x)
    # <P k_w, P k_x> = K_A0(x; w)
    lhs = small.inner(pw.coefficients, px.coefficients)
    assert lhs == pytest.approx(pw(x), rel=1e-10)
    assert pw(x) == pytest.approx(np.conj(px(w)), rel=1e-10)
    assert tm.a0_diagonal_value(small, x) == pytest.approx(px(x).real, rel=1e-10)


def test_a1_is_inside_a0(small):
    for d in range(2, small.N + 1):
        C0 = tm._a0_generators(d)
        C1 = tm._a1_generators(d)
        coef, *_ = np.linalg.lstsq(C0.T, C1.T, rcond=None)
        np.testing.assert_allclose(C0.T @ coef, C1.T, atol=1e-12)


def test_a0_value_increases_with_n():
    x = (0.6, -0.3 + 0.2j)
    vals = [tm.a0_diagonal_value(tm.build_truncated_space(szego(), 1, 1, n), x) for n in (5, 10, 20, 40)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert tm.tensor_diagonal_value(tm.build_truncated_space(szego(), 1, 1, 5), x) > vals[-1]


def test_hardy_closed_form(hardy):
    for z1, z2 in [(0.3, 0.2), (0.7, -0.5), (0.4 + 0.3j, -0.2 + 0.5j)]:
        s0 = tm.tensor_diagonal_value(hardy, (z1, z2)) - tm.a0_diagonal_value(hardy, (z1, z2))
        assert s0 == pytest.approx(tm.hardy_s0_closed_form(z1, z2), abs=1e-6)
    with pytest.raises(errors.DomainError):
        tm.hardy_s0_closed_form(0.3, 0.3)
    assert tm.hardy_s0_diagonal(0.5) == pytest.approx(1 / 0.75**2)
    # stable branch continues the closed form
    assert tm.hardy_s0_closed_form(0.5, 0.5 + 1e-6) == pytest.approx(1 / 0.75**2, rel=1e-5)


def test_s1_curvature_relation():
    # d dbar log of K^(1,1) on the diagonal equals that of the S0 kernel plus 2/(1 - |z|^2)^2
    g = gaussian_curvature_kernel(szego())
    for z in (0.0, 0.3 + 0.2j, 0.6):
        s1 = wirtinger_hessian(lambda p: math.log(g.matrix(p, p)[0, 0].real), np.array([z]), 1e-3)[0, 0].real
        s0 = tm.hardy_s0_curvature(z)
        assert s1 == pytest.approx(s0 + 2 / (1 - abs(z) ** 2) ** 2, abs=1e-4)


def test_limit_at_origin(hardy):
    est = tm.limit_ratio(hardy, 0.0)
    assert est.extrapolated == pytest.approx(0.5, abs=1e-4)
    ts = [t for t, _ in est.samples]
    assert all(a > b for a, b in zip(ts, ts[1:]))
    d = est.to_dict()
    assert {"extrapolated", "error_estimate", "target", "samples", "tail_estimate"} <= set(d)


def test_limit_domain_errors(hardy):
    with pytest.raises(errors.DomainError):
        tm.limit_ratio(hardy, 0.8)


def test_limit_truncation_error():
    space = tm.build_truncated_space(szego(), 1, 1, 8)
    with pytest.raises(errors.TruncationError):
        tm.limit_ratio(space, 0.6)


def test_curvature_via_limit(hardy):
    r = tm.curvature_via_limit(hardy, 0.3 + 0.4j)
    assert r["abs_error"] < 1e-3
    assert r["curvature"] == pytest.approx(-1 / 0.75**2, abs=1e-3)
    with pytest.raises(errors.UnsupportedError):
        tm.curvature_via_limit(tm.build_truncated_space(szego(), 1, 2, 10), 0.0)


def test_k0_space_builds():
    space = tm.build_truncated_space(k0(), 1.0, 1.0, 20)
    est = tm.limit_ratio(space, 0.2)
    assert est.abs_error < 1e-3


def test_build_errors():
    with pytest.raises(errors.UnsupportedError):
        tm.build_truncated_space(drury_arveson(2), 1, 1, 5)
    with pytest.raises(ValueError):
        tm.build_truncated_space(szego(), 0, 1, 5)
    with pytest.raises(errors.IllConditionedError):
        tm.build_truncated_space(szego(), 0.2, 8.0, 60)


def test_r1_isometry_and_kernel(small):
    rep = tm.verify_r1_isometry(small, tm.random_s1_elements(small, 5, 3))
    assert rep.max_mismatch < 1e-8 and rep.count == 5
    # (z1 - z2)^2 lies in A1: R1 kills it, and it is not in S1
    f = tm.poly_from_dict({(2, 0): 1.0, (1, 1): -2.0, (0, 2): 1.0}, small.N)
    np.testing.assert_allclose(tm.r1_apply(small, f), 0, atol=1e-15)
    with pytest.raises(errors.DomainError):
        tm.verify_r1_isometry(small, [f])


def test_s1_basis_is_orthonormal(small):
    basis = tm.s1_basis(small)
    G = np.array([[small.inner(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(G, np.eye(len(basis)), atol=1e-10)
    assert max(tm.s1_membership_defect(small, f) for f in basis) < 1e-10


def test_kab_series_hardy():
    space = tm.build_truncated_space(szego(), 1, 1, 4)
    # K^2 d dbar log K = (1 - q)^-4 for the Szego kernel
    np.testing.assert_allclose(tm.kab_series(space, 5), [math.comb(n + 3, 3) for n in range(6)])


@settings(max_examples=15)
@given(st.floats(0.5, 3.0), st.floats(0.5, 3.0), st.integers(0, 2**31 - 1))
def test_r1_is_isometric_for_bergman_powers(alpha, beta, seed):
    space = tm.build_truncated_space(bergman(), alpha, beta, 10)
    els = tm.random_s1_elements(space, 2, seed)
    assert tm.verify_r1_isometry(space, els).max_mismatch < 1e-6
