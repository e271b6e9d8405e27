import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kervature import errors
from kervature import series as fps

coeff_lists = st.lists(st.floats(0.0, 2.0, allow_nan=False), min_size=1, max_size=12).map(
    lambda c: [1.0 + c[0]] + c[1:]
)


def test_log_matches_symbolic():
    got = fps.log_coefficients([1.0, 1.0, 1.0], 6)
    want = [0, 1, 0.5, -2 / 3, 0.25, 0.2, -1 / 3]
    np.testing.assert_allclose(got, want, atol=1e-15)


def test_power_matches_symbolic():
    got = fps.power_coefficients([1.0, 2.0, 0.0, 1.0], 1.5, 6)
    np.testing.assert_allclose(got, [1, 3, 1.5, 1, 15 / 8, -9 / 8, 25 / 16], atol=1e-14)


def test_log_needs_positive_constant():
    with pytest.raises(ValueError):
        fps.log_coefficients([0.0, 1.0], 3)
    with pytest.raises(ValueError):
        fps.log_coefficients([-1.0, 1.0], 3)


def test_gaussian_coefficients_closed_form():
    # g_k = 1/2 sum_{i+j=k+1} (i - j)^2 a_i a_j, summed in exact rationals
    a = np.array([8.0, 16.0] + [15.0] * 10)
    n = 6
    got = fps.gaussian_coefficients(a, n)
    want = []
    for k in range(n + 1):
        total = Fraction(0)
        for i in range(k + 2):
            j = k + 1 - i
            total += Fraction((i - j) ** 2, 2) * Fraction(a[i]) * Fraction(a[j])
        want.append(float(total))
    np.testing.assert_array_equal(got, want)


def test_szego_gaussian_is_szego_squared():
    # K = (1 - q)^-1: K^2 dd log K = (1 - q)^-4 ... coefficients binom(n + 3, 3)
    a = np.ones(20)
    got = fps.gaussian_coefficients(a, 10)
    np.testing.assert_array_equal(got, [math.comb(n + 3, 3) for n in range(11)])


def test_one_minus_q_and_mixed_derivative():
    np.testing.assert_array_equal(fps.one_minus_q_coefficients([8, 16, 15, 15, 15], 4), [8, 8, -1, 0, 0])
    # d dbar of sum a_n |z|^(2n), as a series in q: (n + 1)^2 a_(n+1)
    np.testing.assert_array_equal(fps.mixed_derivative_coefficients([1, 1, 1, 1], 2), [1, 4, 9])


def test_taylor_shift_and_compose():
    a = [1.0, 2.0, 3.0]
    s0 = 0.5
    np.testing.assert_allclose(fps.taylor_shift(a, s0, 2), [1 + 1 + 0.75, 2 + 3, 3])
    # exp(s) composed with s + s^2
    out = fps.compose_univariate([1 / math.factorial(k) for k in range(6)], [0.0, 1.0, 1.0], 4)
    np.testing.assert_allclose(out, [1, 1, 1.5, 7 / 6, 25 / 24])


def test_szego_power_tail_dominates_coefficients():
    for alpha in (0.5, 1.0, 2.0, 3.7):
        rule = fps.szego_power_tail(alpha)
        c = fps.szego_power_coefficients(alpha, 400)
        n = np.arange(401)
        assert np.all(c <= rule.C * (n + 1.0) ** rule.degree * (1 + 1e-12))
        assert rule.nonnegative


def test_tail_bound_geometric_case():
    rule = fps.TailRule("bound", C=1.0, degree=0.0, radius=1.0)
    assert rule.bound(10, 0.5) == pytest.approx(0.5**10 / 0.5)
    assert rule.bound(0, 1.0) == math.inf


def test_check_tail_raises_when_uncertified():
    rule = fps.TailRule("bound", C=1.0, degree=0.0, radius=1.0)
    fps.check_tail(rule, 60, 0.5, 1.0)
    with pytest.raises(errors.TruncationError):
        fps.check_tail(rule, 5, 0.5, 1.0)


def test_tail_rule_round_trip():
    for rule in (fps.TailRule("constant", 15.0), fps.TailRule("bound", C=2.5, degree=1.5, radius=0.9,
                                                                sign="nonnegative")):
        assert fps.TailRule.from_spec(rule.to_spec()) == rule
    with pytest.raises(ValueError):
        fps.TailRule("unknown-kind")


@given(coeff_lists)
def test_exp_inverts_log(a):
    n = 10
    log_a = fps.log_coefficients(a, n)
    np.testing.assert_allclose(fps.exp_coefficients(log_a, n), fps._pad(a, n), rtol=1e-9, atol=1e-9)


@given(coeff_lists, st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_power_composes(a, s, t):
    n = 10
    lhs = fps.power_coefficients(fps.power_coefficients(a, s, n), t, n)
    rhs = fps.power_coefficients(a, s * t, n)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-8, atol=1e-8 * np.max(np.abs(rhs)))


@given(coeff_lists, st.integers(1, 4))
def test_integer_power_is_repeated_product(a, k):
    n = 9
    prod = fps._pad([1.0], n)
    for _ in range(k):
        prod = fps.product_coefficients(prod, a, n)
    np.testing.assert_allclose(fps.power_coefficients(a, float(k), n), prod, rtol=1e-10, atol=1e-10)


@given(coeff_lists)
def test_gaussian_of_nonnegative_series_is_nonnegative(a):
    # a diagonal kernel with nonnegative coefficients has an NND Gaussian-curvature series
    g = fps.gaussian_coefficients(np.asarray(a + [0.0, 0.0]), len(a))
    assert np.all(g >= 0)
