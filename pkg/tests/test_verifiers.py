import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kervature import errors, psd
from kervature import verifiers as vf
from kervature.kernels import (
    DiagonalSeriesKernel,
    bergman,
    constant,
    drury_arveson,
    k0,
    normalize_at,
    power,
    szego,
    szego_power,
)
from kervature.serialization import dumps


@pytest.mark.parametrize("kernel", [szego(), bergman(), szego_power(3.0)])
def test_szego_powers_above_one_pass_everything(kernel):
    assert vf.verify_curvature_inequality(kernel).status == "pass"
    assert vf.verify_strong_inequality(kernel).status == "pass"
    assert vf.verify_contractivity(kernel).status == "pass"
    assert vf.verify_derivative_domination(kernel).status == "pass"


def test_k0_verdicts():
    K = k0()
    assert vf.verify_curvature_inequality(K).verdict
    strong = vf.verify_strong_inequality(K)
    assert strong.status == "fail" and strong.witness is not None
    contr = vf.verify_contractivity(K)
    assert contr.status == "fail"
    assert contr.evidence["first_negative_coefficient"] == 2
    assert contr.evidence["consistent"] is True


def test_szego_power_below_one_fails_contractivity_exactly():
    rep = vf.verify_contractivity(szego_power(0.5))
    assert rep.evidence["exact_verdict"] is False
    assert rep.status == "fail"


def test_curvature_inequality_margins_for_szego_are_zero():
    rep = vf.verify_curvature_inequality(szego())
    assert max(abs(m) for m in rep.margins) < 1e-9


def test_constant_kernel_fails_curvature_inequality():
    rep = vf.verify_curvature_inequality(constant(1.0))
    assert rep.status == "fail"
    assert rep.witness is not None
    assert all(m > 0 for m in rep.margins)


def test_exact_one_minus_q_of_polynomial_kernel():
    s = vf.exact_one_minus_q(DiagonalSeriesKernel((1.0, 3.0, 2.0)))
    assert s.coeffs == (1.0, 2.0, -1.0, -2.0)
    assert vf.exact_one_minus_q(drury_arveson(2)) is None


def test_row_checks_on_drury_arveson():
    for K in (drury_arveson(2), power(drury_arveson(2), 2.0)):
        assert vf.verify_row_contraction(K).status == "pass"
        assert vf.verify_row_inequality(K).status == "pass"


def test_constant_kernel_on_the_ball_fails_row_checks():
    K = constant(1.0, 2)
    assert vf.verify_row_contraction(K).status == "fail"
    assert vf.verify_row_inequality(K).status == "fail"


def test_monotonicity_and_failed_hypothesis():
    assert vf.verify_monotonicity(k0(), szego()).status == "pass"
    assert vf.verify_monotonicity(bergman(), szego()).status == "pass"
    rep = vf.verify_monotonicity(szego(), bergman())
    assert rep.status == "hypothesis-failed" and not rep.verdict


def test_normalized_row_monotonicity():
    K = normalize_at(power(drury_arveson(2), 2.0), np.zeros(2))
    assert vf.verify_normalized_row_monotonicity(K).status == "pass"
    unnormalized = vf.verify_normalized_row_monotonicity(power(drury_arveson(2), 2.0) * 2.0)
    assert unnormalized.status == "hypothesis-failed"


def test_derivative_norms_and_equality_case():
    fk, dfg, one = vf.derivative_norms(szego(), [0.0, 1.0])
    assert (fk, dfg, one) == (1.0, 1.0, 1.0)
    rep = vf.verify_derivative_bound(szego(), [1.0, 2.0, -1.0j])
    assert rep.verdict and rep.margins[0] > 0


def test_derivative_norms_need_constant_in_space():
    K = DiagonalSeriesKernel((0.0, 1.0))
    with pytest.raises(errors.DegenerateError, match="constant not in space"):
        vf.norm_of_one_squared(K)
    with pytest.raises(errors.DegenerateError):
        vf.derivative_norms(K, [1.0, 1.0])


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
def test_derivative_bound_holds_for_bergman(f):
    assert vf.verify_derivative_bound(bergman(), f).verdict


def test_report_json_is_canonical():
    rep = vf.verify_contractivity(k0(), psd.default_grid().subset(range(0, 40, 4)))
    d = rep.to_dict()
    text = dumps(d)
    assert json.loads(text)["status"] == "fail"
    assert set(d) >= {"name", "verdict", "status", "min_eigenvalue", "tolerance", "sample", "witness", "evidence"}
    assert text == dumps(rep.to_dict())


def test_gram_chunks_cover_all_points():
    chunks = vf._chunks(40)
    assert sorted(i for c in chunks for i in c) == list(range(40))
    assert max(len(c) for c in chunks) <= 12


def test_disc_only_verifiers_reject_the_ball():
    with pytest.raises(errors.UnsupportedError):
        vf.verify_curvature_inequality(drury_arveson(2))
