import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kervature.errors import SpecError
from kervature.kernels import k0
from kervature.serialization import (
    decode_complex,
    decode_point,
    dumps,
    encode_complex,
    kernel_from_spec,
    kernel_to_spec,
    parse_kernel_spec,
    to_jsonable,
)

SPECS = [
    {"type": "szego"},
    {"type": "szego", "m": 2},
    {"type": "bergman"},
    {"type": "drury-arveson", "m": 3},
    {"type": "szego-power", "alpha": "2.5"},
    {"type": "paper-k0"},
    {"type": "constant", "c": "2.0"},
    {"type": "rational", "num": ["1.0", "0.5"], "den": ["1.0", "-0.5"]},
    {"type": "diagonal-series", "coeffs": ["1.0", "0.1", "0.30000000000000004"],
     "tail": {"kind": "constant", "value": "0.25"}},
    {"type": "sum", "children": [{"type": "szego"}, {"type": "bergman"}]},
    {"type": "product", "children": [{"type": "szego"}, {"type": "paper-k0"}]},
    {"type": "scale", "c": "3.0", "children": [{"type": "szego"}]},
    {"type": "one-minus-zw", "children": [{"type": "paper-k0"}]},
    {"type": "power", "alpha": "0.5", "children": [{"type": "paper-k0"}]},
    {"type": "tensor", "children": [{"type": "szego"}, {"type": "bergman"}]},
    {"type": "normalize", "children": [{"type": "paper-k0"}]},
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s["type"])
def test_spec_round_trip(spec):
    k = kernel_from_spec(spec)
    again = kernel_from_spec(kernel_to_spec(k))
    assert kernel_to_spec(again) == kernel_to_spec(k)
    m = k.m
    z = np.full(m, 0.2 + 0.1j)
    w = np.full(m, -0.1 + 0.3j) / np.sqrt(m)
    assert again(z, w) == k(z, w)


def test_coefficients_survive_bit_exactly():
    spec = {"type": "diagonal-series", "coeffs": ["0.1", "0.30000000000000004", "1e-300"]}
    out = kernel_to_spec(kernel_from_spec(spec))
    assert [float(c) for c in out["coeffs"]] == [0.1, 0.30000000000000004, 1e-300]


def test_k0_spec_and_value():
    k = parse_kernel_spec('{"type": "paper-k0"}')
    assert kernel_to_spec(k) == kernel_to_spec(k0())
    q = 0.3 * 0.5
    assert k(0.3, 0.5) == pytest.approx((8 + 8 * q - q * q) / (1 - q))


@pytest.mark.parametrize("bad", [
    '{"type": "power", "alpha": 0, "children": [{"type": "szego"}]}',
    '{"type": "power", "alpha": -1, "children": [{"type": "szego"}]}',
    '{"type": "no-such-kernel"}',
    '{"type": "drury-arveson"}',
    '{"type": "tensor", "children": [{"type": "szego"}]}',
    '{"type": "rational", "num": [1], "den": [1, -2]}',
    '{"type": "diagonal-series", "coeffs": []}',
    '[1, 2]',
    'not json',
])
def test_malformed_specs(bad):
    with pytest.raises(SpecError):
        parse_kernel_spec(bad)


def test_complex_encoding():
    assert encode_complex(0.1 + 2j) == {"re": "0.1", "im": "2.0"}
    assert decode_complex({"re": "0.1", "im": "2.0"}) == 0.1 + 2j
    assert decode_complex([0.5, -1]) == 0.5 - 1j
    assert decode_complex("0.3+0.4j") == 0.3 + 0.4j
    assert decode_complex(3) == 3


def test_point_decoding():
    np.testing.assert_array_equal(decode_point([0.1, 0.2]), [0.1 + 0.2j])
    np.testing.assert_array_equal(decode_point([[0.1, 0.2], {"re": "0", "im": "1"}]), [0.1 + 0.2j, 1j])
    np.testing.assert_array_equal(decode_point("0.5j"), [0.5j])


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_round_trip_is_exact(z):
    assert decode_complex(json.loads(json.dumps(encode_complex(z)))) == z


def test_dumps_is_canonical():
    obj = to_jsonable({"b": np.float64(0.1), "a": [np.int64(2), 1 + 1j, np.array([True])]})
    text = dumps(obj)
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["a", "b"]
    assert json.loads(text)["b"] == "0.1"
