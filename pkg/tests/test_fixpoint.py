import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwt97.errors import RangeError
from dwt97.fixpoint import (
    COEFF_NAMES,
    CoeffSet,
    ScaledCoeff,
    ShiftAddPlan,
    canonical_coeffs,
    decode_twos,
    encode_twos,
    fits_signed,
    float_coeffs,
    inverse_scalers,
    mul_const,
    plan_adders,
    round_to_q8,
    scale_q8,
    shared_pair,
    shift_add_plan,
    signed_width,
)

# binary words exactly as tabulated, decoded by hand
TABLE_WORDS = {
    "alpha": ("10.01101010", -406),
    "beta": ("11.11110010", -14),
    "gamma": ("00.11100010", 226),
    "delta": ("00.01110001", 113),
    "neg_k": ("10.11000101", -315),
    "inv_k": ("00.11010000", 208),
}
INTEGER_COLUMN = {"alpha": -406, "beta": -14, "gamma": 226, "delta": 114, "neg_k": -314, "inv_k": 208}


@pytest.mark.parametrize("name", COEFF_NAMES)
def test_canonical_constants_decode_binary_column(name):
    word, expected = TABLE_WORDS[name]
    c = canonical_coeffs()[name]
    assert c.scaled_int == expected
    assert c.binary == word
    assert c.bit_width == 10


def test_canonical_order_and_float_values():
    cs = canonical_coeffs()
    assert [c.scaled_int for c in cs] == [-406, -14, 226, 113, -315, 208]
    for c in cs:
        assert abs(c.value - c.float_value) < 1 / 256


@pytest.mark.parametrize("name", ["alpha", "beta", "gamma", "inv_k", "delta"])
def test_round_to_q8_matches_integer_column(name):
    assert round_to_q8(float_coeffs()[name]) == INTEGER_COLUMN[name]


def test_round_to_q8_neg_k_disagrees_with_integer_column():
    # -1.230174105 * 256 = -314.92; nearest is -315, the integer column says -314
    assert round_to_q8(float_coeffs()["neg_k"]) == -315


def test_integer_variant():
    cs = canonical_coeffs("integer")
    assert {c.name: c.scaled_int for c in cs} == INTEGER_COLUMN
    with pytest.raises(ValueError):
        canonical_coeffs("decimal")


def test_round_half_away_from_zero():
    assert round_to_q8(0.5 / 256) == 1
    assert round_to_q8(-0.5 / 256) == -1
    assert round_to_q8(1.5 / 256) == 2
    assert round_to_q8(0.0) == 0


@pytest.mark.parametrize("bad", [2.0, -2.0, 7.5, math.nan, math.inf])
def test_round_to_q8_rejects_out_of_range(bad):
    with pytest.raises(RangeError):
        round_to_q8(bad)


@given(st.floats(min_value=-1.99, max_value=1.99))
def test_round_to_q8_is_nearest(x):
    q = round_to_q8(x)
    assert abs(q - x * 256) <= 0.5 + 1e-9


def test_twos_complement_helpers():
    assert decode_twos("1111111111") == -1
    assert decode_twos("0111111111") == 511
    assert encode_twos(-406, 10) == "1001101010"
    assert signed_width(-128, 127) == 8
    assert signed_width(-129, 0) == 9
    assert signed_width(0, 128) == 9
    assert signed_width(0, 0) == 1
    assert fits_signed(-512, 10) and not fits_signed(512, 10)
    with pytest.raises(RangeError):
        encode_twos(512, 10)
    with pytest.raises(ValueError):
        decode_twos("10.2")


@given(st.integers(min_value=-512, max_value=511))
def test_encode_decode_round_trip(v):
    assert decode_twos(encode_twos(v, 10)) == v


def test_scaled_coeff_validation():
    with pytest.raises(RangeError):
        ScaledCoeff("alpha", -1.58, 600)
    with pytest.raises(ValueError):
        ScaledCoeff("omega", 0.1, 3)


def test_coeff_set_access_and_replace():
    cs = canonical_coeffs()
    assert cs["gamma"] is cs[2]
    assert len(cs) == 6
    other = cs.replace(delta=114)
    assert other["delta"].scaled_int == 114 and other != cs
    with pytest.raises(ValueError):
        CoeffSet(list(cs)[:5])


def test_inverse_scalers_negate_scaling_words():
    inv = inverse_scalers(canonical_coeffs())
    assert inv["k"].scaled_int == 315
    assert inv["neg_inv_k"].scaled_int == -208


@pytest.mark.parametrize("c", list(canonical_coeffs()), ids=lambda c: c.name)
def test_plan_round_trips_encoding(c):
    plan = shift_add_plan(c)
    assert plan.encode() == c.encoding
    assert sum(sign << shift for shift, sign in plan.terms) == c.scaled_int


def test_plan_invariants_rejected():
    c = canonical_coeffs()["gamma"]
    with pytest.raises(ValueError):
        ShiftAddPlan(((1, 1),), c)
    with pytest.raises(ValueError):
        ShiftAddPlan(((8, 1), (1, -1), (7, 1)), c.__class__("gamma", 0.9, 382))


def test_beta_shared_subexpression():
    plan = shift_add_plan(canonical_coeffs()["beta"])
    # x + 2x used at shifts 4 and 6: 48x + 192x = 240x covers bits 4..7
    assert shared_pair(plan) == (1, 4, 6)
    assert plan_adders(plan) == plan.adders - 1
    for name in ("alpha", "gamma", "delta", "neg_k", "inv_k"):
        p = shift_add_plan(canonical_coeffs()[name])
        assert plan_adders(p) == p.adders


def test_multiplier_adder_counts():
    # pre-add and final add belong to the lifting steps, not the scalings
    extra = {"alpha": 2, "beta": 2, "gamma": 2, "delta": 2, "neg_k": 0, "inv_k": 0}
    counts = {c.name: plan_adders(shift_add_plan(c)) + extra[c.name] for c in canonical_coeffs()}
    assert [counts[n] for n in ("alpha", "beta", "gamma", "delta", "neg_k", "inv_k")] == [6, 7, 5, 5, 4, 2]


@pytest.mark.parametrize("c", list(canonical_coeffs()) + list(inverse_scalers(canonical_coeffs()).values()),
                         ids=lambda c: c.name)
def test_mul_const_exhaustive(c):
    plan = shift_add_plan(c)
    x = np.arange(-1024, 1025)
    assert np.array_equal(mul_const(x, plan), x * c.scaled_int)
    assert mul_const(-1024, plan) == -1024 * c.scaled_int


@given(st.integers(min_value=-(1 << 20), max_value=(1 << 20)),
       st.sampled_from(list(canonical_coeffs())))
def test_mul_const_wide_property(x, c):
    assert mul_const(x, shift_add_plan(c), acc_bits=34) == x * c.scaled_int


def test_mul_const_detects_accumulator_overflow():
    plan = shift_add_plan(canonical_coeffs()["alpha"])
    with pytest.raises(RangeError):
        mul_const(1 << 14, plan, acc_bits=22)
    with pytest.raises(RangeError):
        mul_const(np.array([0, 1 << 14]), plan, acc_bits=22)


@pytest.mark.parametrize("x, expected", [(51968, 203), (255, 0), (256, 1), (-1, -1), (-256, -1), (-257, -2), (0, 0)])
def test_scale_q8_floor(x, expected):
    assert scale_q8(x) == expected


@given(st.integers(min_value=-(1 << 30), max_value=1 << 30))
def test_scale_q8_is_floor_division(x):
    assert scale_q8(x) == math.floor(x / 256) == x // 256
