from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_add, brute_round, positive_values
from floatfloat import fpmodel
from floatfloat.fpmodel import (BINARY32, PRESETS, DivideByZeroError, FpFormat, FpOverflowError,
                                GuardDigits, SimClass, SimFloat, ZeroArgumentError,
                                native_backend, parse_format, sim_backend)
from floatfloat.oracle import Dyadic, Rounding

SMALL = [FpFormat(5, -6, 6, r, g, ftz)
         for r, g, ftz in itertools.product(Rounding, GuardDigits, (False, True))]


def sf(x, fmt=BINARY32) -> SimFloat:
    return fpmodel.round(x, fmt)


def frac(x: SimFloat) -> Fraction:
    return x.to_dyadic().to_fraction()


@st.composite
def small_case(draw, n=2):
    fmt = draw(st.sampled_from(SMALL))
    vals = positive_values(fmt)
    # flush-to-zero formats never hold subnormals
    if fmt.flush_subnormals:
        vals = tuple(v for v in vals if v >= Fraction(2) ** fmt.emin)
    pick = st.one_of(st.just(Fraction(0)),
                     st.builds(lambda v, s: v * s, st.sampled_from(vals), st.sampled_from((1, -1))))
    return (fmt, *[draw(pick) for _ in range(n)])


def _expect(fn, *args):
    try:
        return fn(*args)
    except FpOverflowError:
        return FpOverflowError


def _got(fn, *args):
    try:
        return frac(fn(*args))
    except FpOverflowError:
        return FpOverflowError


# -- round ---------------------------------------------------------------------


def test_round_examples():
    x = Dyadic((1 << 24) + 1, -24)
    assert frac(sf(x)) == 1
    assert frac(sf(x, PRESETS["chopped"])) == 1
    for fmt in SMALL + [BINARY32]:
        assert sf(0, fmt).cls is SimClass.ZERO


@given(st.sampled_from(SMALL), st.fractions(min_value=-40, max_value=40))
def test_round_matches_brute_force(fmt, x):
    assert _got(fpmodel.round, x, fmt) == _expect(brute_round, x, fmt)


@given(st.floats(-3e38, 3e38, allow_nan=False, width=64))
def test_round_matches_numpy_float32(x):
    with np.errstate(over="ignore"):
        want = np.float32(x)
    if not np.isfinite(want):
        with pytest.raises(FpOverflowError):
            sf(x)
    else:
        assert float(sf(x)) == float(want)


def test_round_overflow():
    with pytest.raises(FpOverflowError):
        sf(2.0 ** 128)
    # truncation stays finite below the next power of two
    top = sf(2.0 ** 128 - 2.0 ** 100, PRESETS["chopped"])
    assert frac(top) == Fraction(2) ** 128 - Fraction(2) ** 104


def test_flush_to_zero():
    ftz = BINARY32.replace(flush_subnormals=True)
    assert sf(2.0 ** -130, ftz).cls is SimClass.ZERO
    assert sf(2.0 ** -130).cls is SimClass.SUBNORMAL


# -- arithmetic -------------------------------------------------------------------


def test_add_examples():
    assert frac(fpmodel.add(sf(1.0), sf(0.0), BINARY32)) == 1
    p3 = FpFormat(3, -10, 10, Rounding.TOWARD_ZERO, GuardDigits.ONE)
    assert frac(fpmodel.sub(sf(1.25, p3), sf(0.875, p3), p3)) == Fraction(3, 8)
    p3z = p3.replace(guard_digits=GuardDigits.ZERO)
    assert frac(fpmodel.sub(sf(1.25, p3z), sf(0.875, p3z), p3z)) == Fraction(1, 2)


@given(small_case())
def test_add_matches_brute_force(case):
    fmt, a, b = case
    got = _got(fpmodel.add, sf(a, fmt), sf(b, fmt), fmt)
    assert got == _expect(brute_add, a, b, fmt)


@given(small_case())
def test_sub_is_add_of_negation(case):
    fmt, a, b = case
    assert _got(fpmodel.sub, sf(a, fmt), sf(b, fmt), fmt) == _expect(brute_add, a, -b, fmt)


@given(small_case())
def test_mul_matches_brute_force(case):
    fmt, a, b = case
    assert _got(fpmodel.mul, sf(a, fmt), sf(b, fmt), fmt) == _expect(brute_round, a * b, fmt)


@given(small_case())
def test_div_is_reciprocal_then_multiply(case):
    fmt, a, b = case
    if b == 0:
        with pytest.raises(DivideByZeroError):
            fpmodel.div(sf(a, fmt), sf(b, fmt), fmt)
        return

    # a reciprocal flushed to zero gives a zero quotient, as on the hardware
    want = _expect(lambda: brute_round(a * brute_round(1 / b, fmt), fmt))
    assert _got(fpmodel.div, sf(a, fmt), sf(b, fmt), fmt) == want


def test_div_examples():
    for fmt in SMALL + [BINARY32]:
        assert frac(fpmodel.div(sf(2.0, fmt), sf(2.0, fmt), fmt)) == 1
        assert frac(fpmodel.div(sf(1.5, fmt), sf(1.0, fmt), fmt)) == Fraction(3, 2)
    third = fpmodel.div(sf(1.0), sf(3.0), BINARY32)
    assert third.hex() == "0x1.555556p-2"
    chopped = PRESETS["chopped"]
    assert fpmodel.div(sf(1.0, chopped), sf(3.0, chopped), chopped).hex() == "0x1.555554p-2"


def test_ulp_examples():
    assert fpmodel.ulp(1.0, BINARY32) == Dyadic(1, -23)
    assert fpmodel.ulp(4097.0, BINARY32) == Dyadic(1, -11)
    assert fpmodel.ulp(0.75, BINARY32) == Dyadic(1, -24)
    assert fpmodel.ulp(2.0 ** -140, BINARY32) == Dyadic(1, -149)
    with pytest.raises(ZeroArgumentError):
        fpmodel.ulp(0.0, BINARY32)


# -- values and formats -------------------------------------------------------------


def test_simfloat_fields():
    p3 = FpFormat(3, -4, 4)
    x = SimFloat.from_fields(-1, 0b101, 3, p3)
    assert frac(x) == -10
    assert (x.sign, x.significand, x.exponent) == (-1, 5, 3)
    assert x.cls is SimClass.NORMAL
    assert -x == SimFloat.from_fields(1, 0b101, 3, p3)
    assert SimFloat.from_fields(1, 0b011, -4, p3).cls is SimClass.SUBNORMAL
    for bad in ((0, 5, 3), (1, 8, 3), (1, 5, 9), (1, 3, 2)):
        with pytest.raises(ValueError):
            SimFloat.from_fields(*bad, p3)


@given(st.sampled_from(list(PRESETS.values()) + SMALL))
def test_config_round_trip(fmt):
    assert parse_format(fmt.to_config()) == fmt
    assert FpFormat.from_config(str(fmt)) == fmt


def test_parse_format():
    assert parse_format("binary32") == BINARY32
    assert parse_format("p=24,round=rz") == PRESETS["chopped"]
    assert parse_format("nvidia16,guard=1").guard_digits is GuardDigits.ONE
    for bad in ("p=x", "round=up", "guard=2", "ftz=yes", "color=red", "nosuch"):
        with pytest.raises(ValueError):
            parse_format(bad)
    with pytest.raises(ValueError):
        FpFormat(precision=1)


def test_native_backend():
    B = native_backend()
    assert B.add(np.float32(1.0), np.float32(2.0)) == np.float32(3.0)
    with pytest.raises(FpOverflowError):
        B.mul(np.float32(3e38), np.float32(2.0))
    with pytest.raises(DivideByZeroError):
        B.div(np.float32(1.0), np.float32(0.0))


def test_sim_backend_accepts_strings():
    B = sim_backend("chopped")
    assert B.fmt.rounding is Rounding.TOWARD_ZERO
    assert B.describe().startswith("sim:p=24")
    assert B == sim_backend(PRESETS["chopped"])
