import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from floatfloat.eft import add12, mul12
from floatfloat.ff_ops import (FloatFloat, add22, ff_from_parts, ff_from_wide, ff_to_dyadic,
                               ff_to_wide, is_normalized, mul22)
from floatfloat.fpmodel import sim_backend
from floatfloat.oracle import Dyadic

f32 = np.float32


def ff(h, l=0.0) -> FloatFloat:
    return FloatFloat(f32(h), f32(l))


def as_floats(x: FloatFloat):
    return float(x.hi), float(x.lo)


def _f32(m, e, s):
    return f32(np.ldexp(float(m), e - 23) * s)


def _floatfloat(draw, elo=-40, ehi=40):
    hi = draw(st.builds(_f32, st.integers(1 << 23, (1 << 24) - 1), st.integers(elo, ehi),
                        st.sampled_from((1, -1))))
    eh = int(np.frexp(hi)[1]) - 1
    lo = draw(st.one_of(
        st.just(f32(0.0)),
        st.builds(_f32, st.integers(1 << 23, (1 << 24) - 1),
                  st.integers(eh - 48, eh - 25), st.sampled_from((1, -1)))))
    return ff_from_parts(hi, lo)


floatfloats = st.composite(_floatfloat)()


def test_from_parts_examples():
    assert as_floats(ff_from_parts(f32(1.0), f32(0.0))) == (1.0, 0.0)
    assert as_floats(ff_from_parts(f32(2.0 ** -30), f32(1.0))) == (1.0, 2.0 ** -30)
    assert as_floats(ff_from_parts(f32(1.7), f32(-1.7))) == (0.0, 0.0)


def test_wide_examples():
    assert as_floats(ff_from_wide(1.0)) == (1.0, 0.0)
    assert as_floats(ff_from_wide(1 + 2.0 ** -40)) == (1.0, 2.0 ** -40)
    assert ff_to_wide(ff(4096.0, 1.0)) == 4097.0
    with pytest.raises(ValueError):
        ff_from_wide(float("inf"))


@given(st.integers(1 << 43, (1 << 44) - 1), st.integers(-60, 60))
def test_wide_round_trip_44_bits(m, e):
    x = float(np.ldexp(float(m), e - 43))
    assert ff_to_wide(ff_from_wide(x)) == x


def test_add22_examples():
    a = ff(1.5, 2.0 ** -30)
    assert as_floats(add22(a, ff(0.0))) == as_floats(a)
    assert as_floats(add22(ff(1.0, 2.0 ** -30), ff(1.0, 2.0 ** -30))) == (2.0, 2.0 ** -29)
    r = add22(ff(1.0, 2.0 ** -30), ff(-1.0, 2.0 ** -35))
    assert as_floats(r) == (float(f32(2.0 ** -30 + 2.0 ** -35)), 0.0)


def test_mul22_examples():
    a = ff(1.5, 2.0 ** -30)
    assert as_floats(mul22(a, ff(1.0))) == as_floats(a)
    b = ff(1.0 + 2.0 ** -12)
    assert as_floats(mul22(b, b)) == (1.0 + 2.0 ** -11, 2.0 ** -24)
    assert as_floats(mul22(ff(1.0, 2.0 ** -30), ff(1.0, 2.0 ** -30))) == (1.0, 2.0 ** -29)


def _sum(*xs) -> Dyadic:
    total = Dyadic(0)
    for x in xs:
        total = total + Dyadic.from_float(float(x))
    return total


@given(floatfloats, floatfloats)
def test_add22_bound(a, b):
    r = add22(a, b)
    exact = _sum(a.hi, a.lo, b.hi, b.lo)
    delta = abs(ff_to_dyadic(r) - exact)
    low = abs(_sum(a.lo, b.lo))
    assert delta <= max(low.ldexp(-24), abs(exact).ldexp(-44))
    assert is_normalized(r)


@given(floatfloats, floatfloats)
def test_mul22_bound(a, b):
    r = mul22(a, b)
    exact = ff_to_dyadic(a) * ff_to_dyadic(b)
    assert abs(ff_to_dyadic(r) - exact) <= abs(exact).ldexp(-44)
    assert is_normalized(r)


@given(floatfloats, floatfloats)
def test_add22_commutes_in_value(a, b):
    assert ff_to_wide(add22(a, b)) == ff_to_wide(add22(b, a))


@given(floatfloats, floatfloats)
def test_mul22_on_single_words_is_mul12(a, b):
    x, y = mul12(a.hi, b.hi)
    r = mul22(FloatFloat(a.hi, f32(0.0)), FloatFloat(b.hi, f32(0.0)))
    assert as_floats(r) == as_floats(FloatFloat(*add12(x, y)))


def test_vector_and_sim_agree():
    rng = np.random.default_rng(11)
    n = 500
    hi = (rng.standard_normal((2, n)) * 100).astype(np.float32)
    lo = (hi * np.float32(2.0 ** -30) * rng.random((2, n))).astype(np.float32)
    a = ff_from_parts(hi[0], lo[0])
    b = ff_from_parts(hi[1], lo[1])
    S = sim_backend("binary32")
    sa = ff_from_parts(S.const(hi[0].astype(np.float64)), S.const(lo[0].astype(np.float64)), S)
    sb = ff_from_parts(S.const(hi[1].astype(np.float64)), S.const(lo[1].astype(np.float64)), S)
    for fn in (add22, mul22):
        r, s = fn(a, b), fn(sa, sb, S)
        assert np.array_equal(r.hi.astype(np.float64), s.hi.to_float())
        assert np.array_equal(r.lo.astype(np.float64), s.lo.to_float())


def test_text_form():
    text = ff(4096.0, 1.0).format()
    assert text.startswith("(0x1p+12, 0x1p+0) ~ 4.0970000000000e+3")
    assert str(ff(1.0)) == "(0x1p+0, 0x0p+0) ~ 1.0000000000000e+0"
