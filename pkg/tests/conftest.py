"""Shared fixtures and an independent brute-force rounding reference.

The reference enumerates every representable value of a small format and
picks neighbours with :class:`fractions.Fraction`; it shares no code with
the library's rounding.
"""

from __future__ import annotations

import bisect
import os
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from floatfloat.fpmodel import FpFormat, FpOverflowError, GuardDigits
from floatfloat.oracle import Rounding

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def positive_values(fmt: FpFormat) -> tuple[Fraction, ...]:
    """All positive finite values of ``fmt``, ascending (subnormals included)."""
    p = fmt.precision
    out = [Fraction(m) * Fraction(2) ** (fmt.emin - p + 1) for m in range(1, 1 << (p - 1))]
    for e in range(fmt.emin, fmt.emax + 1):
        scale = Fraction(2) ** (e - p + 1)
        out.extend(Fraction(m) * scale for m in range(1 << (p - 1), 1 << p))
    return tuple(out)


def _is_even(v: Fraction, fmt: FpFormat) -> bool:
    p = fmt.precision
    e = max(fmt.emin, v.numerator.bit_length() - v.denominator.bit_length())
    # exponent estimate can be one too high; normalise by checking the binade
    while Fraction(2) ** e > v and e > fmt.emin:
        e -= 1
    m = v / Fraction(2) ** (e - p + 1)
    assert m.denominator == 1
    return m.numerator % 2 == 0


def brute_round(x: Fraction, fmt: FpFormat) -> Fraction:
    """Round ``x`` into ``fmt`` by searching the value table."""
    if x == 0:
        return Fraction(0)
    vals = positive_values(fmt)
    a = abs(x)
    if a > vals[-1]:
        if fmt.rounding is Rounding.TOWARD_ZERO:
            if a >= Fraction(2) ** (fmt.emax + 1):
                raise FpOverflowError("overflow")
            return vals[-1] if x > 0 else -vals[-1]
        # round-to-nearest overflows once past the last value's half-ulp
        gap = vals[-1] - vals[-2]
        if a >= vals[-1] + gap / 2:
            raise FpOverflowError("overflow")
        r = vals[-1]
    else:
        i = bisect.bisect_left(vals, a)
        if vals[i] == a:
            r = a
        else:
            hi = vals[i]
            lo = vals[i - 1] if i > 0 else Fraction(0)
            if fmt.rounding is Rounding.TOWARD_ZERO:
                r = lo
            elif a - lo < hi - a:
                r = lo
            elif a - lo > hi - a:
                r = hi
            else:
                r = lo if lo == 0 or _is_even(lo, fmt) else hi
    if fmt.flush_subnormals and 0 < r < Fraction(2) ** fmt.emin:
        r = Fraction(0)
    return r if x > 0 else -r


def quantum(v: Fraction, fmt: FpFormat) -> int:
    """Exponent of the last significand bit of a representable nonzero ``v``."""
    a = abs(v)
    e = fmt.emin
    while Fraction(2) ** (e + 1) <= a:
        e += 1
    return e - fmt.precision + 1


def brute_add(a: Fraction, b: Fraction, fmt: FpFormat) -> Fraction:
    """Reference addition: truncate the finer operand to the coarser quantum less g digits."""
    if a == 0:
        return b
    if b == 0:
        return a
    qa, qb = quantum(a, fmt), quantum(b, fmt)
    if fmt.guard_digits is not GuardDigits.UNBOUNDED and qa != qb:
        g = 1 if fmt.guard_digits is GuardDigits.ONE else 0
        if qa < qb:
            a, b, qa, qb = b, a, qb, qa
        step = Fraction(2) ** (qa - g)
        t = abs(b) // step * step
        b = t if b > 0 else -t
    return brute_round(a + b, fmt)


@pytest.fixture
def tiny_fmt() -> FpFormat:
    return FpFormat(precision=5, emin=-6, emax=6)
