"""Exact dyadic arithmetic used as ground truth.

A :class:`Dyadic` is ``m * 2**e`` with an unbounded integer ``m``.  Sums,
differences and products of dyadics are dyadic, so a single ``+``, ``-`` or
``*`` on floating-point inputs is always computed without error.  Quotients
are not closed; :func:`round_quotient` returns a correctly rounded quotient
at a requested width instead.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Rational
from typing import TYPE_CHECKING, Union

if TYPE_CHECKING:
    from .fpmodel import FpFormat


class Rounding(enum.Enum):
    NEAREST_EVEN = "rne"
    TOWARD_ZERO = "rz"


class BothZeroError(ZeroDivisionError):
    """error_ulps called with computed == exact == 0."""


class ExactIsZeroError(ZeroDivisionError):
    """error_bits called with a zero exact value."""


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1


class Dyadic:
    """Exact number ``sign * significand * 2**exponent``.

    Stored canonically: the significand is odd, or the value is zero with
    exponent 0.  Instances are immutable and hashable; equal values compare
    and hash equal to the matching ``int``/``Fraction``/``float``.
    """

    __slots__ = ("_m", "_e")

    _m: int
    _e: int

    def __new__(cls, m: int = 0, e: int = 0) -> Dyadic:
        self = object.__new__(cls)
        if m:
            tz = _trailing_zeros(m)
            if tz:
                m >>= tz
                e += tz
            self._m = m
            self._e = e
        else:
            self._m = 0
            self._e = 0
        return self

    @classmethod
    def _raw(cls, m: int, e: int) -> Dyadic:
        # caller guarantees canonical form
        self = object.__new__(cls)
        self._m = m
        self._e = e
        return self

    @classmethod
    def from_float(cls, x: float) -> Dyadic:
        """Exact value of a finite binary float (Python or numpy)."""
        n, d = float(x).as_integer_ratio()
        if not n:
            return ZERO
        # numerator is odd whenever d > 1
        if d > 1:
            return cls._raw(n, 1 - d.bit_length())
        return cls(n, 0)

    @classmethod
    def from_fraction(cls, q: Rational) -> Dyadic:
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, 1 - d.bit_length())

    @classmethod
    def coerce(cls, x: object) -> Dyadic:
        if isinstance(x, Dyadic):
            return x
        if type(x) is float:
            return cls.from_float(x)
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Rational):
            return cls.from_fraction(x)
        to_dyadic = getattr(x, "to_dyadic", None)
        if to_dyadic is not None:
            return to_dyadic()
        return cls.from_float(x)  # type: ignore[arg-type]

    # -- fields --------------------------------------------------------------

    @property
    def sign(self) -> int:
        return (self._m > 0) - (self._m < 0)

    @property
    def significand(self) -> int:
        return abs(self._m)

    @property
    def exponent(self) -> int:
        return self._e

    @property
    def mantissa(self) -> int:
        """Signed significand."""
        return self._m

    def msb_exponent(self) -> int:
        """floor(log2(|self|)); self must be nonzero."""
        if not self._m:
            raise ValueError("zero has no leading bit")
        return abs(self._m).bit_length() - 1 + self._e

    def is_zero(self) -> bool:
        return not self._m

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: object) -> Dyadic:
        if not isinstance(other, Dyadic):
            if isinstance(other, (int, Rational)):
                other = Dyadic.coerce(other)
            else:
                return NotImplemented
        return dy_add(self, other)

    __radd__ = __add__

    def __sub__(self, other: object) -> Dyadic:
        if not isinstance(other, Dyadic):
            if isinstance(other, (int, Rational)):
                other = Dyadic.coerce(other)
            else:
                return NotImplemented
        return dy_sub(self, other)

    def __rsub__(self, other: object) -> Dyadic:
        if isinstance(other, (int, Rational)):
            return dy_sub(Dyadic.coerce(other), self)
        return NotImplemented

    def __mul__(self, other: object) -> Dyadic:
        if not isinstance(other, Dyadic):
            if isinstance(other, (int, Rational)):
                other = Dyadic.coerce(other)
            else:
                return NotImplemented
        return dy_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> Dyadic:
        return Dyadic._raw(-self._m, self._e)

    def __pos__(self) -> Dyadic:
        return self

    def __abs__(self) -> Dyadic:
        return self if self._m >= 0 else Dyadic._raw(-self._m, self._e)

    def ldexp(self, k: int) -> Dyadic:
        """Exact multiplication by ``2**k``."""
        if not self._m:
            return self
        return Dyadic._raw(self._m, self._e + k)

    # -- comparison ----------------------------------------------------------

    def _cmp(self, other: Dyadic) -> int:
        d = dy_sub(self, other)._m
        return (d > 0) - (d < 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self._m == other._m and self._e == other._e
        if isinstance(other, (int, float, Rational)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __lt__(self, other: Dyadic) -> bool:
        return self._cmp(Dyadic.coerce(other)) < 0

    def __le__(self, other: Dyadic) -> bool:
        return self._cmp(Dyadic.coerce(other)) <= 0

    def __gt__(self, other: Dyadic) -> bool:
        return self._cmp(Dyadic.coerce(other)) > 0

    def __ge__(self, other: Dyadic) -> bool:
        return self._cmp(Dyadic.coerce(other)) >= 0

    def __bool__(self) -> bool:
        return bool(self._m)

    # -- conversion ----------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self._e >= 0:
            return Fraction(self._m << self._e)
        return Fraction(self._m, 1 << -self._e)

    def __float__(self) -> float:
        # correctly rounded by Fraction.__float__
        return float(self.to_fraction())

    def hex(self) -> str:
        """Exact hex-float rendering, e.g. ``0x1.8p-2``."""
        if not self._m:
            return "0x0p+0"
        sign = "-" if self._m < 0 else ""
        m = abs(self._m)
        nbits = m.bit_length()
        frac_bits = nbits - 1
        exp = self._e + frac_bits
        frac = m - (1 << frac_bits)
        if not frac_bits:
            return f"{sign}0x1p{exp:+d}"
        ndig = (frac_bits + 3) // 4
        frac <<= ndig * 4 - frac_bits
        digits = f"{frac:0{ndig}x}".rstrip("0")
        return f"{sign}0x1.{digits}p{exp:+d}"

    def __repr__(self) -> str:
        return f"Dyadic({self._m}, {self._e})"

    def __str__(self) -> str:
        return self.hex()

    def __reduce__(self):
        return (Dyadic, (self._m, self._e))


DyadicLike = Union[Dyadic, int, float, Fraction]

ZERO = Dyadic._raw(0, 0)
ONE = Dyadic._raw(1, 0)


def dy_add(a: Dyadic, b: Dyadic) -> Dyadic:
    am, ae, bm, be = a._m, a._e, b._m, b._e
    if not am:
        return b
    if not bm:
        return a
    if ae == be:
        return Dyadic(am + bm, ae)
    if ae < be:
        return Dyadic(am + (bm << (be - ae)), ae)
    return Dyadic((am << (ae - be)) + bm, be)


def dy_sub(a: Dyadic, b: Dyadic) -> Dyadic:
    return dy_add(a, Dyadic._raw(-b._m, b._e))


def dy_mul(a: Dyadic, b: Dyadic) -> Dyadic:
    m = a._m * b._m
    if not m:
        return ZERO
    # product of odd significands is odd
    return Dyadic._raw(m, a._e + b._e)


def round_scaled(
    num: int,
    den: int,
    scale: int,
    bits: int,
    rounding: Rounding,
    min_quantum: int | None = None,
) -> tuple[int, int]:
    """Round ``num / den * 2**scale`` to ``bits`` significant bits.

    ``den`` must be positive.  If ``min_quantum`` is given the result is a
    multiple of ``2**min_quantum`` (fewer significant bits for tiny values).
    Returns ``(m, q)`` with result ``m * 2**q``; ``|m|`` may equal
    ``2**bits`` after a rounding carry.
    """
    if not num:
        return 0, 0
    neg = num < 0
    n = -num if neg else num
    k = n.bit_length() - den.bit_length()
    if k >= 0:
        if n < den << k:
            k -= 1
    elif n << -k < den:
        k -= 1
    q = k + scale - bits + 1
    if min_quantum is not None and q < min_quantum:
        q = min_quantum
    sh = q - scale
    if sh >= 0:
        m, rem = divmod(n, den << sh)
        d = den << sh
    else:
        m, rem = divmod(n << -sh, den)
        d = den
    if rem and rounding is Rounding.NEAREST_EVEN:
        twice = rem << 1
        if twice > d or (twice == d and m & 1):
            m += 1
    return (-m if neg else m), q


def round_quotient(a: DyadicLike, b: DyadicLike, bits: int,
                   rounding: Rounding = Rounding.NEAREST_EVEN) -> Dyadic:
    """Correctly rounded ``a / b`` with ``bits`` significant bits."""
    a = Dyadic.coerce(a)
    b = Dyadic.coerce(b)
    if not b._m:
        raise ZeroDivisionError("round_quotient by zero")
    if bits < 2:
        raise ValueError("bits must be >= 2")
    num, den = a._m, b._m
    if den < 0:
        num, den = -num, -den
    m, q = round_scaled(num, den, a._e - b._e, bits, rounding)
    return Dyadic(m, q)


def _ulp_exponent(x: Dyadic, precision: int, emin: int) -> int:
    if not x._m:
        return emin - precision + 1
    return max(x.msb_exponent(), emin) - precision + 1


def error_ulps(computed: DyadicLike, exact: DyadicLike | Fraction,
               fmt: FpFormat) -> Fraction:
    """``(computed - exact) / ulp(computed)`` as an exact fraction.

    ``exact`` may be any rational (quotients are not dyadic).  The ulp is taken in ``fmt`` at the magnitude of ``computed``; a zero
    result uses the ulp of the smallest normal.
    """
    c = Dyadic.coerce(computed)
    if isinstance(exact, Fraction) and exact.denominator & (exact.denominator - 1):
        # non-dyadic exact value, e.g. a true quotient
        k = _ulp_exponent(c, fmt.precision, fmt.emin)
        q = (c.to_fraction() - exact)
        return q / (1 << k) if k >= 0 else q * (1 << -k)
    x = Dyadic.coerce(exact)
    if not c._m and not x._m:
        raise BothZeroError("computed and exact are both zero")
    diff = dy_sub(c, x)
    if not diff._m:
        return Fraction(0)
    k = diff._e - _ulp_exponent(c, fmt.precision, fmt.emin)
    if k >= 0:
        return Fraction(diff._m << k)
    return Fraction(diff._m, 1 << -k)


def error_bits(computed: DyadicLike, exact: DyadicLike) -> float:
    """``log2(|computed - exact| / |exact|)``; ``-inf`` when exact."""
    c = Dyadic.coerce(computed)
    x = Dyadic.coerce(exact)
    if not x._m:
        raise ExactIsZeroError("relative error undefined for exact == 0")
    diff = dy_sub(c, x)
    if not diff._m:
        return -math.inf
    return (math.log2(abs(diff._m)) - math.log2(abs(x._m))
            + (diff._e - x._e))


def format_error_bits(bits: float) -> str:
    """One-decimal rendering used in accuracy tables."""
    if bits == -math.inf:
        return "(exact)"
    return f"{bits:.1f}"


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)
