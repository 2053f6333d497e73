"""Arithmetic backends: host binary32 and a bit-exact format simulator.

The simulator models the non-IEEE behaviours seen on early GPUs: reduced
precision, truncating (chopped) rounding, additions without a guard digit,
flush-to-zero and division computed as a rounded reciprocal followed by a
rounded multiplication.  Infinities and NaNs are not modelled; a result that
does not fit the exponent range raises :class:`FpOverflowError`.

Every backend exposes the same small surface (``add``, ``sub``, ``mul``,
``div``, ``ulp`` plus conversion helpers) so the error-free transformations
and float-float operators run unchanged over either.
"""

from __future__ import annotations

import builtins
import enum
import math
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from . import simarray
from .oracle import Dyadic, Rounding, round_scaled
from .simarray import SimArray

__all__ = [
    "Rounding", "GuardDigits", "FpFormat", "SimFloat", "SimClass",
    "FpOverflowError", "ZeroArgumentError", "DivideByZeroError",
    "round", "add", "sub", "mul", "div", "ulp", "convert",
    "Backend", "NativeBackend", "SimBackend", "native_backend", "sim_backend",
    "BINARY32", "PRESETS", "parse_format",
]


class FpOverflowError(ArithmeticError):
    """Result magnitude beyond the format's largest finite value."""


class ZeroArgumentError(ValueError):
    pass


class DivideByZeroError(ZeroDivisionError):
    pass


class GuardDigits(enum.Enum):
    ZERO = "0"
    ONE = "1"
    UNBOUNDED = "inf"


@dataclass(frozen=True)
class FpFormat:
    """A binary floating-point format together with its rounding behaviour.

    ``precision`` counts significand bits including the implicit one.
    ``guard_digits`` only affects addition and subtraction.
    """

    precision: int = 24
    emin: int = -126
    emax: int = 127
    rounding: Rounding = Rounding.NEAREST_EVEN
    guard_digits: GuardDigits = GuardDigits.UNBOUNDED
    flush_subnormals: bool = False

    def __post_init__(self) -> None:
        if not 2 <= self.precision <= 53:
            raise ValueError(f"precision must be in [2, 53], got {self.precision}")
        if self.emin >= self.emax:
            raise ValueError("emin must be smaller than emax")
        if not isinstance(self.rounding, Rounding):
            raise TypeError("rounding must be a Rounding member")
        if not isinstance(self.guard_digits, GuardDigits):
            raise TypeError("guard_digits must be a GuardDigits member")

    @property
    def min_quantum(self) -> int:
        """Exponent of the smallest subnormal spacing."""
        return self.emin - self.precision + 1

    @property
    def max_value(self) -> Dyadic:
        p = self.precision
        return Dyadic((1 << p) - 1, self.emax - p + 1)

    @property
    def min_normal(self) -> Dyadic:
        return Dyadic(1, self.emin)

    def replace(self, **changes: Any) -> FpFormat:
        return replace(self, **changes)

    def to_config(self) -> str:
        return (f"p={self.precision},emin={self.emin},emax={self.emax},"
                f"round={self.rounding.value},guard={self.guard_digits.value},"
                f"ftz={int(self.flush_subnormals)}")

    @classmethod
    def from_config(cls, text: str) -> FpFormat:
        return parse_format(text)

    def __str__(self) -> str:
        return self.to_config()


BINARY32 = FpFormat()

# Vendor GPU formats.  GPU parts flush subnormals.  The ATI 24-bit exponent range
# is not published; an IEEE-style 7-bit range (bias 63) is assumed.
PRESETS: dict[str, FpFormat] = {
    "binary32": BINARY32,
    "nvidia16": FpFormat(11, -14, 15, flush_subnormals=True),
    "nvidia32": FpFormat(24, -126, 127, flush_subnormals=True),
    "ati16": FpFormat(11, -14, 15, flush_subnormals=True),
    "ati24": FpFormat(17, -62, 63, flush_subnormals=True),
    "ati32": FpFormat(24, -126, 127, flush_subnormals=True),
    # reference columns of the Paranoia-style error table
    "exact": BINARY32,
    "chopped": FpFormat(rounding=Rounding.TOWARD_ZERO),
}

_ROUND_KEYS = {"rne": Rounding.NEAREST_EVEN, "rz": Rounding.TOWARD_ZERO}
_GUARD_KEYS = {"0": GuardDigits.ZERO, "1": GuardDigits.ONE,
               "inf": GuardDigits.UNBOUNDED}


def parse_format(text: str) -> FpFormat:
    """Parse ``p=24,emin=-126,emax=127,round=rne,guard=inf,ftz=0``.

    Keys may be omitted (binary32 values are used) and a leading
    ``preset=<name>`` or bare preset name selects the base format.
    """
    text = text.strip()
    base = BINARY32
    fields: dict[str, Any] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            if item not in PRESETS:
                raise ValueError(f"unknown format preset {item!r}")
            base = PRESETS[item]
            continue
        key, _, val = item.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key == "preset":
                base = PRESETS[val]
            elif key == "p":
                fields["precision"] = int(val)
            elif key in ("emin", "emax"):
                fields[key] = int(val)
            elif key == "round":
                fields["rounding"] = _ROUND_KEYS[val]
            elif key == "guard":
                fields["guard_digits"] = _GUARD_KEYS[val]
            elif key == "ftz":
                if val not in ("0", "1"):
                    raise KeyError(val)
                fields["flush_subnormals"] = val == "1"
            else:
                raise ValueError(f"unknown format key {key!r}")
        except KeyError:
            raise ValueError(f"bad value {val!r} for format key {key!r}") from None
    return replace(base, **fields)


class SimClass(enum.Enum):
    ZERO = "zero"
    NORMAL = "normal"
    SUBNORMAL = "subnormal"


class SimFloat:
    """A value of a simulated format.

    Internally ``m * 2**q`` with a signed significand ``m``: ``|m|`` has
    exactly ``precision`` bits for normal values and ``q`` is the quantum
    exponent ``exponent - precision + 1``.  Build instances with
    :func:`round` or :meth:`from_fields`; arithmetic keeps them canonical.
    """

    __slots__ = ("_m", "_q", "_p")

    def __init__(self, m: int, q: int, precision: int) -> None:
        self._m = m
        self._q = q if m else 0
        self._p = precision

    @classmethod
    def from_fields(cls, sign: int, significand: int, exponent: int,
                    fmt: FpFormat) -> SimFloat:
        """Validated constructor from the (sign, significand, exponent) triple."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        p = fmt.precision
        if significand < 0 or significand >> p:
            raise ValueError(f"significand must fit in {p} bits")
        if not significand:
            return _zero(fmt)
        if not fmt.emin <= exponent <= fmt.emax:
            raise ValueError("exponent out of range")
        if significand.bit_length() < p:
            if exponent != fmt.emin:
                raise ValueError("non-canonical: normal values need the top bit set")
            if fmt.flush_subnormals:
                return _zero(fmt)
        return cls(sign * significand, exponent - p + 1, p)

    @property
    def sign(self) -> int:
        return -1 if self._m < 0 else 1

    @property
    def significand(self) -> int:
        return abs(self._m)

    @property
    def exponent(self) -> int:
        return self._q + self._p - 1 if self._m else 0

    @property
    def precision(self) -> int:
        return self._p

    @property
    def cls(self) -> SimClass:
        if not self._m:
            return SimClass.ZERO
        if abs(self._m).bit_length() == self._p:
            return SimClass.NORMAL
        return SimClass.SUBNORMAL

    def to_dyadic(self) -> Dyadic:
        return Dyadic(self._m, self._q)

    def __float__(self) -> float:
        return math.ldexp(self._m, self._q)

    def __neg__(self) -> SimFloat:
        return SimFloat(-self._m, self._q, self._p)

    def __abs__(self) -> SimFloat:
        return self if self._m >= 0 else SimFloat(-self._m, self._q, self._p)

    def __bool__(self) -> bool:
        return bool(self._m)

    def _key(self, other: object) -> tuple[Dyadic, Dyadic]:
        return self.to_dyadic(), Dyadic.coerce(other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SimFloat):
            if other._p == self._p:
                return self._m == other._m and self._q == other._q
        elif not isinstance(other, (int, float, Dyadic)):
            return NotImplemented
        a, b = self._key(other)
        return a == b

    def __hash__(self) -> int:
        return hash(self.to_dyadic())

    def __lt__(self, other: object) -> bool:
        a, b = self._key(other)
        return a < b

    def __le__(self, other: object) -> bool:
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other: object) -> bool:
        a, b = self._key(other)
        return a > b

    def __ge__(self, other: object) -> bool:
        a, b = self._key(other)
        return a >= b

    def hex(self) -> str:
        return self.to_dyadic().hex()

    def __repr__(self) -> str:
        return f"SimFloat({self.hex()}, p={self._p})"

    def __reduce__(self):
        return (SimFloat, (self._m, self._q, self._p))


def _zero(fmt: FpFormat) -> SimFloat:
    return SimFloat(0, 0, fmt.precision)


def _round_int(n: int, q: int, fmt: FpFormat) -> SimFloat:
    """Round the exact value ``n * 2**q`` into ``fmt``."""
    if not n:
        return SimFloat(0, 0, fmt.precision)
    p = fmt.precision
    a = -n if n < 0 else n
    qt = a.bit_length() + q - p
    qmin = fmt.emin - p + 1
    if qt < qmin:
        qt = qmin
    sh = qt - q
    if sh <= 0:
        m = a << -sh
    else:
        m = a >> sh
        if fmt.rounding is Rounding.NEAREST_EVEN:
            half = 1 << (sh - 1)
            rem = a & ((half << 1) - 1)
            if rem > half or (rem == half and m & 1):
                m += 1
    if m >> p:
        m >>= 1
        qt += 1
    if not m:
        return SimFloat(0, 0, p)
    if qt > fmt.emax - p + 1:
        raise FpOverflowError(f"result exceeds the range of {fmt}")
    if fmt.flush_subnormals and m.bit_length() < p:
        return SimFloat(0, 0, p)
    return SimFloat(-m if n < 0 else m, qt, p)


def round(x: Any, fmt: FpFormat) -> SimFloat:  # noqa: A001
    """Round an exact value (Dyadic, int, Fraction or float) into ``fmt``."""
    if type(x) is float and math.isfinite(x):
        n, d = x.as_integer_ratio()
        return _round_int(n, 1 - d.bit_length(), fmt)
    if isinstance(x, SimFloat):
        x = x.to_dyadic()
    elif not isinstance(x, Dyadic):
        if isinstance(x, float) and not math.isfinite(x):
            raise ValueError("non-finite values are not modelled")
        try:
            x = Dyadic.coerce(x)
        except ValueError:
            # non-dyadic rational
            m, q = round_scaled(x.numerator, x.denominator, 0, fmt.precision,
                                fmt.rounding, fmt.min_quantum)
            return _round_int(m, q, fmt)
    return _round_int(x.mantissa, x.exponent, fmt)


convert = round


def add(a: SimFloat, b: SimFloat, fmt: FpFormat) -> SimFloat:
    am, aq, bm, bq = a._m, a._q, b._m, b._q
    if not am:
        return b
    if not bm:
        return a
    g = fmt.guard_digits
    if g is GuardDigits.UNBOUNDED or aq == bq:
        if aq <= bq:
            return _round_int(am + (bm << (bq - aq)), aq, fmt)
        return _round_int((am << (aq - bq)) + bm, bq, fmt)
    # the operand with the smaller exponent is shifted right and chopped to
    # the larger operand's width plus the guard digits
    if aq < bq:
        am, aq, bm, bq = bm, bq, am, aq
    ng = 1 if g is GuardDigits.ONE else 0
    qa = aq - ng
    sh = qa - bq
    if sh > 0:
        bm = -((-bm) >> sh) if bm < 0 else bm >> sh
        return _round_int((am << ng) + bm, qa, fmt)
    return _round_int((am << ng) + (bm << -sh), qa, fmt)


def sub(a: SimFloat, b: SimFloat, fmt: FpFormat) -> SimFloat:
    return add(a, SimFloat(-b._m, b._q, b._p), fmt)


def mul(a: SimFloat, b: SimFloat, fmt: FpFormat) -> SimFloat:
    return _round_int(a._m * b._m, a._q + b._q, fmt)


def reciprocal(b: SimFloat, fmt: FpFormat) -> SimFloat:
    """Correctly rounded ``1 / b`` in ``fmt``."""
    if not b._m:
        raise DivideByZeroError("reciprocal of zero")
    sign = -1 if b._m < 0 else 1
    m, q = round_scaled(sign, abs(b._m), -b._q, fmt.precision,
                        fmt.rounding, fmt.min_quantum)
    return _round_int(m, q, fmt)


def div(a: SimFloat, b: SimFloat, fmt: FpFormat) -> SimFloat:
    """``a / b`` as a rounded reciprocal followed by a rounded product."""
    if not b._m:
        raise DivideByZeroError("division by zero")
    return mul(a, reciprocal(b, fmt), fmt)


def ulp(x: Any, fmt: FpFormat) -> Dyadic:
    """Spacing of ``fmt`` at ``x``: ``2**(e - p + 1)``.

    Subnormal values share the exponent ``emin``.
    """
    d = Dyadic.coerce(x)
    if not d:
        raise ZeroArgumentError("ulp of zero")
    e = builtins.max(d.msb_exponent(), fmt.emin)
    return Dyadic(1, e - fmt.precision + 1)


# -- backends ------------------------------------------------------------------


class Backend:
    """Uniform arithmetic interface.

    ``fmt`` describes the arithmetic.  ``const`` brings an exact number into
    the backend (rounding it), ``to_dyadic`` reads a backend value back out
    exactly.  ``abs_lt`` and ``where`` exist so that the one comparison in
    the float-float algorithms works on both scalars and numpy arrays.
    """

    fmt: FpFormat
    name: str

    def add(self, a, b): raise NotImplementedError
    def sub(self, a, b): raise NotImplementedError
    def mul(self, a, b): raise NotImplementedError
    def div(self, a, b): raise NotImplementedError

    def ulp(self, x) -> Dyadic:
        return ulp(self.to_dyadic(x), self.fmt)

    def const(self, x): raise NotImplementedError
    def to_dyadic(self, x) -> Dyadic: raise NotImplementedError
    def abs_lt(self, a, b): raise NotImplementedError

    def where(self, cond, x, y):
        return x if cond else y

    def is_exact_zero(self, x) -> bool:
        return not self.to_dyadic(x)

    def describe(self) -> str:
        return f"{self.name}:{self.fmt.to_config()}"

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.fmt.to_config()}>"


def _check_finite(r):
    if not np.all(np.isfinite(r)):
        raise FpOverflowError("binary32 overflow")
    return r


class NativeBackend(Backend):
    """Host IEEE binary32 arithmetic through numpy.

    Accepts ``np.float32`` scalars or arrays; operations are elementwise and
    round to nearest even.
    """

    name = "native"
    fmt = BINARY32

    def add(self, a, b):
        with np.errstate(over="ignore", invalid="ignore"):
            return _check_finite(np.add(a, b, dtype=np.float32))

    def sub(self, a, b):
        with np.errstate(over="ignore", invalid="ignore"):
            return _check_finite(np.subtract(a, b, dtype=np.float32))

    def mul(self, a, b):
        with np.errstate(over="ignore", invalid="ignore"):
            return _check_finite(np.multiply(a, b, dtype=np.float32))

    def div(self, a, b):
        if np.any(np.asarray(b) == 0):
            raise DivideByZeroError("division by zero")
        with np.errstate(over="ignore", invalid="ignore"):
            return _check_finite(np.divide(a, b, dtype=np.float32))

    def const(self, x):
        if isinstance(x, np.ndarray):
            return x.astype(np.float32)
        if isinstance(x, (Dyadic, SimFloat)):
            x = float(x)
        r = np.float32(x)
        if not np.isfinite(r):
            raise FpOverflowError("constant out of binary32 range")
        return r

    def to_dyadic(self, x) -> Dyadic:
        return Dyadic.from_float(float(x))

    def abs_lt(self, a, b):
        return np.abs(a) < np.abs(b)

    def where(self, cond, x, y):
        if np.ndim(cond) == 0:
            return x if cond else y
        return np.where(cond, x, y).astype(np.float32, copy=False)


class SimBackend(Backend):
    """Arithmetic in a simulated :class:`FpFormat`.

    Operates on :class:`SimFloat` scalars, or elementwise on
    :class:`~floatfloat.simarray.SimArray` vectors when the precision is at
    most 24 bits.
    """

    name = "sim"

    def __init__(self, fmt: FpFormat) -> None:
        self.fmt = fmt
        self._consts: dict[Any, SimFloat] = {}

    def add(self, a, b):
        if type(a) is SimArray:
            return simarray.add(a, b, self.fmt)
        return add(a, b, self.fmt)

    def sub(self, a, b):
        if type(a) is SimArray:
            return simarray.sub(a, b, self.fmt)
        return sub(a, b, self.fmt)

    def mul(self, a, b):
        if type(a) is SimArray:
            if type(b) is not SimArray:
                b = self._broadcast(b, len(a))
            return simarray.mul(a, b, self.fmt)
        if type(b) is SimArray:
            return simarray.mul(self._broadcast(a, len(b)), b, self.fmt)
        return mul(a, b, self.fmt)

    def div(self, a, b):
        if type(a) is SimArray:
            return simarray.div(a, b, self.fmt)
        return div(a, b, self.fmt)

    @staticmethod
    def _broadcast(x: SimFloat, n: int) -> SimArray:
        return SimArray(np.full(n, x._m, dtype=np.int64),
                        np.full(n, x._q, dtype=np.int64), x._p)

    def const(self, x):
        if isinstance(x, np.ndarray):
            if self.fmt.precision > simarray.MAX_PRECISION:
                raise ValueError("vectorized simulation needs precision <= 24")
            return simarray.from_float(x, self.fmt)
        if isinstance(x, np.floating):
            x = float(x)
        if isinstance(x, (int, float)):
            try:
                return self._consts[x]
            except KeyError:
                r = self._consts[x] = round(x, self.fmt)
                return r
        return round(x, self.fmt)

    def to_dyadic(self, x) -> Dyadic:
        return x.to_dyadic()

    def abs_lt(self, a, b):
        if type(a) is SimArray:
            return simarray.abs_lt(a, b)
        return abs(a.to_dyadic()) < abs(b.to_dyadic())

    def where(self, cond, x, y):
        if type(x) is SimArray:
            return simarray.where(cond, x, y)
        return x if cond else y

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimBackend) and other.fmt == self.fmt

    def __hash__(self) -> int:
        return hash(self.fmt)


_NATIVE = NativeBackend()


def native_backend() -> NativeBackend:
    return _NATIVE


def sim_backend(fmt: FpFormat | str = BINARY32) -> SimBackend:
    if isinstance(fmt, str):
        fmt = parse_format(fmt)
    return SimBackend(fmt)
