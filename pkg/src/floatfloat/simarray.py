"""Vectorized simulator for formats with precision <= 24.

Same arithmetic as the scalar functions in :mod:`floatfloat.fpmodel`, on
numpy ``int64`` arrays.  Values are ``m * 2**q`` with a signed significand
``m``.  With ``p <= 24`` every intermediate integer stays below ``2**53``,
so bit lengths can be read off ``np.frexp`` exactly.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .oracle import Dyadic, Rounding

MAX_PRECISION = 24


class SimArray:
    """Array of simulated values sharing one precision."""

    __slots__ = ("m", "q", "p")

    def __init__(self, m: np.ndarray, q: np.ndarray, p: int) -> None:
        self.m = np.asarray(m, dtype=np.int64)
        self.q = np.where(self.m == 0, 0, np.asarray(q, dtype=np.int64))
        self.p = p

    def __len__(self) -> int:
        return len(self.m)

    def __getitem__(self, i):
        from .fpmodel import SimFloat
        if isinstance(i, (int, np.integer)):
            return SimFloat(int(self.m[i]), int(self.q[i]), self.p)
        return SimArray(self.m[i], self.q[i], self.p)

    def __iter__(self):
        from .fpmodel import SimFloat
        p = self.p
        for m, q in zip(self.m.tolist(), self.q.tolist()):
            yield SimFloat(m, q, p)

    def __neg__(self) -> SimArray:
        return SimArray(-self.m, self.q, self.p)

    def to_float(self) -> np.ndarray:
        return np.ldexp(self.m.astype(np.float64), self.q)

    def dyadics(self) -> list[Dyadic]:
        return [Dyadic(m, q) for m, q in zip(self.m.tolist(), self.q.tolist())]

    @classmethod
    def from_simfloats(cls, values: Iterable, p: int) -> SimArray:
        vals = list(values)
        return cls(np.array([v._m for v in vals], dtype=np.int64),
                   np.array([v._q for v in vals], dtype=np.int64), p)

    def __repr__(self) -> str:
        return f"SimArray(n={len(self)}, p={self.p})"


def _bitlen(a: np.ndarray) -> np.ndarray:
    # a >= 0 and a < 2**53
    return np.frexp(a.astype(np.float64))[1].astype(np.int64)


def _shr(a: np.ndarray, sh: np.ndarray) -> np.ndarray:
    return a >> np.minimum(sh, 62)


def round_array(n: np.ndarray, q: np.ndarray, fmt) -> SimArray:
    """Round exact values ``n * 2**q`` (``|n| < 2**53``) into ``fmt``."""
    from .fpmodel import FpOverflowError
    p = fmt.precision
    n = np.asarray(n, dtype=np.int64)
    q = np.asarray(q, dtype=np.int64)
    a = np.abs(n)
    nz = a != 0
    qt = _bitlen(a) + q - p
    qt = np.maximum(qt, fmt.emin - p + 1)
    sh = qt - q
    left = np.maximum(-sh, 0)
    right = np.maximum(sh, 0)
    m = np.where(sh <= 0, a << np.minimum(left, 62), _shr(a, right))
    if fmt.rounding is Rounding.NEAREST_EVEN:
        rs = np.minimum(right, 62)
        half = np.where(right > 0, np.int64(1) << np.maximum(rs - 1, 0), 0)
        mask = (np.int64(1) << rs) - 1
        rem = np.where(right > 0, a & mask, 0)
        # right > 62 only for values far below the smallest subnormal
        up = (right > 0) & (right <= 62) & ((rem > half) | ((rem == half) & ((m & 1) == 1)))
        m = m + up
    carry = (m >> p) != 0
    m = np.where(carry, m >> 1, m)
    qt = qt + carry
    nz &= m != 0
    if np.any(nz & (qt > fmt.emax - p + 1)):
        raise FpOverflowError(f"result exceeds the range of {fmt}")
    if fmt.flush_subnormals:
        nz &= (m >> (p - 1)) != 0
    m = np.where(nz, np.where(n < 0, -m, m), 0)
    return SimArray(m, np.where(nz, qt, 0), p)


def from_float(x: np.ndarray, fmt) -> SimArray:
    """Round float64 values into ``fmt``."""
    x = np.asarray(x, dtype=np.float64)
    f, e = np.frexp(x)
    n = np.ldexp(f, 53).astype(np.int64)
    return round_array(n, e.astype(np.int64) - 53, fmt)


def add(a: SimArray, b: SimArray, fmt) -> SimArray:
    from .fpmodel import GuardDigits
    # order so that (ma, qa) has the larger quantum
    swap = b.q > a.q
    ma = np.where(swap, b.m, a.m)
    qa = np.where(swap, b.q, a.q)
    mb = np.where(swap, a.m, b.m)
    qb = np.where(swap, a.q, b.q)
    za, zb = ma == 0, mb == 0
    gap = qa - qb
    g = fmt.guard_digits
    p = fmt.precision
    if g is GuardDigits.UNBOUNDED:
        # addends entirely below the round bit only matter through their sign
        far = gap >= p + 2
        sgn_b = np.sign(mb)
        n = np.where(far, (ma << 3) + sgn_b, (ma << np.minimum(gap, p + 1)) + mb)
        q = np.where(far, qa - 3, qb)
    else:
        ng = 1 if g is GuardDigits.ONE else 0
        sh = gap - ng
        ab = np.abs(mb)
        tb = np.where(sh > 0, _shr(ab, np.maximum(sh, 0)), ab << np.maximum(-sh, 0))
        tb = np.where(mb < 0, -tb, tb)
        n = np.where(gap == 0, ma + mb, (ma << ng) + tb)
        q = np.where(gap == 0, qa, qa - ng)
    # zero operands pass the other operand through unchanged
    n = np.where(za, mb, np.where(zb, ma, n))
    q = np.where(za, qb, np.where(zb, qa, q))
    return round_array(n, q, fmt)


def sub(a: SimArray, b: SimArray, fmt) -> SimArray:
    return add(a, -b, fmt)


def mul(a: SimArray, b: SimArray, fmt) -> SimArray:
    return round_array(a.m * b.m, a.q + b.q, fmt)


def reciprocal(b: SimArray, fmt) -> SimArray:
    from .fpmodel import DivideByZeroError
    if np.any(b.m == 0):
        raise DivideByZeroError("reciprocal of zero")
    p = fmt.precision
    k = 2 * p + 2
    mb = np.abs(b.m)
    quo, rem = np.divmod(np.int64(1) << k, mb)
    # quotient has >= p + 2 bits, so any nonzero remainder acts as a sticky bit
    n = 2 * quo + (rem != 0)
    n = np.where(b.m < 0, -n, n)
    return round_array(n, -b.q - k - 1, fmt)


def div(a: SimArray, b: SimArray, fmt) -> SimArray:
    return mul(a, reciprocal(b, fmt), fmt)


def abs_lt(a: SimArray, b: SimArray) -> np.ndarray:
    big = np.int64(1) << 40
    qa = np.where(a.m == 0, -big, a.q)
    qb = np.where(b.m == 0, -big, b.q)
    return (qa < qb) | ((qa == qb) & (np.abs(a.m) < np.abs(b.m)))


def where(cond: np.ndarray, x: SimArray, y: SimArray) -> SimArray:
    return SimArray(np.where(cond, x.m, y.m), np.where(cond, x.q, y.q), x.p)
