"""Error-free transformations over an arithmetic backend.

Each function returns a pair ``(hi, lo)`` whose exact sum is the exact
result of the operation, provided the stated preconditions hold.  The
operation sequences are kept literally; a backend that reorders or fuses
them would break the exactness argument.
"""

from __future__ import annotations

import math
from typing import Any, NamedTuple

import numpy as np

from .fpmodel import Backend, SimFloat, native_backend
from .simarray import SimArray, _bitlen
from .oracle import Dyadic

__all__ = ["EftPair", "SplitOverflowError", "UnderflowRiskError",
           "add12", "add12_fast", "split", "mul12", "default_split_point"]


class SplitOverflowError(OverflowError):
    """(2**s + 1) * a would overflow."""


class UnderflowRiskError(ArithmeticError):
    """A partial product of Mul12 would be flushed to zero."""


class EftPair(NamedTuple):
    hi: Any
    lo: Any


def add12(a, b, backend: Backend | None = None) -> EftPair:
    """Branchless two-sum: ``s = a + b`` rounded and its exact error ``r``.

    Needs a guard digit in subtraction; no magnitude ordering is required.
    """
    B = backend or native_backend()
    s = B.add(a, b)
    v = B.sub(s, a)
    r = B.add(B.sub(a, B.sub(s, v)), B.sub(b, v))
    return EftPair(s, r)


def add12_fast(a, b, backend: Backend | None = None) -> EftPair:
    """Two-sum with one magnitude test and three operations."""
    B = backend or native_backend()
    swap = B.abs_lt(a, b)
    a, b = B.where(swap, b, a), B.where(swap, a, b)
    s = B.add(a, b)
    r = B.sub(b, B.sub(s, a))
    return EftPair(s, r)


def default_split_point(precision: int) -> int:
    return math.ceil(precision / 2)


def _check_split(a, s_point: int, B: Backend) -> None:
    fmt = B.fmt
    p = fmt.precision
    if p < 3:
        raise ValueError("split needs precision >= 3")
    if not p / 2 <= s_point <= p - 1:
        raise ValueError(f"split point must satisfy p/2 <= s <= p-1, got {s_point}")
    limit = fmt.emax - s_point  # exponent(a) <= emax - s - 1
    if isinstance(a, (np.ndarray, np.floating)):
        if np.any(np.abs(a) >= np.float32(2.0 ** limit)):
            raise SplitOverflowError(f"|a| must stay below 2**{limit}")
    elif isinstance(a, SimArray):
        if np.any((a.m != 0) & (a.q + a.p - 1 >= limit)):
            raise SplitOverflowError(f"|a| must stay below 2**{limit}")
    elif isinstance(a, SimFloat):
        if a and a.exponent >= limit:
            raise SplitOverflowError(f"|a| must stay below 2**{limit}")
    else:
        d = B.to_dyadic(a)
        if d and d.msb_exponent() >= limit:
            raise SplitOverflowError(f"|a| must stay below 2**{limit}")


def split(a, s_point: int | None = None, backend: Backend | None = None) -> EftPair:
    """Dekker split of ``a`` into a (p - s)-bit high part and s-bit low part."""
    B = backend or native_backend()
    if s_point is None:
        s_point = default_split_point(B.fmt.precision)
    _check_split(a, s_point, B)
    c = B.mul(B.add(B.const(2 ** s_point), B.const(1)), a)
    a_big = B.sub(c, a)
    a_hi = B.sub(c, a_big)
    a_lo = B.sub(a, a_hi)
    return EftPair(a_hi, a_lo)


def _split_lost_bits(a, a_hi, a_lo, B: Backend) -> bool:
    """True when a flushed low part broke ``a_hi + a_lo = a``."""
    if isinstance(a, SimArray):
        # the true sum has at most 24 bits, so the float64 sum is exact
        return bool(np.any(a_hi.to_float() + a_lo.to_float() != a.to_float()))
    return B.to_dyadic(a_hi) + B.to_dyadic(a_lo) != B.to_dyadic(a)


def _check_underflow(a, b, a_parts, b_parts, B: Backend) -> None:
    if not B.fmt.flush_subnormals or isinstance(a, (np.ndarray, np.floating)):
        return
    if _split_lost_bits(a, *a_parts, B) or _split_lost_bits(b, *b_parts, B):
        raise UnderflowRiskError("a split low part was flushed to zero")
    a_lo, b_lo = a_parts[1], b_parts[1]
    if isinstance(a_lo, SimArray):
        prod = np.abs(a_lo.m * b_lo.m)
        msb = _bitlen(prod) - 1 + a_lo.q + b_lo.q
        if np.any((prod != 0) & (msb < B.fmt.emin)):
            raise UnderflowRiskError("a_lo * b_lo falls below the normal range")
        return
    prod = B.to_dyadic(a_lo) * B.to_dyadic(b_lo)
    if prod and prod.msb_exponent() < B.fmt.emin:
        raise UnderflowRiskError("a_lo * b_lo falls below the normal range")


def mul12(a, b, backend: Backend | None = None) -> EftPair:
    """Dekker two-product: ``x = a * b`` rounded and ``y`` its exact error."""
    B = backend or native_backend()
    if B.fmt.precision < 6:
        raise ValueError("mul12 needs precision >= 6")
    x = B.mul(a, b)
    a_hi, a_lo = split(a, backend=B)
    b_hi, b_lo = split(b, backend=B)
    _check_underflow(a, b, (a_hi, a_lo), (b_hi, b_lo), B)
    err1 = B.sub(x, B.mul(a_hi, b_hi))
    err2 = B.sub(err1, B.mul(a_lo, b_hi))
    err3 = B.sub(err2, B.mul(a_hi, b_lo))
    y = B.sub(B.mul(a_lo, b_lo), err3)
    return EftPair(x, y)


def pair_value(pair: EftPair, backend: Backend | None = None) -> Dyadic:
    """Exact value ``hi + lo`` of a scalar pair."""
    B = backend or native_backend()
    return B.to_dyadic(pair.hi) + B.to_dyadic(pair.lo)
