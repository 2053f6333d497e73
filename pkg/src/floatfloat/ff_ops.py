"""Float-float numbers: an unevaluated sum ``hi + lo`` of two hardware floats.

With binary32 components this carries about 44 significant bits.  Only
addition and multiplication are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .eft import add12, mul12
from .fpmodel import Backend, native_backend
from .oracle import Dyadic

__all__ = ["FloatFloat", "ff_from_parts", "ff_from_wide", "ff_to_wide",
           "ff_to_dyadic", "add22", "mul22", "is_normalized"]


@dataclass(frozen=True)
class FloatFloat:
    """Pair of backend values; numpy arrays give an elementwise vector."""

    hi: Any
    lo: Any

    def __iter__(self):
        yield self.hi
        yield self.lo

    def to_dyadic(self, backend: Backend | None = None) -> Dyadic:
        B = backend or native_backend()
        return B.to_dyadic(self.hi) + B.to_dyadic(self.lo)

    def format(self, backend: Backend | None = None) -> str:
        """``(hi, lo)`` as exact hex floats followed by a 14-digit decimal."""
        B = backend or native_backend()
        h, l = B.to_dyadic(self.hi), B.to_dyadic(self.lo)
        return f"({h.hex()}, {l.hex()}) ~ {_decimal(h + l)}"

    def __str__(self) -> str:
        if isinstance(self.hi, np.ndarray):
            return f"FloatFloat(hi={self.hi!r}, lo={self.lo!r})"
        if isinstance(self.hi, (np.floating, float)):
            return self.format(native_backend())
        return f"({self.hi}, {self.lo})"


def _decimal(d: Dyadic) -> str:
    # 44 bits ~ 13.2 decimal digits
    q = d.to_fraction()
    if not q:
        return "0"
    exp10 = math.floor(math.log10(abs(q.numerator)) - math.log10(q.denominator))
    digits = 14
    scaled = q * (10 ** (digits - 1 - exp10)) if digits - 1 - exp10 >= 0 \
        else q / (10 ** (exp10 - digits + 1))
    n = abs(round(scaled))
    if n >= 10 ** digits:
        n = (n + 5) // 10
        exp10 += 1
    s = str(n)
    sign = "-" if q < 0 else ""
    return f"{sign}{s[0]}.{s[1:]}e{exp10:+d}"


def ff_from_parts(h, l, backend: Backend | None = None) -> FloatFloat:
    """Normalizing constructor: returns ``add12(h, l)``."""
    B = backend or native_backend()
    s, r = add12(h, l, B)
    return FloatFloat(s, r)


def ff_from_wide(x, backend: Backend | None = None) -> FloatFloat:
    """Split a double (or array of doubles) into a normalized float-float."""
    B = backend or native_backend()
    if isinstance(x, np.ndarray):
        x = x.astype(np.float64)
        hi = B.const(x.astype(np.float32))
        lo = B.const((x - hi.astype(np.float64)).astype(np.float32))
        return ff_from_parts(hi, lo, B)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite input")
    hi = B.const(x)
    # x - hi is exact in binary64
    lo = B.const(x - float(B.to_dyadic(hi)))
    return ff_from_parts(hi, lo, B)


def ff_to_wide(a: FloatFloat, backend: Backend | None = None):
    """``hi + lo`` rounded to binary64 (exact when the pair spans <= 53 bits)."""
    if isinstance(a.hi, np.ndarray):
        return a.hi.astype(np.float64) + a.lo.astype(np.float64)
    return float(ff_to_dyadic(a, backend))


def ff_to_dyadic(a: FloatFloat, backend: Backend | None = None) -> Dyadic:
    return a.to_dyadic(backend)


def is_normalized(a: FloatFloat, backend: Backend | None = None) -> bool:
    """True when ``(hi, lo)`` is a fixed point of add12."""
    B = backend or native_backend()
    s, r = add12(a.hi, a.lo, B)
    if isinstance(s, np.ndarray):
        return bool(np.all((s == a.hi) & (r == a.lo)))
    return B.to_dyadic(s) == B.to_dyadic(a.hi) and B.to_dyadic(r) == B.to_dyadic(a.lo)


def add22(a: FloatFloat, b: FloatFloat, backend: Backend | None = None) -> FloatFloat:
    """Float-float addition with one magnitude branch.

    |error| <= max(2**-p |al + bl|, 2**(4-2p) |a + b|) for precision p.
    """
    B = backend or native_backend()
    ah, al = a.hi, a.lo
    bh, bl = b.hi, b.lo
    r = B.add(ah, bh)
    # |ah| >= |bh| keeps (a, b); otherwise the roles swap
    swap = B.abs_lt(ah, bh)
    xh, yh = B.where(swap, bh, ah), B.where(swap, ah, bh)
    xl, yl = B.where(swap, bl, al), B.where(swap, al, bl)
    s = B.add(B.add(B.add(B.sub(xh, r), yh), yl), xl)
    rh, rl = add12(r, s, B)
    return FloatFloat(rh, rl)


def mul22(a: FloatFloat, b: FloatFloat, backend: Backend | None = None) -> FloatFloat:
    """Float-float multiplication, relative error <= 2**(4-2p).

    The final renormalization adds ``t3`` (cross products plus the Mul12
    error term) to ``t1``.
    """
    B = backend or native_backend()
    ah, al = a.hi, a.lo
    bh, bl = b.hi, b.lo
    t1, t2 = mul12(ah, bh, B)
    t3 = B.add(B.add(B.mul(ah, bl), B.mul(al, bh)), t2)
    rh, rl = add12(t1, t3, B)
    return FloatFloat(rh, rl)
