"""Accuracy measurement and throughput benchmarks for the float-float operators.

Accuracy runs draw seeded operands, evaluate an operator on a backend and
compare every result with exact integer arithmetic.  Backend values are
read out exactly as integers at a common power-of-two scale, so sums and
products of them are exact, the same ground truth the :class:`Dyadic`
oracle provides, without an object per intermediate.
"""

from __future__ import annotations

import math
import statistics
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import sampling, simarray
from .eft import add12, default_split_point, mul12, split
from .ff_ops import FloatFloat, add22, mul22
from .fpmodel import Backend, FpFormat, NativeBackend, SimBackend, SimFloat, native_backend
from .oracle import Dyadic, format_error_bits
from .simarray import SimArray

ACCURACY_OPS = ("add12", "mul12", "add22", "mul22", "split")
BENCH_OPS = ("add", "mul", "mad", "add12", "mul12", "add22", "mul22")
BENCH_SIZES = (4096, 16384, 65536, 262144, 1048576)
DEFAULT_ACCURACY_SAMPLES = 1 << 20
EXPONENT_LIMIT = 60

_ARITY = {"add12": 2, "mul12": 2, "split": 1, "add22": 4, "mul22": 4}


class UnknownOpError(ValueError):
    """Operator name not recognised."""


class FormatTooNarrowError(ValueError):
    """No operand exponent keeps every intermediate normal in this format."""


# -- reports -------------------------------------------------------------------


def _hex_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x.hex()


def _bits_record(x: float | None) -> dict[str, str] | None:
    if x is None:
        return None
    return {"hex": _hex_float(x), "decimal": format_error_bits(x)}


@dataclass(frozen=True)
class AccuracyReport:
    """Largest observed error of one operator, in bits relative to the exact result.

    ``bound_bits`` is None for add22, whose bound mixes two terms and is
    checked per sample; ``worst_margin_bits`` then gives the largest
    ``log2(|error| / bound)`` seen (a violation means it is positive).
    """

    op: str
    backend: str
    samples: int
    seed: int
    max_error_bits: float
    bound_bits: float | None
    violations: int
    worst_case: tuple[str, ...]
    worst_margin_bits: float | None = None
    first_violation: tuple[str, ...] | None = None
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self) -> dict[str, Any]:
        return {
            "op": self.op,
            "backend": self.backend,
            "samples": self.samples,
            "seed": self.seed,
            "max_error_bits": _bits_record(self.max_error_bits),
            "bound_bits": _bits_record(self.bound_bits),
            "worst_margin_bits": _bits_record(self.worst_margin_bits),
            "violations": self.violations,
            "skipped": self.skipped,
            "worst_case": list(self.worst_case),
            "first_violation": list(self.first_violation) if self.first_violation else None,
        }


def _bound_text(r: AccuracyReport) -> str:
    if r.bound_bits is None:
        return "mixed"
    return "exact" if r.bound_bits == -math.inf else f"{r.bound_bits:.1f}"


def format_accuracy(reports: Sequence[AccuracyReport]) -> str:
    """Text table in the style of the measured-accuracy table."""
    head = f"{'Operator':<10}{'Error (bits)':>14}{'Bound':>9}{'Violations':>12}{'Samples':>10}"
    lines = [head]
    for r in reports:
        err = format_error_bits(r.max_error_bits)
        lines.append(f"{r.op.capitalize():<10}{err:>14}{_bound_text(r):>9}"
                     f"{r.violations:>12}{r.samples:>10}")
        if r.worst_margin_bits is not None:
            lines.append(f"{'':<10}worst margin to bound: {format_error_bits(r.worst_margin_bits)} bits")
        if r.first_violation:
            lines.append(f"{'':<10}first violation: {', '.join(r.first_violation)}")
    if reports:
        lines.append(f"backend {reports[0].backend}, seed {reports[0].seed}")
    return "\n".join(lines)


# -- operand sampling ------------------------------------------------------------


def _range(lo: int, hi: int, op: str, fmt: FpFormat) -> tuple[int, int]:
    lo, hi = max(lo, -EXPONENT_LIMIT), min(hi, EXPONENT_LIMIT)
    if lo > hi:
        raise FormatTooNarrowError(f"{op}: no safe operand exponents in {fmt.to_config()}")
    return lo, hi


def _signs(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.where(rng.integers(0, 2, size=n) == 1, -1.0, 1.0)


def _sig(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    """Random p-bit significands in [1, 2)."""
    return sampling.random_values(rng, n, p, 0, 0, signed=False)


def _pick(cat: np.ndarray, choices: Sequence[np.ndarray]) -> np.ndarray:
    return np.choose(cat, choices)


def _product_exponents(rng, n, lo, hi, sum_lo, sum_hi):
    """Exponent pairs in [lo, hi] whose sum lies in [sum_lo, sum_hi]."""
    ea = rng.integers(lo, hi + 1, size=n)
    blo = np.maximum(lo, sum_lo - ea)
    bhi = np.minimum(hi, sum_hi - ea)
    ok = blo <= bhi
    # ea values with no admissible partner are pulled back into range
    ea = np.where(ok, ea, np.clip(ea, sum_lo - hi, sum_hi - lo))
    blo = np.maximum(lo, sum_lo - ea)
    bhi = np.minimum(hi, sum_hi - ea)
    eb = blo + np.floor(rng.random(n) * (bhi - blo + 1)).astype(np.int64)
    return ea, eb


def _sample_add12(rng, n, fmt):
    p = fmt.precision
    lo, hi = _range(fmt.emin + p, fmt.emax - 2, "add12", fmt)
    a = _signs(rng, n) * np.ldexp(_sig(rng, n, p), rng.integers(lo, hi + 1, size=n))
    ea = sampling.exponent_of(a)
    cat = rng.integers(0, 4, size=n)
    far = _signs(rng, n) * np.ldexp(_sig(rng, n, p), rng.integers(lo, hi + 1, size=n))
    eb = np.clip(ea - rng.integers(0, p + 2, size=n), lo, hi)
    near = _signs(rng, n) * np.ldexp(_sig(rng, n, p), eb)
    k = rng.integers(1, p + 1, size=n)
    cancel = -sampling.round_to_precision(a * (1.0 + _signs(rng, n) * np.ldexp(1.0, -k)), p)
    cancel = np.where(sampling.exponent_of(cancel) < lo, -a, cancel)
    # opposite-sign partner pulling a significand near 1 into the binade below
    low_sig = 1.0 + np.ldexp(rng.integers(0, 4, size=n).astype(np.float64), 1 - p)
    cross_a = np.sign(a) * np.ldexp(low_sig, ea)
    cross_b = -np.sign(a) * np.ldexp(_sig(rng, n, p),
                                      np.clip(ea - rng.integers(1, p + 2, size=n), lo, hi))
    # same-sign partner of a significand just below 2, carrying into the next binade
    top_sig = 2.0 - np.ldexp(rng.integers(1, 5, size=n).astype(np.float64), 1 - p)
    carry_a = np.sign(a) * np.ldexp(top_sig, ea)
    carry_b = np.sign(a) * np.ldexp(_sig(rng, n, p),
                                     np.clip(ea - rng.integers(0, p + 1, size=n), lo, hi))
    special = rng.integers(0, 6, size=n)
    cat = np.where(special >= 4, special, cat)
    a = np.select([cat == 4, cat == 5], [cross_a, carry_a], a)
    b = _pick(cat, [far, near, near, cancel, cross_b, carry_b])
    swap = rng.integers(0, 2, size=n) == 1
    return np.where(swap, b, a), np.where(swap, a, b)


def _sample_split(rng, n, fmt):
    p = fmt.precision
    s = default_split_point(p)
    lo, hi = _range(fmt.emin + p, fmt.emax - s - 2, "split", fmt)
    e = rng.integers(lo, hi + 1, size=n)
    ones = np.full(n, float((1 << p) - 1) / (1 << (p - 1)))
    cat = rng.integers(0, 4, size=n)
    sig = _pick(cat, [_sig(rng, n, p), _sig(rng, n, p), ones, np.ones(n)])
    return (_signs(rng, n) * np.ldexp(sig, e),)


def _mul_limits(fmt: FpFormat, op: str, extra: int = 0) -> tuple[int, int, int, int]:
    p = fmt.precision
    s = default_split_point(p)
    # extra: how far below the high word a low operand word may sit
    lo, hi = _range(fmt.emin + p + extra, fmt.emax - s - 2, op, fmt)
    # a_lo * b_lo and the cross products of mul22 stay normal
    sum_lo, sum_hi = fmt.emin + 2 * p + 4 + extra, fmt.emax - 2
    if max(sum_lo, 2 * lo) > min(sum_hi, 2 * hi):
        raise FormatTooNarrowError(f"{op}: no safe operand exponents in {fmt.to_config()}")
    return lo, hi, sum_lo, sum_hi


def _sample_mul12(rng, n, fmt):
    p = fmt.precision
    lo, hi, sum_lo, sum_hi = _mul_limits(fmt, "mul12")
    ea, eb = _product_exponents(rng, n, lo, hi, sum_lo, sum_hi)
    ones = np.full(n, float((1 << p) - 1) / (1 << (p - 1)))
    m = rng.integers(1, p, size=n)
    cat = rng.integers(0, 4, size=n)
    sa = _pick(cat, [_sig(rng, n, p), _sig(rng, n, p), ones, 1.0 + np.ldexp(1.0, -m)])
    sb = _pick(cat, [_sig(rng, n, p), ones, ones, 1.0 + np.ldexp(1.0, -(p - m))])
    return (_signs(rng, n) * np.ldexp(sa, ea), _signs(rng, n) * np.ldexp(sb, eb))


def _low_part(rng, n, p, high: np.ndarray) -> np.ndarray:
    """Random low words strictly below half an ulp of ``high``."""
    off = rng.integers(1, p + 1, size=n)
    lo = _signs(rng, n) * np.ldexp(_sig(rng, n, p), sampling.exponent_of(high) - p - off)
    return np.where(rng.integers(0, 8, size=n) == 0, 0.0, lo)


def _sample_add22(rng, n, fmt):
    p = fmt.precision
    lo, hi = _range(fmt.emin + 3 * p + 2, fmt.emax - 3, "add22", fmt)
    ah = _signs(rng, n) * np.ldexp(_sig(rng, n, p), rng.integers(lo, hi + 1, size=n))
    ea = sampling.exponent_of(ah)
    cat = rng.integers(0, 4, size=n)
    far = _signs(rng, n) * np.ldexp(_sig(rng, n, p), rng.integers(lo, hi + 1, size=n))
    near = _signs(rng, n) * np.ldexp(_sig(rng, n, p),
                                     np.clip(ea - rng.integers(0, p + 2, size=n), lo, hi))
    k = rng.integers(1, p + 1, size=n)
    close = -sampling.round_to_precision(ah * (1.0 + _signs(rng, n) * np.ldexp(1.0, -k)), p)
    close = np.where(sampling.exponent_of(close) < lo, -ah, close)
    opposite = np.where(rng.integers(0, 2, size=n) == 1, -ah, close)
    bh = _pick(cat, [far, near, close, opposite])
    return ah, _low_part(rng, n, p, ah), bh, _low_part(rng, n, p, bh)


def _sample_mul22(rng, n, fmt):
    p = fmt.precision
    lo, hi, sum_lo, sum_hi = _mul_limits(fmt, "mul22", p)
    ea, eb = _product_exponents(rng, n, lo, hi, sum_lo, sum_hi)
    ones = np.full(n, float((1 << p) - 1) / (1 << (p - 1)))
    cat = rng.integers(0, 4, size=n)
    sa = _pick(cat, [_sig(rng, n, p), _sig(rng, n, p), ones, np.ones(n)])
    sb = _pick(cat, [_sig(rng, n, p), ones, ones, _sig(rng, n, p)])
    ah = _signs(rng, n) * np.ldexp(sa, ea)
    bh = _signs(rng, n) * np.ldexp(sb, eb)
    return ah, _low_part(rng, n, p, ah), bh, _low_part(rng, n, p, bh)


_SAMPLERS: dict[str, Callable] = {
    "add12": _sample_add12, "mul12": _sample_mul12, "split": _sample_split,
    "add22": _sample_add22, "mul22": _sample_mul22,
}


def sample_operands(op: str, fmt: FpFormat, samples: int, seed: int):
    """Yield chunks of float64 operand arrays for ``op``, exact in ``fmt``."""
    sampler = _SAMPLERS[_check_op(op)]
    yield from sampling.stream(seed, samples, lambda r, n: sampler(r, n, fmt))


def denormal_free(values: np.ndarray, fmt: FpFormat) -> bool:
    """True when every value is zero or at least the smallest normal in magnitude."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    return bool(np.all((a == 0) | (a >= math.ldexp(1.0, fmt.emin))))


def _check_op(op: str) -> str:
    if op not in _ARITY:
        raise UnknownOpError(f"unknown operator {op!r}; expected one of {', '.join(ACCURACY_OPS)}")
    return op


# -- evaluation ----------------------------------------------------------------


def _prepare(op: str, B: Backend, ins: tuple) -> tuple:
    """Normalize float-float operands; other operators take inputs as drawn."""
    if op in ("add22", "mul22"):
        ah, al = add12(ins[0], ins[1], B)
        bh, bl = add12(ins[2], ins[3], B)
        return ah, al, bh, bl
    return ins


def _kernel(op: str, B: Backend, ins: tuple) -> tuple:
    if op == "add12":
        return tuple(add12(ins[0], ins[1], B))
    if op == "mul12":
        return tuple(mul12(ins[0], ins[1], B))
    if op == "split":
        return tuple(split(ins[0], backend=B))
    a, b = FloatFloat(ins[0], ins[1]), FloatFloat(ins[2], ins[3])
    r = add22(a, b, B) if op == "add22" else mul22(a, b, B)
    return r.hi, r.lo


def _scale(fmt: FpFormat) -> int:
    # every value of the format is an integer multiple of 2**-scale
    return max(0, fmt.precision - 1 - fmt.emin)


def _as_ints(x, K: int) -> list[int]:
    if isinstance(x, np.ndarray):
        return [int(v) for v in (x.astype(np.float64) * 2.0 ** K).tolist()]
    if isinstance(x, SimArray):
        return [m << (q + K) for m, q in zip(x.m.tolist(), x.q.tolist())]
    return [v._m << (v._q + K) for v in x]


def _vectorizable(B: Backend) -> bool:
    return isinstance(B, NativeBackend) or B.fmt.precision <= simarray.MAX_PRECISION


def _evaluate_chunk(op: str, B: Backend, raw: tuple, K: int):
    """Exact integer images of the prepared inputs and outputs.

    Returns ``(inputs, outputs, skipped)`` where inputs and outputs are
    lists of per-sample tuples.  Samples that overflow are dropped.
    """
    if _vectorizable(B):
        try:
            ins = _prepare(op, B, tuple(B.const(a) for a in raw))
            outs = _kernel(op, B, ins)
            return (list(zip(*(_as_ints(x, K) for x in ins))),
                    list(zip(*(_as_ints(x, K) for x in outs))), 0)
        except ArithmeticError:
            pass
    cols = [a.tolist() for a in raw]
    in_rows, out_rows, skipped = [], [], 0
    for vals in zip(*cols):
        try:
            ins = _prepare(op, B, tuple(B.const(v) for v in vals))
            outs = _kernel(op, B, ins)
        except ArithmeticError:
            skipped += 1
            continue
        in_rows.append(tuple(_scalar_int(B, v, K) for v in ins))
        out_rows.append(tuple(_scalar_int(B, v, K) for v in outs))
    return in_rows, out_rows, skipped


def _scalar_int(B: Backend, v, K: int) -> int:
    if isinstance(v, SimFloat):
        return v._m << (v._q + K)
    d = B.to_dyadic(v)
    return d.mantissa << (d.exponent + K)


def _width(v: int) -> int:
    """Significant bits of a nonzero integer."""
    v = abs(v)
    return (v >> ((v & -v).bit_length() - 1)).bit_length() if v else 0


def _log2_ratio(num: int, den: int) -> float:
    if not num:
        return -math.inf
    if not den:
        return math.inf
    return math.log2(abs(num)) - math.log2(abs(den))


class _Checker:
    """Per-sample error and bound test on exact integer images."""

    def __init__(self, op: str, fmt: FpFormat, K: int) -> None:
        self.op = op
        self.p = fmt.precision
        self.K = K
        self.s = default_split_point(self.p)
        self.rel = 2 * self.p - 4  # mul22/add22 relative term is 2**-(2p-4)

    def __call__(self, ins: tuple, outs: tuple) -> tuple[float, bool, float | None]:
        """``(error_bits, violated, margin_bits)`` for one sample."""
        op = self.op
        if op == "add12":
            exact = ins[0] + ins[1]
            d = outs[0] + outs[1] - exact
            return _log2_ratio(d, exact), d != 0, None
        if op == "mul12":
            exact = ins[0] * ins[1]
            d = ((outs[0] + outs[1]) << self.K) - exact
            return _log2_ratio(d, exact), d != 0, None
        if op == "split":
            d = outs[0] + outs[1] - ins[0]
            bad = d != 0 or _width(outs[0]) > self.p - self.s or _width(outs[1]) > self.s
            return _log2_ratio(d, ins[0]), bad, None
        if op == "mul22":
            exact = (ins[0] + ins[1]) * (ins[2] + ins[3])
            d = ((outs[0] + outs[1]) << self.K) - exact
            return _log2_ratio(d, exact), abs(d) << self.rel > abs(exact), None
        # add22: |d| <= max(2**-p |al + bl|, 2**-(2p-4) |a + b|)
        exact = ins[0] + ins[1] + ins[2] + ins[3]
        d = outs[0] + outs[1] - exact
        if not d:
            return -math.inf, False, -math.inf
        low = abs(ins[1] + ins[3])
        # bound * 2**(2p-4) = max(low * 2**(p-4), |exact|)
        scaled = max(low << (self.p - 4) if self.p >= 4 else low >> (4 - self.p), abs(exact))
        margin = _log2_ratio(abs(d) << self.rel, scaled)
        return _log2_ratio(d, exact), margin > 0, margin


def _bound_bits(op: str, fmt: FpFormat) -> float | None:
    if op in ("add12", "mul12", "split"):
        return -math.inf
    if op == "mul22":
        return float(4 - 2 * fmt.precision)
    return None


def run_accuracy(op: str, backend: Backend | None = None,
                 samples: int = DEFAULT_ACCURACY_SAMPLES, seed: int | None = None) -> AccuracyReport:
    """Evaluate ``op`` on ``samples`` seeded operand sets and check its bound.

    Exactness is the bound for add12, mul12 and split (split also checks
    the (p - s)/s bit widths of its halves); mul22 must stay within
    ``2**(4 - 2p)`` relative error, add22 within its two-term bound.
    """
    _check_op(op)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    B = backend or native_backend()
    seed = sampling.default_seed() if seed is None else seed
    fmt = B.fmt
    K = _scale(fmt)
    check = _Checker(op, fmt, K)

    def hexes(row):
        return tuple(Dyadic(v, -K).hex() for v in row)

    max_bits, worst = -math.inf, None
    margin_max = -math.inf if op == "add22" else None
    violations = skipped = 0
    first = None
    for raw in sample_operands(op, fmt, samples, seed):
        for a in raw:
            if not denormal_free(a, fmt):
                raise AssertionError("sampled operand is subnormal")
        in_rows, out_rows, sk = _evaluate_chunk(op, B, raw, K)
        skipped += sk
        for ins, outs in zip(in_rows, out_rows):
            bits, bad, margin = check(ins, outs)
            if worst is None or bits > max_bits:
                max_bits, worst = bits, ins
            if margin is not None and margin > margin_max:
                margin_max = margin
            if bad:
                violations += 1
                if first is None:
                    first = ins
    return AccuracyReport(
        op=op, backend=B.describe(), samples=samples, seed=seed,
        max_error_bits=max_bits, bound_bits=_bound_bits(op, fmt),
        violations=violations, worst_case=hexes(worst) if worst else (),
        worst_margin_bits=margin_max,
        first_violation=hexes(first) if first else None, skipped=skipped)


def evaluate_case(op: str, operands: Sequence[str | float], backend: Backend | None = None) -> float:
    """Error in bits of ``op`` on one operand tuple (hex strings or floats).

    Float-float operands are taken as already normalized pairs.
    """
    _check_op(op)
    B = backend or native_backend()
    K = _scale(B.fmt)
    vals = [float.fromhex(v) if isinstance(v, str) else float(v) for v in operands]
    if len(vals) != _ARITY[op]:
        raise ValueError(f"{op} takes {_ARITY[op]} operands")
    ins = tuple(B.const(v) for v in vals)
    outs = _kernel(op, B, ins)
    bits, _, _ = _Checker(op, B.fmt, K)(
        tuple(_scalar_int(B, v, K) for v in ins), tuple(_scalar_int(B, v, K) for v in outs))
    return bits


# -- benchmarks ------------------------------------------------------------------


@dataclass(frozen=True)
class BenchCell:
    op: str
    size: int
    seconds: float
    ratio: float


@dataclass(frozen=True)
class BenchReport:
    """Median wall times per (size, op), normalized to addition at 4096."""

    backend: str
    ops: tuple[str, ...]
    sizes: tuple[int, ...]
    reps: int
    cells: tuple[BenchCell, ...]
    baseline_seconds: float
    timer_resolution: float
    method: str = "median of reps, single thread, vectors pre-generated"

    def ratio(self, op: str, size: int) -> float:
        for c in self.cells:
            if c.op == op and c.size == size:
                return c.ratio
        raise KeyError((op, size))

    def record(self) -> dict[str, Any]:
        return {
            "backend": self.backend,
            "ops": list(self.ops),
            "sizes": list(self.sizes),
            "reps": self.reps,
            "method": self.method,
            "baseline": {"op": "add", "size": 4096,
                         "seconds": {"hex": self.baseline_seconds.hex(),
                                     "decimal": f"{self.baseline_seconds:.6e}"}},
            "timer_resolution": {"hex": self.timer_resolution.hex(),
                                 "decimal": f"{self.timer_resolution:.3e}"},
            "cells": [{"op": c.op, "size": c.size,
                       "seconds": {"hex": c.seconds.hex(), "decimal": f"{c.seconds:.6e}"},
                       "ratio": f"{c.ratio:.2f}"} for c in self.cells],
        }


# fields that vary from run to run
TIMING_FIELDS = ("seconds", "baseline", "timer_resolution", "ratio")


def format_bench(report: BenchReport) -> str:
    """Size-by-operator table of normalized times."""
    lines = [f"{'Size':>8}" + "".join(f"{op:>9}" for op in report.ops)]
    for size in report.sizes:
        lines.append(f"{size:>8}" + "".join(f"{report.ratio(op, size):>9.2f}" for op in report.ops))
    lines.append(f"normalized to add at 4096 ({report.baseline_seconds:.3e} s); "
                 f"{report.method}, reps={report.reps}, backend {report.backend}")
    return "\n".join(lines)


def _bench_kernel(op: str, B: Backend) -> Callable:
    if op == "add":
        return lambda ah, al, bh, bl: B.add(ah, bh)
    if op == "mul":
        return lambda ah, al, bh, bl: B.mul(ah, bh)
    if op == "mad":
        return lambda ah, al, bh, bl: B.add(B.mul(ah, bh), al)
    if op == "add12":
        return lambda ah, al, bh, bl: add12(ah, bh, B)
    if op == "mul12":
        return lambda ah, al, bh, bl: mul12(ah, bh, B)
    if op == "add22":
        return lambda ah, al, bh, bl: add22(FloatFloat(ah, al), FloatFloat(bh, bl), B)
    if op == "mul22":
        return lambda ah, al, bh, bl: mul22(FloatFloat(ah, al), FloatFloat(bh, bl), B)
    raise UnknownOpError(f"unknown bench operator {op!r}; expected one of {', '.join(BENCH_OPS)}")


def _bench_inputs(B: Backend, size: int, seed: int) -> tuple:
    p = B.fmt.precision
    rng = sampling.chunk_rng(seed, 0)
    ah = sampling.random_values(rng, size, p, -20, 20)
    bh = sampling.random_values(rng, size, p, -20, 20)
    al = sampling.random_values(rng, size, p, -20 - 2 * p, -20 - p)
    bl = sampling.random_values(rng, size, p, -20 - 2 * p, -20 - p)
    return tuple(B.const(x) for x in (ah, al, bh, bl))


def _time(fn: Callable, args: tuple, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def run_bench(ops: Sequence[str] = BENCH_OPS, sizes: Sequence[int] = BENCH_SIZES,
              reps: int = 5, backend: Backend | None = None, seed: int | None = None) -> BenchReport:
    """Time each operator elementwise over vectors of each size."""
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    if reps < 3:
        raise ValueError("reps must be >= 3")
    B = backend or native_backend()
    if isinstance(B, SimBackend) and B.fmt.precision > simarray.MAX_PRECISION:
        raise ValueError("benchmarks need a vectorizable backend (precision <= 24)")
    seed = sampling.default_seed() if seed is None else seed
    kernels = {op: _bench_kernel(op, B) for op in ops}
    base_in = _bench_inputs(B, 4096, seed)
    add = _bench_kernel("add", B)
    add(*base_in)  # warm-up
    baseline = _time(add, base_in, reps)
    cells = []
    for size in sizes:
        args = base_in if size == 4096 else _bench_inputs(B, size, seed)
        for op in ops:
            if op == "add" and size == 4096:
                t = baseline
            else:
                kernels[op](*args)
                t = _time(kernels[op], args, reps)
            cells.append(BenchCell(op, size, t, t / baseline))
    return BenchReport(B.describe(), tuple(ops), tuple(sizes), reps, tuple(cells),
                       baseline, time.get_clock_info("perf_counter").resolution)


def exhaustive_octave(fmt: FpFormat, exponent: int = 0) -> dict[str, tuple[int, int]]:
    """Check add12, mul12 and split on every operand (pair) of one binade.

    Operands are all signed values in ``[2**exponent, 2**(exponent + 1))``,
    compared against the dyadic oracle.  Returns ``{op: (cases, failures)}``.
    """
    B = SimBackend(fmt)
    p = fmt.precision
    s = default_split_point(p)
    values = [sign * math.ldexp(m, exponent - p + 1)
              for m in range(1 << (p - 1), 1 << p) for sign in (1, -1)]
    xs = [B.const(v) for v in values]
    exact = [B.to_dyadic(x) for x in xs]
    bad = {"add12": 0, "mul12": 0, "split": 0}
    for x, dx in zip(xs, exact):
        hi, lo = split(x, s, B)
        dh, dl = B.to_dyadic(hi), B.to_dyadic(lo)
        if dh + dl != dx or _width(dh.significand) > p - s or _width(dl.significand) > s:
            bad["split"] += 1
        for y, dy in zip(xs, exact):
            h, l = add12(x, y, B)
            if B.to_dyadic(h) + B.to_dyadic(l) != dx + dy:
                bad["add12"] += 1
            h, l = mul12(x, y, B)
            if B.to_dyadic(h) + B.to_dyadic(l) != dx * dy:
                bad["mul12"] += 1
    n = len(values)
    return {"add12": (n * n, bad["add12"]), "mul12": (n * n, bad["mul12"]),
            "split": (n, bad["split"])}


# -- self test -------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    violations: int
    witness: tuple[str, ...] | None = None
    note: str = ""

    def record(self) -> dict[str, Any]:
        return {"check": self.name, "samples": self.samples, "violations": self.violations,
                "witness": list(self.witness) if self.witness else None, "note": self.note}


@dataclass(frozen=True)
class SelftestReport:
    backend: str
    seed: int
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.violations == 0 for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def record(self) -> dict[str, Any]:
        return {"backend": self.backend, "seed": self.seed, "passed": self.passed,
                "checks": [c.record() for c in self.checks]}


SELFTEST_CHECKS = ("sterbenz", "add12", "mul12", "split", "add22", "mul22", "probe")


def _sample_sterbenz(rng, n, fmt):
    p = fmt.precision
    lo, hi = _range(fmt.emin + 2, fmt.emax - 2, "sterbenz", fmt)
    y = np.ldexp(_sig(rng, n, p), rng.integers(lo, hi + 1, size=n))
    x = np.ldexp(_sig(rng, n, p), sampling.exponent_of(y) + rng.integers(-1, 2, size=n))
    x = np.clip(x, y / 2, 2 * y)
    s = _signs(rng, n)
    return s * x, s * y


def check_sterbenz(backend: Backend, samples: int, seed: int) -> CheckResult:
    """x - y must be exact whenever y/2 <= x <= 2y."""
    B = backend
    K = _scale(B.fmt)
    bad, witness = 0, None
    for x, y in sampling.stream(seed, samples, lambda r, n: _sample_sterbenz(r, n, B.fmt)):
        if _vectorizable(B):
            xs, ys = B.const(x), B.const(y)
            rows = zip(_as_ints(xs, K), _as_ints(ys, K), _as_ints(B.sub(xs, ys), K))
        else:
            rows = []
            for u, v in zip(x.tolist(), y.tolist()):
                us, vs = B.const(u), B.const(v)
                rows.append((_scalar_int(B, us, K), _scalar_int(B, vs, K),
                             _scalar_int(B, B.sub(us, vs), K)))
        for xi, yi, di in rows:
            if di != xi - yi:
                bad += 1
                if witness is None:
                    witness = (Dyadic(xi, -K).hex(), Dyadic(yi, -K).hex())
    return CheckResult("sterbenz", samples, bad, witness)


def _probe_check(backend: Backend, samples: int, seed: int) -> CheckResult:
    from .probe import Op, probe_op
    # faithful envelope assumed by the float-float algorithms
    bad, witness, notes = 0, None, []
    for op in (Op.ADD, Op.SUB, Op.MUL):
        r = probe_op(backend, op, samples, seed)
        notes.append(f"{op.value} [{float(r.lo_ulps):.4f}, {float(r.hi_ulps):.4f}]")
        for v, w in ((r.lo_ulps, r.lo_witness), (r.hi_ulps, r.hi_witness)):
            if not -1 < v < 1:
                bad += 1
                witness = witness or (op.value, *w)
    return CheckResult("probe", samples, bad, witness, "; ".join(notes))


def run_selftest(backend: Backend | None = None, samples: int = 100_000,
                 seed: int | None = None, checks: Sequence[str] | None = None) -> SelftestReport:
    """Run the invariant suite; any violation fails the report."""
    B = backend or native_backend()
    seed = sampling.default_seed() if seed is None else seed
    names = tuple(checks) if checks else SELFTEST_CHECKS
    results = []
    for name in names:
        if name == "sterbenz":
            results.append(check_sterbenz(B, samples, seed))
        elif name == "probe":
            results.append(_probe_check(B, samples, seed))
        elif name in _ARITY:
            try:
                r = run_accuracy(name, B, samples, seed)
            except (FormatTooNarrowError, ValueError) as exc:
                results.append(CheckResult(name, 0, 0, None, f"not applicable: {exc}"))
                continue
            results.append(CheckResult(name, samples, r.violations, r.first_violation,
                                       f"max error {format_error_bits(r.max_error_bits)} bits"))
        else:
            raise UnknownOpError(f"unknown check {name!r}; expected one of {', '.join(SELFTEST_CHECKS)}")
    return SelftestReport(B.describe(), seed, tuple(results))


def format_selftest(report: SelftestReport) -> str:
    lines = [f"{'Check':<10}{'Violations':>12}{'Samples':>10}  Detail"]
    for c in report.checks:
        detail = c.note
        if c.witness:
            detail = (detail + "; " if detail else "") + "witness " + ", ".join(c.witness)
        lines.append(f"{c.name:<10}{c.violations:>12}{c.samples:>10}  {detail}")
    lines.append(f"{'PASS' if report.passed else 'FAIL'} backend {report.backend}, seed {report.seed}")
    return "\n".join(lines)
