"""Paranoia-style measurement of per-operation rounding error in ulps.

For each operation the probe draws operand pairs from a fixed stimulus mix,
runs the backend, measures ``(computed - exact) / ulp(computed)`` against
the exact oracle and keeps the extreme values.  Operands are positive, as
in the classic paranoia stimuli, so chopped addition and multiplication
err only downward while chopped subtraction, whose result takes either
sign, errs in both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Iterable

import numpy as np

from . import sampling, simarray
from .fpmodel import Backend, FpOverflowError, NativeBackend
from .fpmodel import round as fp_round
from .oracle import Dyadic, error_ulps, format_fraction

STIMULI_VERSION = 1


class Op(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


_LABEL = {Op.ADD: "Addition", Op.SUB: "Subtraction",
          Op.MUL: "Multiplication", Op.DIV: "Division"}


@dataclass(frozen=True)
class UlpInterval:
    op: Op
    lo_ulps: Fraction
    hi_ulps: Fraction
    samples: int
    seed: int
    skipped: int = 0
    lo_witness: tuple[str, str] | None = field(default=None, compare=False)
    hi_witness: tuple[str, str] | None = field(default=None, compare=False)

    @property
    def width(self) -> Fraction:
        return self.hi_ulps - self.lo_ulps

    def contains(self, err: Fraction) -> bool:
        return self.lo_ulps <= err <= self.hi_ulps

    def merge(self, other: UlpInterval) -> UlpInterval:
        """Combine intervals measured on disjoint sample ranges."""
        if other.op is not self.op:
            raise ValueError("cannot merge intervals of different operations")
        lo, low = ((self.lo_ulps, self.lo_witness) if self.lo_ulps <= other.lo_ulps
                   else (other.lo_ulps, other.lo_witness))
        hi, hiw = ((self.hi_ulps, self.hi_witness) if self.hi_ulps >= other.hi_ulps
                   else (other.hi_ulps, other.hi_witness))
        return UlpInterval(self.op, lo, hi, self.samples + other.samples,
                           self.seed, self.skipped + other.skipped, low, hiw)

    def record(self) -> dict[str, Any]:
        return {
            "op": self.op.value,
            "lo_ulps": format_fraction(self.lo_ulps),
            "hi_ulps": format_fraction(self.hi_ulps),
            "lo_ulps_decimal": f"{float(self.lo_ulps):.6f}",
            "hi_ulps_decimal": f"{float(self.hi_ulps):.6f}",
            "samples": self.samples,
            "skipped": self.skipped,
            "seed": self.seed,
            "stimuli_version": STIMULI_VERSION,
            "lo_witness": list(self.lo_witness) if self.lo_witness else None,
            "hi_witness": list(self.hi_witness) if self.hi_witness else None,
        }


def _exponent_range(fmt, op: Op) -> tuple[int, int]:
    if op in (Op.ADD, Op.SUB):
        # partners sit up to p+1 binades lower and tie addends p below those
        lo, hi = fmt.emin + 2 * fmt.precision + 1, fmt.emax - 2
    else:
        # products and quotients stay inside the normal range
        span = max(1, min(fmt.emax - 2, -fmt.emin - 1) // 2 - 1)
        lo, hi = -span, span
    lo, hi = max(lo, -60), min(hi, 60)
    if lo > hi:
        raise ValueError(f"format {fmt.to_config()} is too narrow for {op.value} stimuli")
    return lo, hi


def stimuli(rng: np.random.Generator, n: int, op: Op, fmt) -> tuple[np.ndarray, np.ndarray]:
    """Positive operand pairs, exactly representable in ``fmt``.

    Mix (by category drawn per sample):
      0-3  random significands; add/sub partners within p+1 binades
      4    near-cancellation pairs x, x(1 +- 2**-k), k in 1..p
      5    all-ones significands
      6    exact ties (half-ulp addends, (1+2**-m)(1+2**-n) with m+n = p)
      7    powers of two against random partners
    """
    p = fmt.precision
    elo, ehi = _exponent_range(fmt, op)
    cat = rng.integers(0, 8, size=n)
    a = sampling.random_values(rng, n, p, elo, ehi, signed=False)
    ea = sampling.exponent_of(a)
    if op in (Op.ADD, Op.SUB):
        gap = rng.integers(0, p + 2, size=n)
        b = sampling.random_values(rng, n, p, 0, 0, signed=False)
        b = np.ldexp(b, ea - gap)
        swap = rng.integers(0, 2, size=n).astype(bool)
        a, b = np.where(swap, b, a), np.where(swap, a, b)
    else:
        b = sampling.random_values(rng, n, p, elo, ehi, signed=False)
    ea = sampling.exponent_of(a)

    k = rng.integers(1, p + 1, size=n)
    sgn = np.where(rng.integers(0, 2, size=n) == 1, 1.0, -1.0)
    near = sampling.round_to_precision(a * (1.0 + sgn * np.ldexp(1.0, -k)), p)

    ones = np.ldexp(float((1 << p) - 1), ea - p + 1)
    ones_b = np.where(rng.integers(0, 2, size=n) == 1,
                      np.ldexp(float((1 << p) - 1), sampling.exponent_of(b) - p + 1), b)

    if op in (Op.ADD, Op.SUB):
        odd = 2 * rng.integers(0, 2, size=n) + 1
        tie_b = np.ldexp(odd.astype(np.float64), ea - p)
        tie_a = a
    else:
        m = rng.integers(1, p, size=n)
        tie_a = np.ldexp(1.0 + np.ldexp(1.0, -m), ea)
        tie_b = np.ldexp(1.0 + np.ldexp(1.0, -(p - m)), sampling.exponent_of(b))

    pow2 = np.ldexp(1.0, ea)

    a_out = np.select([cat == 4, cat == 5, cat == 6, cat == 7],
                      [a, ones, tie_a, pow2], a)
    b_out = np.select([cat == 4, cat == 5, cat == 6, cat == 7],
                      [near, ones_b, tie_b, b], b)
    return a_out, b_out


_NUMPY_OP = {Op.ADD: np.add, Op.SUB: np.subtract, Op.MUL: np.multiply,
             Op.DIV: np.divide}


def _exact(op: Op, da: Dyadic, db: Dyadic):
    if op is Op.ADD:
        return da + db
    if op is Op.SUB:
        return da - db
    if op is Op.MUL:
        return da * db
    return da.to_fraction() / db.to_fraction()


def exact_error(op: Op, a, b, c, fmt) -> Fraction:
    """Oracle error of ``c = a op b`` in ulps of ``c``."""
    da, db, dc = Dyadic.coerce(a), Dyadic.coerce(b), Dyadic.coerce(c)
    exact = _exact(op, da, db)
    if not dc and not exact:
        # x - x
        return Fraction(0)
    return error_ulps(dc, exact, fmt)


def _stream(backend: Backend, op: Op, samples: int, seed: int, chunks=None):
    fmt = backend.fmt
    make = lambda r, n: stimuli(r, n, op, fmt)  # noqa: E731
    if chunks is None:
        yield from sampling.stream(seed, samples, make)
        return
    for k in chunks:
        take = min(sampling.CHUNK, samples - k * sampling.CHUNK)
        a, b = make(sampling.chunk_rng(seed, k), sampling.CHUNK)
        yield a[:take], b[:take]


def _vector_results(backend: Backend, op: Op, a: np.ndarray, b: np.ndarray):
    """Computed results as float64, or None when the chunk needs the scalar path."""
    if isinstance(backend, NativeBackend):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return _NUMPY_OP[op](a.astype(np.float32), b.astype(np.float32),
                                 dtype=np.float32).astype(np.float64)
    if backend.fmt.precision > simarray.MAX_PRECISION:
        return None
    fn = {Op.ADD: simarray.add, Op.SUB: simarray.sub, Op.MUL: simarray.mul,
          Op.DIV: simarray.div}[op]
    fmt = backend.fmt
    try:
        return fn(simarray.from_float(a, fmt), simarray.from_float(b, fmt), fmt).to_float()
    except FpOverflowError:
        return None


def sample_errors(backend: Backend, op: Op | str, samples: int, seed: int):
    """Yield ``(a, b, error_ulps)`` for every sample, each through the oracle.

    ``error`` is None for samples whose result overflows.
    """
    op = Op(op)
    fmt = backend.fmt
    binop = {Op.ADD: backend.add, Op.SUB: backend.sub,
             Op.MUL: backend.mul, Op.DIV: backend.div}[op]
    native = isinstance(backend, NativeBackend)
    for a, b in _stream(backend, op, samples, seed):
        for x, y in zip(a.tolist(), b.tolist()):
            if native:
                xs, ys = np.float32(x), np.float32(y)
            else:
                xs, ys = fp_round(x, fmt), fp_round(y, fmt)
            try:
                c = binop(xs, ys)
            except FpOverflowError:
                yield x, y, None
                continue
            yield x, y, exact_error(op, x, y, backend.to_dyadic(c), fmt)


def _ulp_array(c: np.ndarray, fmt) -> np.ndarray:
    e = np.where(c == 0, fmt.emin, np.frexp(c)[1] - 1)
    return np.ldexp(1.0, np.maximum(e, fmt.emin) - fmt.precision + 1)


# float64 screening error is below 2**-28 ulp; candidates within this margin of
# a chunk extreme are re-evaluated exactly
_SCREEN_MARGIN = 1e-6


class _Extremes:
    def __init__(self) -> None:
        self.lo = self.hi = None
        self.lo_w = self.hi_w = None
        self.skipped = 0

    def offer(self, err: Fraction, x: float, y: float) -> None:
        if self.lo is None or err < self.lo:
            self.lo, self.lo_w = err, (x, y)
        if self.hi is None or err > self.hi:
            self.hi, self.hi_w = err, (x, y)


def _probe_chunk(backend: Backend, op: Op, a: np.ndarray, b: np.ndarray,
                 acc: _Extremes) -> None:
    fmt = backend.fmt
    c = _vector_results(backend, op, a, b)
    if c is None:
        binop = {Op.ADD: backend.add, Op.SUB: backend.sub,
                 Op.MUL: backend.mul, Op.DIV: backend.div}[op]
        for x, y in zip(a.tolist(), b.tolist()):
            try:
                r = binop(fp_round(x, fmt), fp_round(y, fmt))
            except FpOverflowError:
                acc.skipped += 1
                continue
            acc.offer(exact_error(op, x, y, r.to_dyadic(), fmt), x, y)
        return
    finite = np.isfinite(c)
    acc.skipped += int(np.count_nonzero(~finite))
    if not finite.any():
        return
    a, b, c = a[finite], b[finite], c[finite]
    with np.errstate(divide="ignore", invalid="ignore"):
        approx = (c - _NUMPY_OP[op](a, b)) / _ulp_array(c, fmt)
    lo_cut = approx.min() + _SCREEN_MARGIN
    hi_cut = approx.max() - _SCREEN_MARGIN
    idx = np.flatnonzero((approx <= lo_cut) | (approx >= hi_cut))
    for i in idx.tolist():
        x, y = float(a[i]), float(b[i])
        acc.offer(exact_error(op, x, y, float(c[i]), fmt), x, y)


def _interval(op: Op, acc: _Extremes, samples: int, seed: int) -> UlpInterval:
    def hexes(w):
        return None if w is None else (Dyadic.from_float(w[0]).hex(),
                                       Dyadic.from_float(w[1]).hex())
    lo = acc.lo if acc.lo is not None else Fraction(0)
    hi = acc.hi if acc.hi is not None else Fraction(0)
    return UlpInterval(op, lo, hi, samples, seed, acc.skipped,
                       hexes(acc.lo_w), hexes(acc.hi_w))


def probe_chunks(backend: Backend, op: Op | str, samples: int, seed: int,
                 chunks: Iterable[int]) -> UlpInterval:
    """Interval over a subset of the stream's chunks (for partitioned runs).

    ``samples`` is the size of the whole run; the result's ``samples`` field
    counts only the draws in ``chunks``.
    """
    op = Op(op)
    chunks = list(chunks)
    acc = _Extremes()
    n = 0
    for a, b in _stream(backend, op, samples, seed, chunks):
        n += len(a)
        _probe_chunk(backend, op, a, b, acc)
    return _interval(op, acc, n, seed)


def probe_op(backend: Backend, op: Op | str, samples: int, seed: int,
             workers: int = 1) -> UlpInterval:
    """Extreme ulp errors of ``op`` over ``samples`` seeded stimuli.

    Deterministic in ``(backend, op, samples, seed)``; with ``workers > 1``
    the chunk range is split across processes and the partial intervals are
    merged, which gives the same endpoints as a sequential run.
    """
    op = Op(op)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    nchunks = -(-samples // sampling.CHUNK)
    if workers <= 1 or nchunks == 1:
        return probe_chunks(backend, op, samples, seed, range(nchunks))
    parts = [range(i, nchunks, workers) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(probe_chunks, [backend] * workers, [op] * workers,
                                [samples] * workers, [seed] * workers, parts))
    out = results[0]
    for r in results[1:]:
        if r.samples:
            out = out.merge(r) if out.samples else r
    return out


def probe_report(backend: Backend, samples: int, seed: int,
                 workers: int = 1) -> list[UlpInterval]:
    """One interval per operation, in add/sub/mul/div order."""
    return [probe_op(backend, op, samples, seed, workers) for op in Op]


def format_report(rows: list[UlpInterval], title: str = "") -> str:
    """Plain-text table shaped like the paranoia summary."""
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'Operation':<16}{'Error (ulps)':<30}{'samples':>10}")
    for r in rows:
        interval = f"[{float(r.lo_ulps):.4f}, {float(r.hi_ulps):.4f}]"
        lines.append(f"{_LABEL[r.op]:<16}{interval:<30}{r.samples:>10}")
    return "\n".join(lines)
