"""Seeded operand streams.

Samples come in fixed-size chunks; chunk ``k`` of seed ``s`` is drawn from
its own Philox counter-based generator keyed by ``(s, k)``.  The first ``n``
samples of a stream therefore do not depend on how many samples are
requested in total, and chunks can be produced by independent workers.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterator

import numpy as np

CHUNK = 4096
SEED_ENV = "FLOATFLOAT_SEED"
_DEFAULT_SEED = 20050901


def default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env, 0) & ((1 << 64) - 1)
    return _DEFAULT_SEED


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed | (index << 64)))


def stream(seed: int, samples: int,
           make_chunk: Callable[[np.random.Generator, int], tuple],
           first_chunk: int = 0) -> Iterator[tuple]:
    """Yield tuples of arrays covering ``samples`` draws in chunk order."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    k = first_chunk
    remaining = samples
    while remaining > 0:
        arrays = make_chunk(chunk_rng(seed, k), CHUNK)
        take = min(CHUNK, remaining)
        yield tuple(a[:take] for a in arrays)
        remaining -= take
        k += 1


def round_to_precision(x: np.ndarray, p: int) -> np.ndarray:
    """Round float64 values to ``p`` significant bits, ties to even."""
    m, e = np.frexp(x)
    return np.ldexp(np.rint(np.ldexp(m, p)), e - p)


def random_values(rng: np.random.Generator, n: int, p: int,
                  elo: int, ehi: int, signed: bool = True) -> np.ndarray:
    """Values with a uniform ``p``-bit significand and uniform exponent.

    Results are float64 and exactly representable with ``p`` bits.
    """
    sig = rng.integers(1 << (p - 1), 1 << p, size=n, dtype=np.int64)
    exps = rng.integers(elo, ehi + 1, size=n)
    x = np.ldexp(sig.astype(np.float64), exps - (p - 1))
    if signed:
        x = np.where(rng.integers(0, 2, size=n).astype(bool), -x, x)
    return x


def exponent_of(x: np.ndarray) -> np.ndarray:
    """floor(log2|x|) for nonzero float64 values."""
    return np.frexp(x)[1] - 1
