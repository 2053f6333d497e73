from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floatfloat import sampling
from floatfloat.fpmodel import native_backend, parse_format, sim_backend
from floatfloat.fpmodel import round as fp_round
from floatfloat.probe import (Op, UlpInterval, format_report, probe_chunks, probe_op,
                              probe_report, sample_errors, stimuli)

RNE = sim_backend("binary32")
RZ = sim_backend("chopped")
GUARD0 = sim_backend("p=24,guard=0")
seeds = st.integers(0, (1 << 64) - 1)


def test_sample_count():
    with pytest.raises(ValueError):
        probe_op(RNE, Op.ADD, 0, 1)
    one = probe_op(RNE, Op.MUL, 1, 1)
    assert one.lo_ulps == one.hi_ulps and one.samples == 1


@pytest.mark.parametrize("backend", [native_backend(), RNE, RZ, GUARD0,
                                     sim_backend("nvidia16"), sim_backend("p=30,emin=-200,emax=200")],
                         ids=lambda b: b.describe())
@pytest.mark.parametrize("op", list(Op))
def test_interval_contains_every_sample(backend, op):
    r = probe_op(backend, op, 3000, 99)
    errs = [e for _, _, e in sample_errors(backend, op, 3000, 99) if e is not None]
    assert all(r.contains(e) for e in errs)
    # endpoints are attained
    assert min(errs) == r.lo_ulps and max(errs) == r.hi_ulps


@given(seeds)
@settings(max_examples=10)
def test_nearest_even_within_half_ulp(seed):
    for op in (Op.ADD, Op.SUB, Op.MUL):
        r = probe_op(RNE, op, 2000, seed)
        assert -Fraction(1, 2) <= r.lo_ulps <= r.hi_ulps <= Fraction(1, 2)


@given(seeds)
@settings(max_examples=10)
def test_chopped_never_rounds_up_on_positive_results(seed):
    for op in (Op.ADD, Op.MUL):
        r = probe_op(RZ, op, 2000, seed)
        assert -1 < r.lo_ulps and r.hi_ulps <= 0


def test_deterministic_and_monotone():
    a = probe_op(RZ, Op.DIV, 6000, 5)
    assert a == probe_op(RZ, Op.DIV, 6000, 5)
    assert a.record() == probe_op(RZ, Op.DIV, 6000, 5).record()
    b = probe_op(RZ, Op.DIV, 12000, 5)
    assert b.lo_ulps <= a.lo_ulps and a.hi_ulps <= b.hi_ulps


def test_partitioned_equals_sequential():
    seq = probe_op(RZ, Op.SUB, 5 * sampling.CHUNK + 17, 8)
    par = probe_op(RZ, Op.SUB, 5 * sampling.CHUNK + 17, 8, workers=2)
    assert par == seq
    parts = [probe_chunks(RZ, Op.SUB, 5 * sampling.CHUNK + 17, 8, ks) for ks in ([0, 3, 5], [1, 2, 4])]
    assert parts[0].merge(parts[1]) == seq


def test_guard_digit_free_subtraction_leaves_faithful_envelope():
    r = probe_op(GUARD0, Op.SUB, 20000, 3)
    assert r.lo_ulps < -1 or r.hi_ulps > 1


def test_native_division_correctly_rounded():
    r = probe_op(native_backend(), Op.DIV, 20000, 3)
    assert -Fraction(1, 2) <= r.lo_ulps and r.hi_ulps <= Fraction(1, 2)


def test_stimuli_are_positive_and_representable():
    fmt = parse_format("nvidia16")
    for op in Op:
        a, b = stimuli(sampling.chunk_rng(1, 0), 2000, op, fmt)
        assert (a > 0).all() and (b > 0).all()
        for x in np.concatenate([a[:200], b[:200]]).tolist():
            assert float(fp_round(x, fmt)) == x


def test_merge_rejects_mixed_ops():
    a = probe_op(RNE, Op.ADD, 10, 1)
    with pytest.raises(ValueError):
        a.merge(probe_op(RNE, Op.MUL, 10, 1))


def test_report_shape():
    rows = probe_report(RZ, 500, 2)
    assert [r.op for r in rows] == list(Op)
    text = format_report(rows, "chopped")
    assert text.splitlines()[0] == "chopped"
    assert [line.split()[0] for line in text.splitlines()[2:]] == [
        "Addition", "Subtraction", "Multiplication", "Division"]
    rec = rows[0].record()
    assert set(rec) >= {"op", "lo_ulps", "hi_ulps", "samples", "seed"}
    assert Fraction(rec["lo_ulps"]) == rows[0].lo_ulps


def test_width():
    r = UlpInterval(Op.ADD, Fraction(-1, 2), Fraction(1, 4), 1, 0)
    assert r.width == Fraction(3, 4)
