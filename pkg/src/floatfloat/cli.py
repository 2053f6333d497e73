"""Command-line interface: ``probe``, ``accuracy``, ``bench`` and ``selftest``.

Exit status is 0 on success, 1 when an accuracy run or the self test sees a
bound violation, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence
from typing import Any

from . import harness, probe, sampling
from .fpmodel import Backend, native_backend, parse_format, sim_backend

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _positive(text: str) -> int:
    n = _int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return n


def _int_list(text: str) -> list[int]:
    return [_positive(t) for t in text.split(",") if t.strip()]


def _common() -> argparse.ArgumentParser:
    # suppressed defaults let the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("common options")
    g.add_argument("--backend", choices=("native", "sim"),
                   help="host binary32 or the software simulator (default native, or sim with --format)")
    g.add_argument("--format", dest="fmt", metavar="CONFIG",
                   help="simulated format, e.g. binary32, chopped or p=24,round=rz,guard=1")
    g.add_argument("--samples", type=_positive, metavar="N")
    g.add_argument("--seed", type=_int, metavar="S",
                   help=f"64-bit seed (default ${sampling.SEED_ENV} or {sampling.default_seed()})")
    g.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="style", action="store_const", const="json")
    fmt.add_argument("--csv", dest="style", action="store_const", const="csv")
    fmt.add_argument("--text", dest="style", action="store_const", const="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="floatfloat", parents=[common],
        description="Float-float arithmetic: error probes, accuracy runs, benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", parents=[common], help="per-operation ulp error intervals")
    p.add_argument("--op", action="append", choices=[o.value for o in probe.Op])
    p.add_argument("--workers", type=_positive, default=1)

    a = sub.add_parser("accuracy", parents=[common], help="maximum error of the float-float operators")
    a.add_argument("--op", action="append", choices=harness.ACCURACY_OPS)

    b = sub.add_parser("bench", parents=[common], help="normalized operator timings")
    b.add_argument("--ops", type=lambda t: [s for s in t.split(",") if s],
                   default=list(harness.BENCH_OPS), metavar="OP,...")
    b.add_argument("--sizes", type=_int_list, default=list(harness.BENCH_SIZES), metavar="N,...")
    b.add_argument("--reps", type=_positive, default=5)

    s = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    s.add_argument("--check", action="append", choices=harness.SELFTEST_CHECKS)
    return parser


def _backend(args: argparse.Namespace) -> Backend:
    kind = args.backend or ("sim" if args.fmt else "native")
    if kind == "native":
        if args.fmt:
            raise UsageError("--format applies to the sim backend only")
        return native_backend()
    try:
        return sim_backend(parse_format(args.fmt or "binary32"))
    except ValueError as exc:
        raise UsageError(f"bad --format: {exc}") from None


def _flatten(record: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in record.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = " ".join(str(x) for x in v)
        else:
            out[key] = "" if v is None else v
    return out


def _csv(rows: list[dict[str, Any]]) -> str:
    rows = [_flatten(r) for r in rows]
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _render(style: str, doc: dict[str, Any], rows: list[dict[str, Any]], text: str) -> str:
    if style == "json":
        return json.dumps(doc, indent=2) + "\n"
    if style == "csv":
        return _csv(rows)
    return text + "\n"


def _run(args: argparse.Namespace) -> tuple[str, int]:
    B = _backend(args)
    seed = sampling.default_seed() if args.seed is None else args.seed
    if not 0 <= seed < 1 << 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    style = args.style or "text"
    head = {"command": args.command, "backend": B.describe(), "seed": seed}

    if args.command == "probe":
        samples = args.samples or 100_000
        ops = [probe.Op(o) for o in (args.op or [o.value for o in probe.Op])]
        try:
            rows = [probe.probe_op(B, op, samples, seed, args.workers) for op in ops]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        recs = [r.record() for r in rows]
        doc = {**head, "samples": samples, "intervals": recs}
        title = f"backend {B.describe()}, seed {seed}"
        return _render(style, doc, recs, probe.format_report(rows, title)), EXIT_OK

    if args.command == "accuracy":
        samples = args.samples or harness.DEFAULT_ACCURACY_SAMPLES
        try:
            reports = [harness.run_accuracy(op, B, samples, seed)
                       for op in (args.op or harness.ACCURACY_OPS)]
        except harness.FormatTooNarrowError as exc:
            raise UsageError(str(exc)) from None
        recs = [r.record() for r in reports]
        doc = {**head, "samples": samples, "reports": recs}
        code = EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION
        return _render(style, doc, recs, harness.format_accuracy(reports)), code

    if args.command == "bench":
        bad = [op for op in args.ops if op not in harness.BENCH_OPS]
        if bad:
            raise UsageError(f"unknown bench op(s) {', '.join(bad)}")
        try:
            rep = harness.run_bench(args.ops, args.sizes, args.reps, B, seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rec = rep.record()
        return _render(style, {**head, **rec}, rec["cells"], harness.format_bench(rep)), EXIT_OK

    samples = args.samples or 100_000
    rep = harness.run_selftest(B, samples, seed, args.check)
    recs = [c.record() for c in rep.checks]
    doc = {**head, "samples": samples, **rep.record()}
    return (_render(style, doc, recs, harness.format_selftest(rep)),
            EXIT_OK if rep.passed else EXIT_VIOLATION)


_COMMON_FIELDS = ("backend", "fmt", "samples", "seed", "out", "style")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in _COMMON_FIELDS:
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        out, code = _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"floatfloat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code
