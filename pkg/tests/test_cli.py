import csv
import io
import json
import subprocess
import sys

import pytest

from floatfloat import sampling
from floatfloat.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_probe_text(capsys):
    code, out, _ = run(capsys, "probe", "--format", "chopped", "--samples", "2000", "--seed", "3")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert "seed 3" in lines[0]
    assert [l.split()[0] for l in lines[2:]] == ["Addition", "Subtraction", "Multiplication", "Division"]


def test_accuracy_json_record(capsys):
    code, out, _ = run(capsys, "accuracy", "--op", "mul22", "--seed", "42", "--samples", "3000", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["seed"] == 42 and doc["samples"] == 3000
    (rec,) = doc["reports"]
    assert rec["op"] == "mul22" and rec["violations"] == 0
    assert set(rec["max_error_bits"]) == {"hex", "decimal"}


def test_json_is_byte_identical(capsys):
    argv = ("accuracy", "--op", "add22", "--seed", "7", "--samples", "2000", "--json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ("probe", "--op", "div", "--seed", "7", "--samples", "2000", "--json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_global_flags_before_subcommand(capsys):
    a = run(capsys, "--seed", "5", "--json", "probe", "--op", "add", "--samples", "500")[1]
    b = run(capsys, "probe", "--op", "add", "--samples", "500", "--seed", "5", "--json")[1]
    assert a == b and json.loads(a)["seed"] == 5


def test_violation_exit_code(capsys):
    code, out, _ = run(capsys, "selftest", "--format", "p=24,guard=0", "--samples", "20000",
                       "--check", "add12")
    assert code == EXIT_VIOLATION
    assert out.splitlines()[-1].startswith("FAIL")
    code, _, _ = run(capsys, "accuracy", "--format", "p=24,guard=0", "--op", "add12",
                     "--samples", "50000", "--seed", "1")
    assert code == EXIT_VIOLATION


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    ("probe", "--samples", "0"),
    ("probe", "--op", "mod"),
    ("probe", "--backend", "native", "--format", "binary32"),
    ("probe", "--format", "p=99"),
    ("probe", "--seed", "-1"),
    ("accuracy", "--format", "nvidia16", "--op", "mul22", "--samples", "10"),
    ("probe", "--format", "p=11,emin=-4,emax=4", "--samples", "10"),
    ("bench", "--ops", "add,fma"),
    ("bench", "--sizes", "8192,4096"),
    ("bench", "--reps", "2"),
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == ""
    assert err


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "probe", "--op", "mul", "--samples", "300", "--json", "--out", str(path))
    assert code == EXIT_OK and out == ""
    assert json.loads(path.read_text())["intervals"][0]["op"] == "mul"


def test_csv(capsys):
    code, out, _ = run(capsys, "accuracy", "--op", "add12", "--op", "split", "--samples", "500", "--csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["op"] for r in rows] == ["add12", "split"]
    assert "max_error_bits.hex" in rows[0]


def test_bench_single_size(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "4096", "--reps", "3", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["sizes"] == [4096]
    assert [c["op"] for c in doc["cells"]][:2] == ["add", "mul"]
    assert doc["cells"][0]["ratio"] == "1.00"


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(sampling.SEED_ENV, "123")
    doc = json.loads(run(capsys, "probe", "--op", "add", "--samples", "100", "--json")[1])
    assert doc["seed"] == 123


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "floatfloat", "selftest", "--check", "sterbenz",
                        "--samples", "1000"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[-1].startswith("PASS")
