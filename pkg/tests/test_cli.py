from __future__ import annotations

import csv
import io
import json

import pytest

from postulation.cli import main, parse_sweep, parse_sweep_line
from postulation.errors import SpecFileError
from postulation.report import RunReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(l) for l in text.splitlines() if l.strip() and not l.startswith('{"report"')]


# --- expect ------------------------------------------------------------------


@pytest.mark.parametrize("flags,exp_h0", [
    (["--n", "4", "--d", "2", "--double-line", "--lines", "2"], 0),
    (["--n", "3", "--d", "4", "--double-line", "--lines", "3"], 7),
    (["--n", "4", "--d", "4", "--double-line", "--lines", "10", "--collinear", "3"], 0),
])
def test_expect_examples(capsys, flags, exp_h0):
    code, out, _ = run(capsys, "expect", *flags, "--format", "json-lines")
    assert code == 0 and records(out)[0]["exp_h0"] == exp_h0


def test_expect_reports_classification(capsys):
    code, out, _ = run(capsys, "expect", "--n", "4", "--d", "2", "--double-line", "--lines", "2")
    assert code == 0 and "EXCEPTIONAL (defect 1)" in out


# --- verify ------------------------------------------------------------------


def test_verify_exception_case(capsys):
    code, out, _ = run(capsys, "verify", "--n", "4", "--d", "2", "--double-line", "--lines", "2",
                       "--trials", "7", "--format", "json-lines")
    rec = records(out)[0]
    assert code == 0
    assert rec["defect"] == 1 and rec["observed_h0"] == 1 and rec["trials_run"] == 7
    assert rec["per_trial_h0"] == [1] * 7 and rec["matches"] and "evidence" in rec["note"]


def test_verify_table_has_verdict(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "3", "--double-line", "--lines", "2",
                       "--collinear", "2")
    assert code == 0 and "CERTIFIED maximal rank" in out and "seed" in out and "prime" in out


def test_verify_three_lines_in_p3(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "1", "--lines", "3", "--format", "csv")
    (rec,) = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rec["observed_h0"] == "0" and rec["certified"] == "True"


def test_verify_mismatch_exit_2(capsys):
    # over GF(7) random lines are often special; this seed falls short of full rank
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "4", "--lines", "7", "--prime", "7",
                       "--trials", "1", "--seed", "0", "--format", "json-lines")
    rec = records(out)[0]
    assert code == 2 and not rec["matches"] and rec["defect"] > 0


def test_sampling_failure_exit_70(capsys):
    code, _, err = run(capsys, "verify", "--n", "3", "--d", "3", "--lines", "2", "--prime", "2")
    assert code == 70 and "GenericityError" in err


def test_verify_prime_flag_and_env(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "2", "--lines", "2", "--prime", "101",
                       "--format", "json-lines")
    assert code == 0 and records(out)[0]["prime"] == 101
    monkeypatch.setenv("POSTULATION_PRIME", "65537")
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "2", "--lines", "2", "--format", "json-lines")
    assert code == 0 and records(out)[0]["prime"] == 65537


def test_verify_writes_out_file(capsys, tmp_path):
    path = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "verify", "--n", "3", "--d", "2", "--lines", "2", "--format", "json-lines",
                       "--out", str(path))
    assert code == 0 and out == ""
    rep = RunReport.from_json_lines(path.read_text())
    assert rep.command == "verify" and rep.seed == 0 and rep.records[0]["certified"]


def test_report_round_trip(capsys):
    _, out, _ = run(capsys, "verify", "--n", "4", "--d", "3", "--lines", "3", "--sundials", "1",
                    "--format", "json-lines", "--seed", "11")
    rep = RunReport.from_json_lines(out)
    assert rep.to_json_lines() == out
    assert RunReport.from_json(rep.to_json()) == rep


def test_replay_is_byte_identical(capsys):
    argv = ["verify", "--n", "4", "--d", "3", "--double-line", "--lines", "4", "--seed", "5",
            "--format", "json-lines"]
    _, a, _ = run(capsys, *argv)
    rep = RunReport.from_json_lines(a)
    p = rep.parameters
    assert p["n"] == 4 and p["d"] == 3
    _, b, _ = run(capsys, *argv[:-2], "--seed", str(rep.seed), "--prime", str(rep.prime), "--format", "json-lines")
    assert records(a) == records(b)
    assert a.splitlines()[:-1] == b.splitlines()[:-1]


# --- usage and range errors --------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "3"],
    ["verify", "--n", "3", "--d", "2", "--lines", "-1"],
    ["bogus"],
    ["verify", "--n", "3", "--d", "2", "--format", "xml"],
    ["schedule", "--n", "4", "--d", "4"],
    ["verify", "--n", "1", "--d", "2"],
    ["verify", "--n", "3", "--d", "2", "--prime", "100"],
    ["expect", "--n", "3", "--d", "2", "--fat", "3", "2"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 64


# --- schedule and tables -----------------------------------------------------


def test_schedule_examples(capsys):
    code, out, _ = run(capsys, "schedule", "--n", "4", "--d", "5", "--format", "json-lines")
    rec = records(out)[0]
    assert code == 0 and rec["x"] == 7 and rec["r_hat"] == 5 and rec["all_passed"]
    code, out, _ = run(capsys, "schedule", "--n", "5", "--d", "3")
    assert code == 0 and "FAIL" not in out and "PASS" in out


def test_tables(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0 and "all tables match" in out
    code, out, _ = run(capsys, "tables", "--format", "json-lines")
    recs = records(out)
    assert len(recs) == 13 + 5 + 6 and all(r["match"] for r in recs)
    row = next(r for r in recs if r["table"] == "q_prime_plus_r_hat" and r["d"] == 7)
    assert (row["q'"], row["r_hat"], row["q'+r_hat"]) == (5, 2, 7)


# --- sweep -------------------------------------------------------------------


SWEEP = """# double line plus s lines in P^4
n=4 d=2 lines=1 double_line
n=4 d=2 lines=2 double_line   # the exception

n=4 d=3 lines=3 double_line
n=3 d=3 lines=2 double_line collinear=2
n=4 d=3 lines=2 fat r=1 m=2
n=4 d=3 lines=1 sundials=2
"""


def test_sweep_file(capsys, tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text(SWEEP)
    code, out, _ = run(capsys, "sweep", str(spec), "--format", "json-lines")
    recs = records(out)
    assert code == 0
    assert [r["line"] for r in recs] == [2, 3, 5, 6, 7, 8]
    assert [r["defect"] for r in recs] == [0, 1, 0, 0, 0, 0]
    header = json.loads(out.splitlines()[-1])["report"]
    assert header["summary"] == {"total": 6, "passed": 6, "failed": 0}


def test_sweep_table_and_csv(capsys, tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text(SWEEP)
    code, out, _ = run(capsys, "sweep", str(spec))
    assert code == 0 and out.strip().endswith("(seed 0, p 2147483647)") and "6 pass, 0 fail" in out
    code, out, _ = run(capsys, "sweep", str(spec), "--format", "csv")
    assert code == 0 and len(out.strip().splitlines()) == 7


def test_sweep_jobs_keeps_order(capsys, tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text(SWEEP)
    _, a, _ = run(capsys, "sweep", str(spec), "--format", "json-lines")
    _, b, _ = run(capsys, "sweep", str(spec), "--format", "json-lines", "--jobs", "3")
    assert records(a) == records(b)


def test_sweep_empty(capsys, tmp_path):
    spec = tmp_path / "empty.txt"
    spec.write_text("# nothing\n\n")
    code, out, _ = run(capsys, "sweep", str(spec), "--format", "json-lines")
    assert code == 0 and records(out) == []
    assert json.loads(out)["report"]["summary"]["total"] == 0


def test_sweep_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("n=3 d=1 lines=3\n"))
    code, out, _ = run(capsys, "sweep", "-", "--format", "json-lines")
    assert code == 0 and records(out)[0]["certified"]


def test_sweep_mismatch_exit_2(capsys, tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text("n=4 d=2 lines=2 double_line\n")
    # fewer than 7 trials still match; the exception shows in every trial
    code, _, _ = run(capsys, "sweep", str(spec), "--trials", "1")
    assert code == 0
    spec.write_text("n=4 d=2 lines=2 collinear=1 double_line\n")
    code, out, _ = run(capsys, "sweep", str(spec), "--format", "json-lines")
    rec = records(out)[0]
    assert code == (0 if rec["matches"] else 2)


@pytest.mark.parametrize("text,lineno", [
    ("n=3 d=2 lines=1\nn=3 d=2\n", 2),
    ("n=3 d=x lines=1\n", 1),
    ("\n\nn=3 d=2 lines=1 frob\n", 3),
    ("n=3 d=2 lines=1 fat r=1\n", 1),
    ("n=3 d=2 lines=1 lines=2\n", 1),
    ("n=3 d=2 lines=-1\n", 1),
    ("n=1 d=2 lines=1\n", 1),
    ("n=3 d=2 lines=1 fat r=5 m=2\n", 1),
])
def test_sweep_parse_errors(capsys, tmp_path, text, lineno):
    spec = tmp_path / "bad.txt"
    spec.write_text(text)
    code, _, err = run(capsys, "sweep", str(spec))
    assert code == 65 and f"line {lineno}:" in err
    with pytest.raises(SpecFileError) as info:
        parse_sweep(text)
    assert info.value.line == lineno


def test_sweep_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "sweep", str(tmp_path / "nope.txt"))
    assert code == 65 and "cannot read" in err


def test_parse_sweep_line_fields():
    cfg = parse_sweep_line("n=5 d=3 lines=2 double_line fat r=2 m=3 collinear=1 sundials=1")
    assert cfg.describe().count("sundial") == 1
    assert parse_sweep_line("   # comment only") is None
