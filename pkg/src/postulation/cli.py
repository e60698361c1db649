"""Command-line front end.

Exit statuses: 0 verdict matches classification, 2 mismatch or failed check,
64 usage or parameter range error, 65 unreadable or malformed sweep file,
70 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Iterator, TextIO

from .combinatorics import (
    embedded_tables,
    expected_counts,
    regenerate_tables,
    verify_schedule,
)
from .config import SchemeConfig
from .engine import (
    CERTIFY_TRIALS,
    DEFECT_TRIALS,
    expected_exception,
    verdict_matches,
    verify_postulation,
)
from .errors import ConstraintError, RangeError, SpecFileError
from .linalg import PRIME_ENV_VAR, PrimeField, default_field
from .report import FORMATS, RunReport, csv_header, csv_row, json_record, render_table

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

SWEEP_COLUMNS = (
    "line", "n", "d", "config", "N", "HP", "exp_h0", "observed_h0", "defect",
    "virtual_defect", "certified", "exceptional", "matches", "trials_run",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=_positive, required=True, help="ambient dimension")
    p.add_argument("--d", type=_nonneg, required=True, help="degree of the forms")
    p.add_argument("--lines", type=_nonneg, default=0, help="number of generic lines")
    p.add_argument("--double-line", action="store_true", help="add one double line")
    p.add_argument("--fat", type=_nonneg, nargs=2, metavar=("R", "M"), help="add an M-fold R-plane")
    p.add_argument("--fat-point", type=_positive, metavar="M", help="add an M-fold point")
    p.add_argument("--collinear", type=_nonneg, default=0, help="points on one further generic line")
    p.add_argument("--sundials", type=_nonneg, default=0, help="number of generic sundials")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=_positive, default=None,
                   help=f"samplings per configuration (default {CERTIFY_TRIALS}, or {DEFECT_TRIALS} "
                        "when a defect is predicted)")
    p.add_argument("--seed", type=_nonneg, default=0, help="64-bit run seed")
    p.add_argument("--prime", type=int, default=None, help=f"field characteristic (default ${PRIME_ENV_VAR} or 2^31-1)")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out", default=None, help="write the report here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="postulation", description="Good-postulation checks by exact rank over GF(p).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expect", help="print expected counts and the exception classification")
    _add_config_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("verify", help="sample the configuration and compare ranks")
    _add_config_flags(p)
    _add_run_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("schedule", help="print the induction parameters and their checks")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--d", type=_nonneg, required=True)
    _add_output_flags(p)

    p = sub.add_parser("tables", help="regenerate the reference tables and compare")
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="verify every configuration listed in a file")
    p.add_argument("spec", help="sweep file, one configuration per line ('-' for stdin)")
    _add_run_flags(p)
    _add_output_flags(p)
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    return parser


# --- configuration helpers -------------------------------------------------


def config_from_args(args) -> SchemeConfig:
    return SchemeConfig.build(
        args.n,
        args.d,
        lines=args.lines,
        double_line=args.double_line,
        fat=tuple(args.fat) if args.fat else None,
        fat_point=args.fat_point,
        collinear=args.collinear,
        sundials=args.sundials,
    )


def parameters_of(config: SchemeConfig) -> dict[str, Any]:
    return {"n": config.n, "d": config.d, "config": config.describe()}


def _field(args) -> PrimeField:
    try:
        return PrimeField(args.prime) if args.prime is not None else default_field()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def expect_record(config: SchemeConfig) -> dict[str, Any]:
    exp = expected_counts(config)
    exc = expected_exception(config)
    if exc is None:
        label = "not classified"
    elif exc.exceptional:
        label = f"EXCEPTIONAL (defect {exc.virtual_defect})"
    else:
        label = "generic"
    return {**parameters_of(config), **exp.to_dict(), "classification": label,
            "predicted_defect": exc.virtual_defect if exc else 0}


def verify_record(config: SchemeConfig, trials: int | None, seed: int, prime: int) -> dict[str, Any]:
    """Run one verification and flatten it into a report record."""
    exc = expected_exception(config)
    exceptional = bool(exc and exc.exceptional)
    if trials is None:
        trials = DEFECT_TRIALS if exceptional else CERTIFY_TRIALS
    v = verify_postulation(config, trials, seed, PrimeField(prime), stop_early=not exceptional)
    rec = {**parameters_of(config), **v.expected.to_dict()}
    rec.update(
        observed_h0=v.observed_h0,
        observed_h1=v.observed_h1,
        defect=v.defect,
        virtual_defect=v.virtual_defect,
        certified=v.certified,
        exceptional=exceptional,
        predicted_defect=exc.virtual_defect if exc else 0,
        matches=verdict_matches(v, exc),
        trials_run=v.trials_run,
        per_trial_ranks=list(v.per_trial_ranks),
        per_trial_h0=v.per_trial_h0(),
        seed=seed,
        prime=prime,
        note=v.note,
    )
    return rec


# --- sweep files -----------------------------------------------------------


def parse_sweep_line(text: str, lineno: int | None = None) -> SchemeConfig | None:
    """Parse ``n=<int> d=<int> lines=<int> [double_line] [fat r=<int> m=<int>] [collinear=<int>] [sundials=<int>]``.

    Returns None for blank and comment lines.
    """
    body = text.split("#", 1)[0].strip()
    if not body:
        return None
    tokens = body.split()
    seen: dict[str, int] = {}
    double_line = False
    fat: tuple[int, int] | None = None

    def value(tok: str, key: str) -> int:
        try:
            v = int(tok.split("=", 1)[1])
        except ValueError:
            raise SpecFileError(f"{key} needs an integer value, got {tok!r}", lineno) from None
        if v < 0:
            raise SpecFileError(f"{key} must be nonnegative, got {v}", lineno)
        return v

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        key = tok.split("=", 1)[0]
        if tok == "double_line":
            if double_line:
                raise SpecFileError("double_line given twice", lineno)
            double_line = True
        elif tok == "fat":
            if fat is not None:
                raise SpecFileError("fat given twice", lineno)
            rm = tokens[i + 1: i + 3]
            if len(rm) != 2 or not rm[0].startswith("r=") or not rm[1].startswith("m="):
                raise SpecFileError("fat must be followed by r=<int> m=<int>", lineno)
            fat = (value(rm[0], "r"), value(rm[1], "m"))
            i += 2
        elif "=" in tok and key in ("n", "d", "lines", "collinear", "sundials"):
            if key in seen:
                raise SpecFileError(f"{key} given twice", lineno)
            seen[key] = value(tok, key)
        else:
            raise SpecFileError(f"unexpected token {tok!r}", lineno)
        i += 1
    for key in ("n", "d", "lines"):
        if key not in seen:
            raise SpecFileError(f"missing required field {key}=", lineno)
    try:
        return SchemeConfig.build(
            seen["n"], seen["d"], lines=seen["lines"], double_line=double_line, fat=fat,
            collinear=seen.get("collinear", 0), sundials=seen.get("sundials", 0),
        )
    except ValueError as exc:
        raise SpecFileError(str(exc), lineno) from None


def parse_sweep(text: str) -> list[tuple[int, SchemeConfig]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cfg = parse_sweep_line(line, lineno)
        if cfg is not None:
            try:
                expected_counts(cfg)
            except RangeError as exc:
                raise SpecFileError(str(exc), lineno) from None
            out.append((lineno, cfg))
    return out


def _sweep_job(job: tuple[int, SchemeConfig, int | None, int, int]) -> dict[str, Any]:
    lineno, cfg, trials, seed, prime = job
    return {"line": lineno, **verify_record(cfg, trials, seed, prime)}


def _run_jobs(jobs: list, workers: int) -> Iterator[dict[str, Any]]:
    if workers <= 1 or len(jobs) <= 1:
        yield from map(_sweep_job, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so output order is input order.
        yield from pool.map(_sweep_job, jobs)


# --- commands --------------------------------------------------------------


def _emit(out: TextIO, fmt: str, report: RunReport, single: bool = True) -> None:
    if fmt == "json-lines":
        out.write(report.to_json_lines())
    elif fmt == "csv":
        cols = list(report.records[0]) if report.records else []
        out.write(csv_header(cols))
        for r in report.records:
            out.write(csv_row(r, cols))
    else:
        for r in report.records:
            out.write(render_table(r) + "\n")
            if not single:
                out.write("\n")


def cmd_expect(args, out: TextIO) -> int:
    config = config_from_args(args)
    report = RunReport("expect", parameters_of(config), seed=0, prime=0, records=[expect_record(config)])
    _emit(out, args.format, report)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    config = config_from_args(args)
    F = _field(args)
    expected_counts(config)
    t0 = time.perf_counter()
    rec = verify_record(config, args.trials, args.seed, F.p)
    report = RunReport("verify", {**parameters_of(config), "trials": args.trials}, args.seed, F.p, [rec],
                       wall_time=round(time.perf_counter() - t0, 6),
                       summary={"matches": rec["matches"]})
    if args.format == "table":
        rec = {**rec, "verdict": _verdict_label(rec)}
        report.records = [rec]
    _emit(out, args.format, report)
    return EXIT_OK if rec["matches"] else EXIT_MISMATCH


def _verdict_label(rec: dict[str, Any]) -> str:
    if rec["certified"]:
        return "CERTIFIED maximal rank"
    return "defect matches classification" if rec["matches"] else "UNEXPECTED defect"


def cmd_schedule(args, out: TextIO) -> int:
    sched = verify_schedule(args.n, args.d)
    params = sched.parameters()
    checks = dict(sched.checklist)
    if args.format == "table":
        out.write(f"schedule for n={args.n}, d={args.d}\n")
        for k, v in params.items():
            out.write(f"  {k:<8} {v}\n")
        for name, ok in checks.items():
            out.write(f"  [{'PASS' if ok else 'FAIL'}] {name}\n")
    else:
        rec = {"n": args.n, "d": args.d, **params, **{f"check: {k}": v for k, v in checks.items()},
               "all_passed": sched.all_passed}
        _emit(out, args.format, RunReport("schedule", {"n": args.n, "d": args.d}, 0, 0, [rec]))
    return EXIT_OK if sched.all_passed else EXIT_MISMATCH


_TABLE_COLUMNS = {
    "x_n4": ("x = r-r'-2q'",),
    "r_hat_vs_x": ("r_hat", "x = r-r'-2q'"),
    "q_prime_plus_r_hat": ("q'", "r_hat", "q'+r_hat"),
}


def cmd_tables(args, out: TextIO) -> int:
    got, want = regenerate_tables(), embedded_tables()
    ok = True
    records = []
    for name, cols in _TABLE_COLUMNS.items():
        if args.format == "table":
            out.write(f"table {name} (n=4)\n")
            out.write("  " + "  ".join(f"{c:>14}" for c in ("d",) + cols) + "  status\n")
        for d in sorted(want[name]):
            match = got[name].get(d) == want[name][d]
            ok &= match
            vals = got[name].get(d, ())
            records.append({"table": name, "d": d, **dict(zip(cols, vals)),
                            "reference": list(want[name][d]), "match": match})
            if args.format == "table":
                cells = "  ".join(f"{v:>14}" for v in (d,) + tuple(vals))
                out.write(f"  {cells}  {'ok' if match else 'MISMATCH ' + str(want[name][d])}\n")
    if args.format != "table":
        _emit(out, args.format, RunReport("tables", {}, 0, 0, records, summary={"all_match": ok}))
    else:
        out.write("all tables match\n" if ok else "MISMATCH against reference data\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def _read_spec(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from None


def cmd_sweep(args, out: TextIO) -> int:
    entries = parse_sweep(_read_spec(args.spec))
    F = _field(args)
    t0 = time.perf_counter()
    jobs = [(lineno, cfg, args.trials, args.seed, F.p) for lineno, cfg in entries]
    header_done = False
    records = []
    passed = 0
    for rec in _run_jobs(jobs, args.jobs):
        records.append(rec)
        passed += bool(rec["matches"])
        if args.format == "json-lines":
            out.write(json_record(rec) + "\n")
        elif args.format == "csv":
            if not header_done:
                out.write(csv_header(SWEEP_COLUMNS))
                header_done = True
            out.write(csv_row(rec, SWEEP_COLUMNS))
        else:
            if not header_done:
                out.write(_sweep_row({c: c for c in SWEEP_COLUMNS}) + "\n")
                header_done = True
            out.write(_sweep_row(rec) + "\n")
        out.flush()
    summary = {"total": len(records), "passed": passed, "failed": len(records) - passed}
    report = RunReport("sweep", {"spec": args.spec, "trials": args.trials}, args.seed, F.p, records,
                       wall_time=round(time.perf_counter() - t0, 6), summary=summary)
    if args.format == "json-lines":
        out.write(json.dumps({"report": report.header()}, sort_keys=True) + "\n")
    elif args.format == "table":
        out.write(f"summary: {summary['total']} records, {passed} pass, {summary['failed']} fail "
                  f"(seed {args.seed}, p {F.p})\n")
    return EXIT_OK if passed == len(records) else EXIT_MISMATCH


def _sweep_row(rec: dict[str, Any]) -> str:
    widths = {"config": 44, "line": 5}
    return " ".join(f"{str(rec.get(c, '')):<{widths.get(c, 6)}}" if c == "config"
                    else f"{str(rec.get(c, '')):>{widths.get(c, 6)}}" for c in SWEEP_COLUMNS)


COMMANDS = {
    "expect": cmd_expect,
    "verify": cmd_verify,
    "schedule": cmd_schedule,
    "tables": cmd_tables,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    fh = None
    try:
        if args.out:
            fh = out = open(args.out, "w", encoding="utf-8")
        return COMMANDS[args.command](args, out)
    except SpecFileError as exc:
        print(f"postulation: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RangeError, ConstraintError, UsageError, ValueError) as exc:
        print(f"postulation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"postulation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"postulation: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if fh is not None:
            fh.close()


if __name__ == "__main__":
    sys.exit(main())
