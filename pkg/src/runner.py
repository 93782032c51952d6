#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Command-line entry point for the casebook."""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Sequence, Union

from casebook import (
    Casebook,
    CaseReport,
    Check,
    compute_beta,
    compute_df,
    parse_point_text,
    run_certificate,
    verify_case,
)
from engine import InputError, KStabilityException, VerificationError
from engine.symbolic import format_polynomial

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
REPORT_COLUMNS = ("id", "description", "mechanism", "witness", "formula", "verdict", "status")


def _env_jobs() -> int:
    text = os.getenv("KSTAB_JOBS", "1")
    try:
        jobs = int(text)
    except ValueError:
        raise InputError(f"KSTAB_JOBS must be an integer, got {text!r}.")
    return jobs


def _verify_in_worker(cases_dir: str, case_id: str) -> CaseReport:
    """Verify one case in a fresh casebook; input errors become a failing row."""
    casebook = Casebook(cases_dir)
    try:
        return verify_case(casebook, case_id)
    except KStabilityException as error:
        logger.error("%s: %s", case_id, error.message)
        report = CaseReport(case_id, "", "")
        report.checks.append(Check("load", False, error.message))
        return report


def verify_all(casebook: Casebook, jobs: int = 1) -> List[CaseReport]:
    """Verify every case of the manifest in table order.

    Args:
        casebook (Casebook): Where the cases live.
        jobs (int): Worker processes; 1 verifies in this process.

    Returns:
        List[CaseReport]: One report per manifest entry, in manifest order.

    Raises:
        InputError: Thrown if the worker count is not positive.
    """
    if jobs < 1:
        raise InputError(f"--jobs must be at least 1, got {jobs}.")
    ids = casebook.manifest().ids
    start = time.perf_counter()
    if jobs == 1:
        reports = [_verify_in_worker(casebook.cases_dir, case_id) for case_id in ids]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            reports = list(executor.map(_verify_in_worker, [casebook.cases_dir] * len(ids), ids))
    passed = sum(1 for report in reports if report.status == "pass")
    logger.info(
        "Verified %d case(s): %d passed, %d failed in %.2fs.",
        len(reports),
        passed,
        len(reports) - passed,
        time.perf_counter() - start,
    )
    return reports


def summarize(reports: Sequence[CaseReport]) -> Dict[str, int]:
    passed = sum(1 for report in reports if report.status == "pass")
    return {"passed": passed, "failed": len(reports) - passed}


def render_markdown(reports: Sequence[CaseReport]) -> str:
    """Family table followed by the pass/fail summary."""
    lines = [
        "| " + " | ".join(REPORT_COLUMNS) + " |",
        "|" + "---|" * len(REPORT_COLUMNS),
    ]
    for report in reports:
        row = report.row()
        cells = [row[column].replace("|", "\\|") for column in REPORT_COLUMNS]
        lines.append("| " + " | ".join(cells) + " |")
    summary = summarize(reports)
    lines.append("")
    lines.append(f"passed: {summary['passed']}, failed: {summary['failed']}")
    return "\n".join(lines)


def render_checks(report: CaseReport) -> str:
    lines = [f"{report.id}: {report.status} ({report.verdict})"]
    for check in report.checks:
        mark = "ok" if check.passed else "FAIL"
        line = f"  [{mark}] {check.name}"
        lines.append(f"{line}: {check.detail}" if check.detail else line)
    return "\n".join(lines)


def _print_json(document: Any) -> None:
    print(json.dumps(document, indent=2))


def _exit_for(reports: Sequence[CaseReport]) -> int:
    return EXIT_OK if all(report.status == "pass" for report in reports) else EXIT_FAILED


def cmd_verify(casebook: Casebook, args: argparse.Namespace) -> int:
    report = verify_case(casebook, args.case, args.divisor)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(render_checks(report))
    if report.failures:
        first = report.failures[0]
        logger.error("%s: first failure %s: %s", report.id, first.name, first.detail)
    return _exit_for([report])


def cmd_verify_all(casebook: Casebook, args: argparse.Namespace) -> int:
    reports = verify_all(casebook, args.jobs)
    if args.json:
        _print_json([report.to_dict() for report in reports])
    else:
        for report in reports:
            print(f"{report.id}: {report.status}")
    return _exit_for(reports)


def cmd_report(casebook: Casebook, args: argparse.Namespace) -> int:
    reports = verify_all(casebook, args.jobs)
    if args.format == "json":
        _print_json({"rows": [report.row() for report in reports], **summarize(reports)})
    else:
        print(render_markdown(reports))
    return _exit_for(reports)


def cmd_beta(casebook: Casebook, args: argparse.Namespace) -> int:
    results = compute_beta(casebook, args.case, args.divisor)
    point = parse_point_text(args.at) if args.at else None
    for result in results:
        region = f" [{', '.join(result.region)}]" if result.region else ""
        print(f"{result.divisor} branch {result.branch}{region}: {result.value}")
        print(f"  verdict: {result.verdict.value}")
        if point is not None:
            print(f"  at {args.at}: {result.value.evaluate(point)}")
    return EXIT_OK


def cmd_df(casebook: Casebook, args: argparse.Namespace) -> int:
    result = compute_df(casebook, args.case, args.oracle)
    print(f"b0: {format_polynomial(result.b0)}")
    print(f"b1: {format_polynomial(result.b1)}")
    print(f"DF: {result.df}")
    if result.oracle_agreement is not None:
        print(f"oracles agree: {'yes' if result.oracle_agreement else 'no'}")
    return EXIT_FAILED if result.oracle_agreement is False else EXIT_OK


def cmd_certify(casebook: Casebook, args: argparse.Namespace) -> int:
    linked = run_certificate(casebook, args.case, args.target)
    print(f"target: {linked.target.summary()}")
    print(f"cofactor: {linked.cofactor.summary()}")
    for index, multiplier in enumerate(linked.multipliers):
        print(f"multiplier {index}: {multiplier.summary()}")
    identity = "holds" if linked.identity_holds else format_polynomial(linked.difference)
    print(f"link: {identity}")
    print(f"proves: {'yes' if linked.proves else 'no'}")
    return EXIT_OK if linked.proves else EXIT_FAILED


COMMANDS: Dict[str, Callable[[Casebook, argparse.Namespace], int]] = {
    "verify": cmd_verify,
    "verify-all": cmd_verify_all,
    "report": cmd_report,
    "beta": cmd_beta,
    "df": cmd_df,
    "certify": cmd_certify,
}


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors become InputError instead of exiting."""

    def error(self, message: str) -> None:
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="runner.py",
        description="Verify K-instability certificates for the families of the casebook.",
    )
    parser.add_argument(
        "--cases-dir",
        default=os.getenv("KSTAB_CASES_DIR"),
        help="Directory of case documents (default: $KSTAB_CASES_DIR or ./cases).",
    )
    parser.add_argument(
        "--log-level",
        default=os.getenv("KSTAB_LOG_LEVEL", "WARNING").upper(),
        type=str.upper,
        choices=LOG_LEVELS,
        help="Logging level on standard error (default: $KSTAB_LOG_LEVEL or WARNING).",
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)

    verify = subparsers.add_parser("verify", help="Run the full pipeline of one case.")
    verify.add_argument("--case", required=True)
    verify.add_argument("--divisor")
    verify.add_argument("--json", action="store_true", help="Emit the report as JSON.")

    verify_every = subparsers.add_parser("verify-all", help="Verify every case.")
    verify_every.add_argument("--jobs", type=int, default=None)
    verify_every.add_argument("--json", action="store_true", help="Emit the reports as JSON.")

    report = subparsers.add_parser("report", help="Print the family table.")
    report.add_argument("--format", choices=("json", "md"), default="md")
    report.add_argument("--jobs", type=int, default=None)

    beta = subparsers.add_parser("beta", help="Compute the beta invariant of a divisor.")
    beta.add_argument("--case", required=True)
    beta.add_argument("--divisor", required=True)
    beta.add_argument("--at", help='Rational point such as "a=1,b=1/2".')

    df = subparsers.add_parser("df", help="Compute the Donaldson-Futaki invariant.")
    df.add_argument("--case", required=True)
    df.add_argument("--oracle", choices=("closed", "series", "both"), default="both")

    certify = subparsers.add_parser("certify", help="Run one named certificate.")
    certify.add_argument("--case", required=True)
    certify.add_argument("--target", required=True)
    return parser


def main(argv: Union[Sequence[str], None] = None) -> int:
    """Parse arguments, run one command and map errors to exit codes.

    Returns:
        int: 0 when everything verifies, 1 on a verification failure, 2 on bad input.
    """
    try:
        args = build_parser().parse_args(argv)
    except InputError as error:
        print(f"error: {error.message}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.command is None:
        print("error: a command is required", file=sys.stderr)
        return EXIT_INPUT
    try:
        if getattr(args, "jobs", 0) is None:
            args.jobs = _env_jobs()
        return COMMANDS[args.command](Casebook(args.cases_dir), args)
    except VerificationError as error:
        logger.error("%s", error.message)
        return EXIT_FAILED
    except InputError as error:
        logger.error("%s", error.message)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
