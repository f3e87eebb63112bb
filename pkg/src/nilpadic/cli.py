"""Command line entry point.

    nilpadic SPEC.json [SPEC.json ...] [--format text|json|dot] [--precision K]
             [--oracle K] [--oracle-cap N] [--out-dir DIR] [--dot] [--jobs N] [-v | -q]

Exit codes: 0 success, 1 internal invariant failure, 2 invalid spec or
malformed input, 3 precision exhausted, 4 oracle cap exceeded.  Each
failure also writes one JSON error record per line to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import report as rpt
from .errors import (
    ClosureFailure, InvalidInput, InvariantViolation, NilpadicError, NotInGroup,
    OracleCapExceeded, PrecisionExhausted, SpecValidationError,
)
from .model import witness_to_json, load_spec, validate
from .oracle import DEFAULT_CAP, compare
from .scalar import DEFAULT_PRECISION
from .structure import structure_report

log = logging.getLogger("nilpadic")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_PRECISION = 3
EXIT_ORACLE_CAP = 4

_EXIT_FOR = [
    (SpecValidationError, EXIT_INVALID),
    (InvalidInput, EXIT_INVALID),
    (ClosureFailure, EXIT_INVALID),
    (NotInGroup, EXIT_INVALID),
    (PrecisionExhausted, EXIT_PRECISION),
    (OracleCapExceeded, EXIT_ORACLE_CAP),
    (InvariantViolation, EXIT_INTERNAL),
]

EXTENSIONS = {"json": "json", "dot": "dot", "text": "txt"}


@dataclass
class RunConfig:
    inputs: list
    fmt: str = "json"
    precision: int = None
    oracle: int = 0
    oracle_cap: int = DEFAULT_CAP
    out_dir: str = None
    dot: bool = False
    jobs: int = 1
    verbosity: int = 0


@dataclass
class Outcome:
    path: str
    code: int
    outputs: dict        # filename suffix -> text
    error: dict = None


def exit_code_for(exc):
    for cls, code in _EXIT_FOR:
        if isinstance(exc, cls):
            return code
    return EXIT_INTERNAL


def error_record(path, exc):
    rec = {"error": getattr(exc, "kind", "error"), "path": str(path),
           "message": str(exc), "exit_code": exit_code_for(exc)}
    if isinstance(exc, SpecValidationError):
        rec["check"] = exc.check
    witness = getattr(exc, "witness", None)
    if witness is not None:
        rec["witness"] = witness_to_json(witness)
    return rec


def _check_config(cfg):
    if cfg.precision is not None and cfg.precision < 1:
        raise InvalidInput("precision must be positive")
    if cfg.oracle < 0:
        raise InvalidInput("oracle depth must be non-negative")


def analyse(path, cfg):
    """Run the full pipeline on one spec file; never raises."""
    try:
        spec = load_spec(path, cfg.precision)
        ctx = spec.ctx
        if ctx.precision < 2 * ctx.epsilon:
            raise InvalidInput(f"precision {ctx.precision} is below 2*epsilon = {2 * ctx.epsilon}")
        if cfg.oracle > ctx.precision:
            raise InvalidInput(f"oracle depth {cfg.oracle} exceeds precision {ctx.precision}")
        val = validate(spec)
        if not val.ok:
            check = val.first_failure()
            exc = SpecValidationError(val.messages.get(check, check), check,
                                      val.witnesses.get(check))
            rec = error_record(path, exc)
            rec["validation"] = val.to_json()
            return Outcome(str(path), EXIT_INVALID, {}, rec)
        log.info("%s: valid spec, p=%d m=%d |Q|=%d", path, spec.p, spec.m, spec.order_Q)
        report = structure_report(spec)
        oracle = None
        if cfg.oracle:
            oracle = compare(spec, cfg.oracle, cfg.oracle_cap)
            log.info("%s: oracle k=%d on %d elements", path, cfg.oracle, oracle.order)
        outputs = {EXTENSIONS[cfg.fmt]: rpt.render(report, cfg.fmt, oracle)}
        if cfg.dot and cfg.fmt != "dot":
            outputs["dot"] = rpt.to_dot(report)
        return Outcome(str(path), EXIT_OK, outputs)
    except OSError as exc:
        rec = {"error": "io-error", "path": str(path), "message": str(exc),
               "exit_code": EXIT_INVALID}
        return Outcome(str(path), EXIT_INVALID, {}, rec)
    except NilpadicError as exc:
        return Outcome(str(path), exit_code_for(exc), {}, error_record(path, exc))


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def run(cfg, stdout=None, stderr=None):
    """Analyse every input; returns the first non-zero exit code (or 0)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        _check_config(cfg)
    except InvalidInput as exc:
        stderr.write(json.dumps(error_record("<config>", exc), sort_keys=True) + "\n")
        return EXIT_INVALID
    jobs = max(1, min(cfg.jobs, len(cfg.inputs)))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(lambda p: analyse(p, cfg), cfg.inputs))

    code = EXIT_OK
    for out in outcomes:
        if out.error is not None:
            stderr.write(json.dumps(out.error, sort_keys=True) + "\n")
            code = code or out.code
            continue
        for ext, text in out.outputs.items():
            if cfg.out_dir is not None:
                dest = os.path.join(cfg.out_dir, f"{_stem(out.path)}.{ext}")
                write_atomic(dest, text)
                log.info("wrote %s", dest)
            elif ext == EXTENSIONS[cfg.fmt]:
                stdout.write(text)
            else:
                write_atomic(f"{_stem(out.path)}.{ext}", text)
    return code


def build_parser():
    ap = argparse.ArgumentParser(
        prog="nilpadic",
        description="Structure reports for unipotent-by-finite p-adic matrix groups.")
    ap.add_argument("inputs", nargs="+", metavar="SPEC", help="spec JSON file(s)")
    ap.add_argument("--format", dest="fmt", choices=sorted(EXTENSIONS), default="json")
    ap.add_argument("--precision", type=int, default=None,
                    help=f"p-adic digits to certify (default: from spec, else {DEFAULT_PRECISION})")
    ap.add_argument("--oracle", type=int, default=0, metavar="K",
                    help="cross-check against G mod p^K (0 = off)")
    ap.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP,
                    help="largest finite quotient the oracle may enumerate")
    ap.add_argument("--out-dir", default=None,
                    help="write <stem>.<ext> files here instead of printing")
    ap.add_argument("--dot", action="store_true",
                    help="also write <stem>.dot (into --out-dir, else the working directory)")
    ap.add_argument("--jobs", type=int, default=1, help="specs analysed concurrently")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else (logging.INFO if args.verbose else logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr)
    cfg = RunConfig(inputs=args.inputs, fmt=args.fmt, precision=args.precision,
                    oracle=args.oracle, oracle_cap=args.oracle_cap, out_dir=args.out_dir,
                    dot=args.dot, jobs=args.jobs, verbosity=args.verbose)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
