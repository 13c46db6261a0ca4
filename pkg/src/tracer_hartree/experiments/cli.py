"""Command-line entry point ``tracer-hartree``.

Exit codes: 0 completed (and, with ``--strict``, every check passed);
1 acceptance failure; 2 configuration or runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigError, IncompleteRun, TracerHartreeError
from .config import load_config
from .runner import RunError, default_out_dir, execute, verify, write_outputs

log = logging.getLogger("tracer_hartree")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tracer-hartree", description="Tracer-particle mean-field experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config", help="JSON experiment config")
    r.add_argument("--strict", action="store_true", help="exit 1 when any recorded check fails")
    r.add_argument("--jobs", type=int, default=1, help="worker processes (1 is the reference mode)")
    r.add_argument("--out", default=None, help="output directory (default: config output_dir or runs/<id>)")
    v = sub.add_parser("verify", help="summarize a records.csv claim by claim")
    v.add_argument("records", help="records.csv from a run")
    p.add_argument("-q", "--quiet", action="store_true", help="only print errors")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    if args.command == "run":
        return _run(args)
    try:
        return verify(args.records)
    except IncompleteRun as exc:
        print(f"IncompleteRun: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: cannot read {args.records}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR


def _run(args) -> int:
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        result = execute(cfg, jobs=args.jobs)
    except (RunError, TracerHartreeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = write_outputs(result, args.out or default_out_dir(cfg), jobs=args.jobs, strict=args.strict)
    fails = result.failures
    log.info("%s: %d checks, %d failed; outputs in %s", cfg.id, len(result.checks), len(fails), out)
    for r in fails:
        log.info("  FAIL %s %s = %r", r.quantity, r.params_json(), r.value)
    if args.strict and fails:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
