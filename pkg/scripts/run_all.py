"""Run every config in configs/ and print a claim summary per experiment.

Usage: python3 scripts/run_all.py [--out runs] [--jobs N] [--only NAME ...]
"""

import argparse
import sys
from pathlib import Path

from tracer_hartree.experiments.config import load_config
from tracer_hartree.experiments.runner import execute, verify, write_outputs

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(ROOT / "runs"))
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", nargs="*", default=None)
    args = ap.parse_args()
    status = 0
    for path in sorted((ROOT / "configs").glob("*.json")):
        if args.only and path.stem not in args.only:
            continue
        cfg = load_config(path)
        out = write_outputs(execute(cfg, jobs=args.jobs), Path(args.out) / path.stem, jobs=args.jobs)
        print(f"== {path.stem} -> {out}")
        status |= verify(out / "records.csv")
    return status


if __name__ == "__main__":
    sys.exit(main())
