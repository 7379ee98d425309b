#!/usr/bin/env python3
"""Run the full verification suite and print one line per criterion.

Usage:
    python3 scripts/run_acceptance.py [--skip 4 ...] [--out DIR]

The long Monte Carlo criterion (number 4) takes on the order of ten minutes
at its full path count; pass --skip 4 for a quick pass over everything else.
"""
import argparse
import json
import os
import sys

from wdsembed.acceptance import run_all, summary_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip", type=int, nargs="*", default=[],
                    help="criterion numbers to skip")
    ap.add_argument("--out", default=None, help="directory for summary files")
    args = ap.parse_args()

    results = run_all(skip=args.skip)
    table = summary_table(results)
    print(table)

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "summary.txt"), "w") as fh:
            fh.write(table + "\n")
        with open(os.path.join(args.out, "summary.json"), "w") as fh:
            json.dump([r.__dict__ for r in results], fh, indent=2)

    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
