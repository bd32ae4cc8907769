#!/usr/bin/env python3
"""Desk-scale dummy-path equivalence study via the vdselect CLI."""

import argparse
import os
import sys
import tempfile

from vdselect.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/equivalence")
    parser.add_argument("--replicates", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shadow", action="store_true")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", suffix=".params", delete=False) as fh:
        fh.write(f"replicates = {args.replicates}\nmaster_seed = {args.seed}\n")
        pf = fh.name
    argv = ["sim-equivalence", "--params", pf, "--out", args.out]
    if args.shadow:
        argv.append("--shadow")
    try:
        rc = cli_main(argv)
    finally:
        os.unlink(pf)
    return rc


if __name__ == "__main__":
    sys.exit(main())
