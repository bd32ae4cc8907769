#!/usr/bin/env python3
"""FDR/TPP sweep over alpha, dummy budget, and SNR via the vdselect CLI."""

import argparse
import os
import sys
import tempfile

from vdselect.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/fdr")
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", suffix=".params", delete=False) as fh:
        fh.write(f"replicates = {args.replicates}\nmaster_seed = {args.seed}\n")
        pf = fh.name
    try:
        rc = cli_main(["sim-fdr", "--params", pf, "--out", args.out])
    finally:
        os.unlink(pf)
    return rc


if __name__ == "__main__":
    sys.exit(main())
