#!/usr/bin/env python3
"""Time and memory benchmark comparing virtual and materialized dummies."""

import argparse
import os
import sys

from vdselect.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--p", type=int, default=200)
    parser.add_argument("--l-factor", type=int, default=10)
    parser.add_argument("--t", type=int, default=5)
    parser.add_argument("--mode", choices=("vd", "ad", "both"), default="both")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    modes = ("vd", "ad") if args.mode == "both" else (args.mode,)
    for mode in modes:
        rc = cli_main(
            ["bench", "--n", str(args.n), "--p", str(args.p),
             "--l-factor", str(args.l_factor), "--t", str(args.t),
             "--mode", mode, "--seed", str(args.seed),
             "--out", os.path.join(args.out, f"bench_{mode}.csv")]
        )
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
