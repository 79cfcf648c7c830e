#!/usr/bin/env python3
"""Export a block-Toeplitz cross-check fixture (generator tensor plus the
full and band-shifted matrices) for validating external implementations."""

import argparse
import pathlib
import sys

from fsharm import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[4, 4])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results/fixtures.json", type=pathlib.Path)
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    return cli.main(["fixtures", "--dims", *map(str, args.dims),
                     "--seed", str(args.seed), "--out", str(args.out)])


if __name__ == "__main__":
    sys.exit(main())
