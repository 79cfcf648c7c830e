#!/usr/bin/env python3
"""Frequency-localization RMSE of the regularized solver across an SNR
sweep, averaged over independent noisy scenes."""

import argparse
import json
import pathlib
import sys

from fsharm import cli

CONFIG = {
    "dims": [8, 8],
    "bands": [[0.3, 0.4], [0.5, 0.6]],
    "r": 2,
    "solver": "regularized",
    "trials": 10,
    "seed": 11,
    "snr_list": [4.0, 8.0, 12.0, 16.0, 20.0],
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/rmse", type=pathlib.Path)
    parser.add_argument("--max-iters", type=int, default=1000)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    config_path = args.out_dir / "config.json"
    config_path.write_text(json.dumps({**CONFIG, "max_iters": args.max_iters}, indent=2))
    return cli.main(["rmse-snr", "--config", str(config_path),
                     "--out", str(args.out_dir / "rmse.csv")])


if __name__ == "__main__":
    sys.exit(main())
