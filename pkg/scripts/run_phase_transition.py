#!/usr/bin/env python3
"""Empirical exact-recovery rate over a (sample count, model order) grid,
with and without the frequency prior. Heavy at full scale; trim the sweep
lists or iteration budget for a quick look.
"""

import argparse
import json
import pathlib
import sys

from fsharm import cli

BASE = {
    "dims": [8, 8],
    "bands": [[0.3, 0.4], [0.5, 0.6]],
    "trials": 10,
    "seed": 0,
    "n_samples_list": [8, 16, 24, 32, 40, 48, 56, 64],
    "r_list": [1, 2, 3, 4, 5, 6],
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/phase", type=pathlib.Path)
    parser.add_argument("--max-iters", type=int, default=1000)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for label, extra in (("fs", {}), ("plain", {"no_fs": True})):
        config = {**BASE, **extra, "max_iters": args.max_iters,
                  "trials": args.trials, "workers": args.workers}
        config_path = args.out_dir / f"config_{label}.json"
        config_path.write_text(json.dumps(config, indent=2))
        code = cli.main(["phase-transition", "--config", str(config_path),
                         "--out", str(args.out_dir / f"rates_{label}.csv")])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
