"""Command-line harness.

Subcommands: synth, solve, convergence, phase-transition, rmse-snr,
dual-surface, bench, fixtures. Configuration comes from a JSON file
(--config) with individual flags overriding file fields.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict

import numpy as np

from . import experiments, serialization
from .admm import DivergenceError
from .experiments import ExperimentConfig
from .serialization import (
    fixture_to_dict,
    load_json,
    save_json,
    scene_from_dict,
    solution_to_dict,
)
from .tensors import Dims, SpectralModel
from .toeplitz import (
    FrequencyBand,
    GeneratorTensor,
    band_polynomial,
    build_tg,
    build_toeplitz,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsharm")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--solver", choices=["constrained", "regularized"])
        p.add_argument("--no-fs", action="store_true", help="disable the frequency prior")
        p.add_argument("--trials", type=int)
        p.add_argument("--snr-db", type=float)
        p.add_argument("--n-samples", type=int)
        p.add_argument("--lam", type=float)
        p.add_argument("--max-iters", type=int)
        p.add_argument("--workers", type=int)
        return p

    for name in ("synth", "convergence", "phase-transition", "rmse-snr", "dual-surface", "bench"):
        add_common(sub.add_parser(name))

    solve = sub.add_parser("solve", help="solve a serialized scene")
    solve.add_argument("--scene", required=True)
    solve.add_argument("--solver", choices=["constrained", "regularized"], default="constrained")
    solve.add_argument("--lam", type=float)
    solve.add_argument("--max-iters", type=int)
    solve.add_argument("--no-fs", action="store_true")
    solve.add_argument("--out", required=True)

    fixtures = sub.add_parser("fixtures", help="export Toeplitz cross-check fixtures")
    fixtures.add_argument("--seed", type=int, default=0)
    fixtures.add_argument("--dims", type=int, nargs="+", default=[4, 4])
    fixtures.add_argument("--out", required=True)
    return parser


def config_from_args(args) -> ExperimentConfig:
    payload = {}
    if args.config:
        payload.update(load_json(args.config))
    overrides = {
        "seed": args.seed,
        "solver": args.solver,
        "trials": args.trials,
        "snr_db": args.snr_db,
        "n_samples": args.n_samples,
        "lam": args.lam,
        "max_iters": args.max_iters,
        "workers": args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            payload[key] = value
    if args.no_fs:
        payload["no_fs"] = True
    return ExperimentConfig.from_dict(payload)


def _cmd_solve(args) -> None:
    payload = load_json(args.scene)
    model, meas, bands, x = scene_from_dict(payload)
    config = ExperimentConfig(
        dims=meas.dims.sizes,
        bands=tuple((b.f_low, b.f_high) for b in bands),
        r=model.r,
        solver=args.solver,
        no_fs=args.no_fs,
        lam=args.lam,
        max_iters=args.max_iters,
    )
    noise_std = float(payload.get("noise_std", 0.0))
    output = experiments.run_solver(config, meas, noise_std)
    save_json(args.out, solution_to_dict(output, meas.dims))


def _cmd_fixtures(args) -> None:
    dims = Dims(tuple(args.dims))
    rng = np.random.default_rng(args.seed)
    bands = [FrequencyBand(0.3, 0.4), FrequencyBand(0.5, 0.6)][: dims.d]
    while len(bands) < dims.d:
        bands.append(FrequencyBand(0.2, 0.7))
    from .tensors import random_model

    model = random_model(3, bands, rng, unit_modulus=False)
    gen = GeneratorTensor.from_model(
        SpectralModel(freqs=model.freqs, gains=np.abs(model.gains)), dims
    )
    # perturb off the exact low-rank set so the fixture exercises every offset
    noise = rng.normal(size=gen.values.shape) + 1j * rng.normal(size=gen.values.shape)
    gen = GeneratorTensor(dims, gen.values + 0.1 * noise)
    tg = [build_tg(gen, band_polynomial(b), i) for i, b in enumerate(bands)]
    save_json(args.out, fixture_to_dict(gen, bands, build_toeplitz(gen), tg))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            _cmd_solve(args)
        elif args.command == "fixtures":
            _cmd_fixtures(args)
        else:
            config = config_from_args(args)
            if args.command == "synth":
                save_json(args.out, experiments.cmd_synth(config))
            elif args.command == "convergence":
                header, rows, _ = experiments.cmd_convergence(config)
                experiments.write_table(args.out, header, rows, config)
            elif args.command == "phase-transition":
                header, rows = experiments.cmd_phase_transition(config)
                experiments.write_table(args.out, header, rows, config)
            elif args.command == "rmse-snr":
                header, rows = experiments.cmd_rmse_snr(config)
                experiments.write_table(args.out, header, rows, config)
            elif args.command == "dual-surface":
                header, rows, peaks, _, _ = experiments.cmd_dual_surface(config)
                experiments.write_table(args.out, header, rows, config)
                peaks_path = str(args.out) + ".peaks.json"
                save_json(
                    peaks_path,
                    {"peaks": [list(map(float, p)) for p in peaks], **config.metadata()},
                )
            elif args.command == "bench":
                header, rows = experiments.cmd_bench(config)
                experiments.write_table(args.out, header, rows, config)
    except DivergenceError as exc:
        print(f"solver diverged: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
