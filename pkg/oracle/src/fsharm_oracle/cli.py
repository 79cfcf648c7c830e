"""Command-line entry points: solve reference SDPs on a serialized scene
and compare fast-solver output files against them."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import schemas
from .sdp import Instance, default_lambda, solve_dual, solve_primal


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oracle")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--instance", required=True, help="scene JSON file")
        p.add_argument("--mode", choices=["constrained", "regularized"],
                       default="constrained")
        p.add_argument("--lam", type=float, help="regularization weight; "
                       "defaults from the scene's noise level")
        p.add_argument("--solver", default="SCS")
        p.add_argument("--out", required=True)

    add_common(sub.add_parser("primal", help="solve the exact primal SDP"))
    add_common(sub.add_parser("dual", help="solve the exact dual SDP"))

    cmp_p = sub.add_parser("compare", help="compare a fast-solver solution file "
                           "against the oracle primal/dual on the same scene")
    cmp_p.add_argument("--instance", required=True)
    cmp_p.add_argument("--solution", required=True, help="fsharm solution JSON")
    cmp_p.add_argument("--lam", type=float)
    cmp_p.add_argument("--solver", default="SCS")
    cmp_p.add_argument("--out", required=True)
    return parser


def _resolve_lambda(args, scene) -> float | None:
    if args.mode == "constrained":
        return None
    if args.lam is not None:
        return args.lam
    n = int(np.prod(scene["sizes"]))
    lam = default_lambda(scene["noise_std"], n)
    if lam <= 0:
        raise ValueError("regularized mode needs --lam or a noisy scene")
    return lam


def _cmd_primal(args) -> None:
    scene = schemas.read_scene(args.instance)
    lam = _resolve_lambda(args, scene)
    result = solve_primal(Instance.from_scene(scene), args.mode, lam, args.solver)
    schemas.save_json(args.out, {
        "schema": schemas.ORACLE_PRIMAL_SCHEMA,
        "dims": list(scene["sizes"]),
        "mode": result["mode"],
        "lam": result["lam"],
        "x": schemas.complex_to_pairs(result["x"]),
        "generator": {
            "shape": list(result["generator"].shape),
            "values": schemas.complex_to_pairs(result["generator"]),
        },
        "t": result["t"],
        "objective": result["objective"],
        "status": result["status"],
    })


def _cmd_dual(args) -> None:
    scene = schemas.read_scene(args.instance)
    lam = _resolve_lambda(args, scene)
    result = solve_dual(Instance.from_scene(scene), args.mode, lam, args.solver)
    schemas.save_json(args.out, {
        "schema": schemas.ORACLE_DUAL_SCHEMA,
        "dims": list(scene["sizes"]),
        "mode": result["mode"],
        "lam": result["lam"],
        "nu": schemas.complex_to_pairs(result["nu"]),
        "objective": result["objective"],
        "status": result["status"],
    })


def _dual_surface_argmax(embedding: np.ndarray, sizes, bands, step=1e-3):
    """Coarse grid argmax of |a(f)^H v| inside the bands, per dimension."""
    v = embedding.reshape(sizes)
    grids = []
    for lo, hi in bands:
        width = (hi - lo) % 1.0
        grids.append(np.mod(lo + np.arange(0.0, width + step / 2, step), 1.0))
    out = v
    for axis, (grid, n) in enumerate(zip(grids, sizes)):
        steering = np.exp(2j * np.pi * np.outer(grid, np.arange(n)))
        out = np.tensordot(out, np.conj(steering), axes=([0], [1]))
    idx = np.unravel_index(np.argmax(np.abs(out)), out.shape)
    return np.array([grids[i][idx[i]] for i in range(len(sizes))])


def _cmd_compare(args) -> None:
    scene = schemas.read_scene(args.instance)
    solution = schemas.read_solution(args.solution)
    mode = solution["mode"]
    lam = args.lam
    if mode == "regularized" and lam is None:
        lam = default_lambda(scene["noise_std"], int(np.prod(scene["sizes"])))
    instance = Instance.from_scene(scene)
    primal = solve_primal(instance, mode, lam, args.solver)
    dual = solve_dual(instance, mode, lam, args.solver)

    x_ref = primal["x"]
    x_nmse = float(np.linalg.norm(solution["x_hat"] - x_ref)
                   / max(np.linalg.norm(x_ref), 1e-30))
    obj_gap = float(abs(solution["objective"] - primal["objective"])
                    / max(abs(primal["objective"]), 1e-30))
    duality_gap = float(abs(primal["objective"] - dual["objective"])
                        / max(abs(primal["objective"]), 1e-30))
    oracle_embedding = np.conj(scene["phi"]) * dual["nu"]
    peak_oracle = _dual_surface_argmax(oracle_embedding, scene["sizes"],
                                       scene["bands"])
    peak_fast = _dual_surface_argmax(solution["dual_embedding"], scene["sizes"],
                                     scene["bands"])
    schemas.save_json(args.out, {
        "schema": schemas.ORACLE_REPORT_SCHEMA,
        "mode": mode,
        "x_nmse": x_nmse,
        "objective_gap": obj_gap,
        "duality_gap": duality_gap,
        "oracle_objective": primal["objective"],
        "solution_objective": solution["objective"],
        "peak_displacement": [float(a) for a in np.abs(peak_fast - peak_oracle)],
    })


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "primal":
            _cmd_primal(args)
        elif args.command == "dual":
            _cmd_dual(args)
        else:
            _cmd_compare(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
