"""Readers and writers for the JSON interchange schemas shared with the
fsharm command-line tools. Complex data is stored as [re, im] pairs in C
order; this module deliberately has no in-process dependency on fsharm."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

SCENE_SCHEMA = "fsharm/scene-v1"
SOLUTION_SCHEMA = "fsharm/solution-v1"
FIXTURE_SCHEMA = "fsharm/toeplitz-fixture-v1"
ORACLE_PRIMAL_SCHEMA = "fsharm-oracle/primal-v1"
ORACLE_DUAL_SCHEMA = "fsharm-oracle/dual-v1"
ORACLE_REPORT_SCHEMA = "fsharm-oracle/report-v1"


def pairs_to_complex(pairs, shape=None) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return arr.reshape(shape) if shape is not None else arr


def complex_to_pairs(arr: np.ndarray) -> list[list[float]]:
    flat = np.asarray(arr, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def save_json(path: str | Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def expect_schema(payload: dict, schema: str) -> None:
    if payload.get("schema") != schema:
        raise ValueError(
            f"unexpected schema {payload.get('schema')!r}, wanted {schema!r}"
        )


def read_scene(path: str | Path) -> dict:
    payload = load_json(path)
    expect_schema(payload, SCENE_SCHEMA)
    sizes = tuple(int(n) for n in payload["dims"])
    n = int(np.prod(sizes))
    return {
        "sizes": sizes,
        "bands": [(float(lo), float(hi)) for lo, hi in payload["bands"]],
        "freqs": np.array(payload["freqs"], dtype=float).reshape(-1, len(sizes)),
        "gains": pairs_to_complex(payload["gains"]),
        "x": pairs_to_complex(payload["x"], (n,)),
        "y": pairs_to_complex(payload["y"], (n,)),
        "phi": pairs_to_complex(payload["phi"], (n,)),
        "noise_std": float(payload.get("noise_std", 0.0)),
    }


def read_solution(path: str | Path) -> dict:
    payload = load_json(path)
    expect_schema(payload, SOLUTION_SCHEMA)
    sizes = tuple(int(n) for n in payload["dims"])
    n = int(np.prod(sizes))
    return {
        "sizes": sizes,
        "mode": payload["mode"],
        "x_hat": pairs_to_complex(payload["x_hat"], (n,)),
        "b_hat": pairs_to_complex(
            payload["b_hat"]["values"], tuple(payload["b_hat"]["shape"])
        ),
        "t_hat": float(payload["t_hat"]),
        "dual_embedding": pairs_to_complex(payload["dual_embedding"], (n,)),
        "objective": float(payload["objective"]),
    }


def read_fixture(path: str | Path) -> dict:
    payload = load_json(path)
    expect_schema(payload, FIXTURE_SCHEMA)
    sizes = tuple(int(n) for n in payload["dims"])
    n = int(np.prod(sizes))
    n_bar = int(np.prod([s - 1 for s in sizes]))
    return {
        "sizes": sizes,
        "bands": [(float(lo), float(hi)) for lo, hi in payload["bands"]],
        "generator": pairs_to_complex(
            payload["generator"]["values"], tuple(payload["generator"]["shape"])
        ),
        "toeplitz": pairs_to_complex(payload["toeplitz"], (n, n)),
        "tg": [pairs_to_complex(tg, (n_bar, n_bar)) for tg in payload["tg"]],
    }
