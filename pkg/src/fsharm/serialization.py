"""File schemas shared by the CLI and external tools.

Complex data is stored as [re, im] pairs; tensors carry an explicit shape and
are flattened in the same C order used by the vectorization convention.
All writes are atomic (temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .tensors import Dims, Measurement, SpectralModel
from .toeplitz import FrequencyBand, GeneratorTensor

SCENE_SCHEMA = "fsharm/scene-v1"
SOLUTION_SCHEMA = "fsharm/solution-v1"
FIXTURE_SCHEMA = "fsharm/toeplitz-fixture-v1"


def complex_to_pairs(arr: np.ndarray) -> list[list[float]]:
    flat = np.asarray(arr, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_complex(pairs, shape=None) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return arr.reshape(shape) if shape is not None else arr


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_json(path: str | Path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2))


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path: str | Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(c) for c in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _format_cell(c) -> str:
    if isinstance(c, float):
        return repr(c)
    return str(c)


def scene_to_dict(
    model: SpectralModel,
    meas: Measurement,
    bands: list[FrequencyBand],
    x: np.ndarray,
    noise_std: float,
    seed: int,
) -> dict:
    return {
        "schema": SCENE_SCHEMA,
        "dims": list(meas.dims.sizes),
        "bands": [[b.f_low, b.f_high] for b in bands],
        "freqs": [list(map(float, f)) for f in model.freqs],
        "gains": complex_to_pairs(model.gains),
        "x": complex_to_pairs(x),
        "y": complex_to_pairs(meas.y),
        "phi": complex_to_pairs(meas.phi),
        "noise_std": float(noise_std),
        "seed": int(seed),
    }


def scene_from_dict(payload: dict):
    if payload.get("schema") != SCENE_SCHEMA:
        raise ValueError(f"unexpected scene schema: {payload.get('schema')!r}")
    dims = Dims(tuple(payload["dims"]))
    bands = [FrequencyBand(lo, hi) for lo, hi in payload["bands"]]
    model = SpectralModel(
        freqs=np.array(payload["freqs"], dtype=float).reshape(-1, dims.d),
        gains=pairs_to_complex(payload["gains"]),
    )
    meas = Measurement(
        dims=dims,
        y=pairs_to_complex(payload["y"]),
        phi=pairs_to_complex(payload["phi"]),
    )
    x = pairs_to_complex(payload["x"])
    return model, meas, bands, x


def solution_to_dict(output, dims: Dims) -> dict:
    return {
        "schema": SOLUTION_SCHEMA,
        "dims": list(dims.sizes),
        "mode": output.mode,
        "x_hat": complex_to_pairs(output.x_hat),
        "b_hat": {
            "shape": list(output.b_hat.values.shape),
            "values": complex_to_pairs(output.b_hat.values),
        },
        "t_hat": float(output.t_hat),
        "dual_embedding": complex_to_pairs(output.dual_embedding),
        "objective": float(output.trace["objective"][-1]),
    }


def solution_from_dict(payload: dict):
    if payload.get("schema") != SOLUTION_SCHEMA:
        raise ValueError(f"unexpected solution schema: {payload.get('schema')!r}")
    dims = Dims(tuple(payload["dims"]))
    b_hat = GeneratorTensor(
        dims,
        pairs_to_complex(payload["b_hat"]["values"], tuple(payload["b_hat"]["shape"])),
    )
    return {
        "dims": dims,
        "mode": payload["mode"],
        "x_hat": pairs_to_complex(payload["x_hat"]),
        "b_hat": b_hat,
        "t_hat": float(payload["t_hat"]),
        "dual_embedding": pairs_to_complex(payload["dual_embedding"]),
        "objective": float(payload["objective"]),
    }


def fixture_to_dict(
    gen: GeneratorTensor,
    bands: list[FrequencyBand],
    toeplitz: np.ndarray,
    tg_list: list[np.ndarray],
) -> dict:
    return {
        "schema": FIXTURE_SCHEMA,
        "dims": list(gen.dims.sizes),
        "bands": [[b.f_low, b.f_high] for b in bands],
        "generator": {
            "shape": list(gen.values.shape),
            "values": complex_to_pairs(gen.values),
        },
        "toeplitz": complex_to_pairs(toeplitz),
        "tg": [complex_to_pairs(tg) for tg in tg_list],
    }
