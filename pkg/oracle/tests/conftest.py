import json

import pytest

from oracle_test_utils import run_fsharm


@pytest.fixture(scope="session")
def scene_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("scenes")


@pytest.fixture(scope="session")
def noiseless_scene_path(scene_dir):
    """Single in-band atom on a 4x4 grid observed at 12 samples."""
    config = scene_dir / "noiseless_config.json"
    config.write_text(json.dumps({
        "dims": [4, 4],
        "bands": [[0.3, 0.4], [0.5, 0.6]],
        "r": 1,
        "freqs": [[0.35, 0.55]],
        "n_samples": 12,
        "seed": 5,
    }))
    out = scene_dir / "noiseless_scene.json"
    run_fsharm(["synth", "--config", str(config), "--out", str(out)])
    return out


@pytest.fixture(scope="session")
def noisy_scene_path(scene_dir):
    """Same geometry, fully observed, with measurement noise."""
    config = scene_dir / "noisy_config.json"
    config.write_text(json.dumps({
        "dims": [4, 4],
        "bands": [[0.3, 0.4], [0.5, 0.6]],
        "r": 1,
        "freqs": [[0.35, 0.55]],
        "snr_db": 15.0,
        "seed": 9,
    }))
    out = scene_dir / "noisy_scene.json"
    run_fsharm(["synth", "--config", str(config), "--out", str(out)])
    return out
