"""Shared fixtures.

The two reference solves (noiseless constrained at full iteration budget,
regularized at SNR 15 dB) take tens of seconds each, so they are computed
once per session and shared between the solver tests and the acceptance
suite.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

import fsharm as fs
from fsharm.admm import AdmmParams, solve_constrained, solve_regularized

from reference_scene_constants import (
    REFERENCE_BANDS,
    REFERENCE_FREQS,
    REFERENCE_LAMBDA,
    REFERENCE_SNR_DB,
)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the one-line-per-criterion acceptance results at the end of the
    run, so they are visible without disabling output capture."""
    import acceptance_report

    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.LINES:
            terminalreporter.write_line(line)


def reference_bands() -> list[fs.FrequencyBand]:
    return [fs.FrequencyBand(lo, hi) for lo, hi in REFERENCE_BANDS]


@pytest.fixture(scope="session")
def reference_scene():
    """8x8 two-sinusoid scene with a 40-sample mask, noiseless."""
    rng = np.random.default_rng(1)
    dims = fs.Dims((8, 8))
    model = fs.SpectralModel(freqs=np.array(REFERENCE_FREQS), gains=np.ones(2))
    x = fs.synthesize(model, dims)
    mask = np.zeros(dims.n_total)
    mask[rng.choice(dims.n_total, size=40, replace=False)] = 1.0
    meas = fs.observe(x, mask.reshape(dims.sizes))
    return model, meas, reference_bands(), x.ravel()


@pytest.fixture(scope="session")
def noiseless_solve(reference_scene):
    """Full-budget constrained solve on the reference scene, plus wall time."""
    model, meas, bands, x = reference_scene
    start = time.perf_counter()
    output = solve_constrained(meas, bands, AdmmParams.noiseless_defaults(), x_ref=x)
    elapsed = time.perf_counter() - start
    return output, elapsed


@pytest.fixture(scope="session")
def regularized_scene():
    """Same two sinusoids, full observation, complex noise at 15 dB SNR."""
    dims = fs.Dims((8, 8))
    model = fs.SpectralModel(freqs=np.array(REFERENCE_FREQS), gains=np.ones(2))
    x = fs.synthesize(model, dims)
    noise_var = fs.snr_to_noise_var(model.r, REFERENCE_SNR_DB)
    meas = fs.observe(x, np.ones(dims.sizes), noise_std=float(np.sqrt(noise_var)), seed=7)
    return model, meas, reference_bands(), x.ravel()


@pytest.fixture(scope="session")
def regularized_solve(regularized_scene):
    model, meas, bands, x = regularized_scene
    params = AdmmParams.noisy_defaults(lam=REFERENCE_LAMBDA)
    output = solve_regularized(meas, bands, params, x_ref=x)
    return output
