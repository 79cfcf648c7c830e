"""Config-driven experiment harness: scene synthesis, convergence traces,
phase-transition grids, RMSE-vs-SNR sweeps, dual surfaces and timing runs."""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .admm import AdmmParams, default_lambda, solve_constrained, solve_regularized
from .localization import (
    dual_surface,
    locate_from_dual,
    locate_from_music,
    music_spectrum,
)
from .serialization import scene_to_dict, write_csv
from .tensors import (
    Dims,
    Measurement,
    SpectralModel,
    nmse,
    observe,
    random_model,
    snr_to_noise_var,
    synthesize,
)
from .toeplitz import FrequencyBand, full_band

SUCCESS_NMSE_ADMM = 1e-3
DELTA_F = 0.1  # clip for the per-frequency absolute error


@dataclass
class ExperimentConfig:
    dims: tuple[int, ...] = (8, 8)
    bands: tuple[tuple[float, float], ...] = ((0.3, 0.4), (0.5, 0.6))
    r: int = 2
    freqs: tuple[tuple[float, ...], ...] | None = None  # fixed scene, else random
    n_samples: int | None = None  # None = full observation
    snr_db: float | None = None  # None = noiseless
    solver: str = "constrained"  # constrained | regularized
    no_fs: bool = False  # disable prior: K = 0 and full-width bands
    rho: float = 0.05
    varrho: float | None = None
    inner_iters: int | None = None
    max_iters: int | None = None
    lam: float | None = None  # None = noise_std * sqrt(2 ln N_D)
    trials: int = 10
    seed: int = 0
    grid_step: float = 1e-3
    workers: int = 1
    # sweep axes
    n_samples_list: tuple[int, ...] = (8, 16, 24, 32, 40, 48, 56, 64)
    r_list: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    snr_list: tuple[float, ...] = (4.0, 8.0, 12.0, 16.0, 20.0)
    bench_sizes: tuple[int, ...] = (8, 12, 16)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.dims = tuple(int(n) for n in self.dims)
        self.bands = tuple((float(a), float(b)) for a, b in self.bands)

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        fields = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - fields
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**payload)
        if cfg.freqs is not None:
            cfg.freqs = tuple(tuple(float(x) for x in f) for f in cfg.freqs)
        return cfg

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=list)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def band_objects(self) -> list[FrequencyBand]:
        if self.no_fs:
            return [full_band() for _ in self.dims]
        return [FrequencyBand(lo, hi) for lo, hi in self.bands]

    def dims_obj(self) -> Dims:
        return Dims(self.dims)

    def solver_params(self, noise_std: float) -> AdmmParams:
        noiseless = self.solver == "constrained"
        varrho = self.varrho if self.varrho is not None else (9.0 if noiseless else 3.0)
        inner = self.inner_iters if self.inner_iters is not None else (10 if noiseless else 20)
        iters = self.max_iters if self.max_iters is not None else (2000 if noiseless else 1000)
        if self.no_fs:
            inner = 0
        lam = None
        if not noiseless:
            lam = self.lam if self.lam is not None else default_lambda(noise_std, self.dims_obj().n_total)
        return AdmmParams(rho=self.rho, varrho=varrho, inner_iters=inner, max_iters=iters, lam=lam)

    def metadata(self) -> dict:
        return {"config_hash": self.config_hash(), "seed": self.seed, "version": __version__}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(seed ^ trial)


def make_scene(config: ExperimentConfig, rng: np.random.Generator, noise_seed: int):
    """Draw (or fix) a model, sampling mask and noise; returns all pieces."""
    dims = config.dims_obj()
    bands = [FrequencyBand(lo, hi) for lo, hi in config.bands]
    if config.freqs is not None:
        freqs = np.array(config.freqs, dtype=float)
        gains = np.exp(2j * np.pi * rng.random(freqs.shape[0]))
        model = SpectralModel(freqs=freqs, gains=gains)
    else:
        model = random_model(config.r, bands, rng)
    x_tensor = synthesize(model, dims)
    p_tensor = np.ones(dims.sizes)
    if config.n_samples is not None:
        mask = np.zeros(dims.n_total)
        on = rng.choice(dims.n_total, size=config.n_samples, replace=False)
        mask[on] = 1.0
        p_tensor = mask.reshape(dims.sizes)
    noise_std = 0.0
    if config.snr_db is not None:
        noise_std = float(np.sqrt(snr_to_noise_var(model.r, config.snr_db)))
    meas = observe(x_tensor, p_tensor, noise_std=noise_std, seed=noise_seed)
    return model, meas, x_tensor.ravel(), noise_std


def run_solver(config: ExperimentConfig, meas: Measurement, noise_std: float, x_ref=None):
    params = config.solver_params(noise_std)
    bands = config.band_objects()
    if config.solver == "constrained":
        return solve_constrained(meas, bands, params, x_ref=x_ref)
    return solve_regularized(meas, bands, params, x_ref=x_ref)


def cmd_synth(config: ExperimentConfig) -> dict:
    rng = trial_rng(config.seed, 0)
    model, meas, x, noise_std = make_scene(config, rng, noise_seed=config.seed)
    bands = [FrequencyBand(lo, hi) for lo, hi in config.bands]
    payload = scene_to_dict(model, meas, bands, x, noise_std, config.seed)
    payload["metadata"] = config.metadata()
    return payload


def cmd_convergence(config: ExperimentConfig):
    """Per-iteration trace on one scene; rows (iteration, residuals, nmse)."""
    rng = trial_rng(config.seed, 0)
    model, meas, x, noise_std = make_scene(config, rng, noise_seed=config.seed)
    output = run_solver(config, meas, noise_std, x_ref=x)
    n = len(output.trace["objective"])
    header = ["iteration", "primal_residual", "data_residual", "objective", "nmse"]
    rows = [
        [
            q + 1,
            output.trace["primal_residual"][q],
            output.trace["data_residual"][q],
            output.trace["objective"][q],
            output.trace["nmse"][q],
        ]
        for q in range(n)
    ]
    return header, rows, output


def _phase_trial(args) -> bool:
    config_dict, n_samples, r, trial = args
    config = ExperimentConfig.from_dict(config_dict)
    config.n_samples = n_samples
    config.r = r
    rng = trial_rng(config.seed, trial)
    _, meas, x, noise_std = make_scene(config, rng, noise_seed=config.seed ^ trial)
    output = run_solver(config, meas, noise_std, x_ref=None)
    return nmse(output.x_hat, x) < SUCCESS_NMSE_ADMM


def _run_trials(jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_phase_trial, jobs))
    return [_phase_trial(j) for j in jobs]


def cmd_phase_transition(config: ExperimentConfig):
    """Empirical success rate over the (N_s, r) grid."""
    base = asdict(config)
    header = ["n_samples", "r", "trials", "success_rate"]
    rows = []
    for n_s in config.n_samples_list:
        for r in config.r_list:
            jobs = [(base, int(n_s), int(r), t) for t in range(config.trials)]
            wins = _run_trials(jobs, config.workers)
            rows.append([int(n_s), int(r), config.trials, float(np.mean(wins))])
    return header, rows


def torus_distance(a: float, b: float) -> float:
    d = abs(np.mod(a - b, 1.0))
    return float(min(d, 1.0 - d))


def frequency_errors(est_freqs: np.ndarray, true_freqs: np.ndarray, delta: float = DELTA_F):
    """Clipped minimum absolute error per estimated frequency, per dimension.

    Missing detections (fewer estimates than truths) each contribute delta.
    """
    d = true_freqs.shape[1]
    n_est = est_freqs.shape[0]
    errors = []
    for ell in range(n_est):
        ae = []
        for i in range(d):
            best = min(
                torus_distance(est_freqs[ell, i], true_freqs[m, i])
                for m in range(true_freqs.shape[0])
            )
            ae.append(min(best, delta))
        errors.append(ae)
    for _ in range(true_freqs.shape[0] - n_est):
        errors.append([delta] * d)
    return np.array(errors) if errors else np.zeros((0, d))


def _rmse_trial(config: ExperimentConfig, trial: int) -> np.ndarray:
    rng = trial_rng(config.seed, trial)
    model, meas, x, noise_std = make_scene(config, rng, noise_seed=config.seed ^ trial)
    output = run_solver(config, meas, noise_std)
    surface = music_spectrum(
        output.b_hat,
        meas.dims,
        [FrequencyBand(lo, hi) for lo, hi in config.bands],
        model_order=model.r,
        grid_step=config.grid_step,
    )
    est = locate_from_music(surface, model_order=model.r)
    ae = frequency_errors(est, model.freqs)
    return np.mean(ae**2, axis=0)  # per-dimension mean squared AE for this run


def cmd_rmse_snr(config: ExperimentConfig):
    """Mean RMSE of located frequencies over the SNR sweep."""
    header = ["snr_db", "runs", "rmse"]
    rows = []
    for snr in config.snr_list:
        cfg = ExperimentConfig.from_dict({**asdict(config), "snr_db": float(snr)})
        mse = np.mean([_rmse_trial(cfg, t) for t in range(config.trials)], axis=0)
        rows.append([float(snr), config.trials, float(np.mean(np.sqrt(mse)))])
    return header, rows


def cmd_dual_surface(config: ExperimentConfig):
    """Surface CSV rows (f_1..f_d, value) plus located peaks."""
    rng = trial_rng(config.seed, 0)
    model, meas, x, noise_std = make_scene(config, rng, noise_seed=config.seed)
    output = run_solver(config, meas, noise_std, x_ref=x)
    bands = [FrequencyBand(lo, hi) for lo, hi in config.bands]
    surface = dual_surface(output.dual_embedding, meas.dims, bands, config.grid_step)
    level = 1.0 if config.solver == "constrained" else config.solver_params(noise_std).lam
    peaks = locate_from_dual(surface, level=level)
    d = meas.dims.d
    header = [f"f_{i + 1}" for i in range(d)] + ["value"]
    mesh = np.meshgrid(*surface.grids, indexing="ij")
    rows = np.column_stack([m.ravel() for m in mesh] + [surface.values.ravel()])
    return header, rows.tolist(), peaks, output, model


def cmd_bench(config: ExperimentConfig):
    """Wall-clock time per problem size for one FS-ADMM run each."""
    header = ["n1", "n2", "iterations", "seconds"]
    rows = []
    for n in config.bench_sizes:
        cfg = ExperimentConfig.from_dict(
            {**asdict(config), "dims": (int(n), int(n)), "freqs": None}
        )
        rng = trial_rng(cfg.seed, 0)
        _, meas, x, noise_std = make_scene(cfg, rng, noise_seed=cfg.seed)
        start = time.perf_counter()
        run_solver(cfg, meas, noise_std)
        elapsed = time.perf_counter() - start
        iters = cfg.solver_params(noise_std).max_iters
        rows.append([int(n), int(n), iters, float(elapsed)])
    return header, rows


def write_table(path, header, rows, config: ExperimentConfig) -> None:
    meta = config.metadata()
    annotated = [f"# {k}={v}" for k, v in meta.items()]
    body = [",".join(header)]
    for row in rows:
        body.append(",".join(repr(c) if isinstance(c, float) else str(c) for c in row))
    from .serialization import atomic_write_text

    atomic_write_text(path, "\n".join(annotated + body) + "\n")
