"""Complex d-way tensor model: steering vectors, atoms, synthesis, observation.

Vectorization convention: a tensor of shape (N_1, ..., N_d) is flattened in
C order, so the last dimension varies fastest and the linear index of the
(0-based) multi-index (k_1, ..., k_d) is k_1 * prod(N_2..N_d) + ... + k_d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np


@dataclass(frozen=True)
class Dims:
    """Per-dimension sizes (N_1, ..., N_d)."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) < 1 or any(n < 1 for n in sizes):
            raise ValueError(f"sizes must be positive integers, got {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def n_total(self) -> int:
        """N_D = prod N_i."""
        return prod(self.sizes)

    @property
    def n_total_bar(self) -> int:
        """prod (N_i - 1), the size of the band-shifted Toeplitz matrices."""
        return prod(n - 1 for n in self.sizes)

    @property
    def reduced(self) -> "Dims":
        if any(n < 2 for n in self.sizes):
            raise ValueError("all sizes must be >= 2 to reduce")
        return Dims(tuple(n - 1 for n in self.sizes))


@dataclass(frozen=True)
class SpectralModel:
    """r frequency vectors in [0,1)^d with complex gains."""

    freqs: np.ndarray  # (r, d), real
    gains: np.ndarray  # (r,), complex

    def __post_init__(self):
        freqs = np.atleast_2d(np.asarray(self.freqs, dtype=float))
        gains = np.atleast_1d(np.asarray(self.gains, dtype=complex))
        if freqs.size == 0:
            freqs = freqs.reshape(0, max(1, freqs.shape[-1] if freqs.ndim else 1))
        if freqs.shape[0] != gains.shape[0]:
            raise ValueError("freqs and gains must have matching length")
        if not np.all(np.isfinite(gains)):
            raise ValueError("gains must be finite")
        object.__setattr__(self, "freqs", np.mod(freqs, 1.0))
        object.__setattr__(self, "gains", gains)

    @property
    def r(self) -> int:
        return self.freqs.shape[0]


@dataclass(frozen=True)
class Measurement:
    """Vectorized observation y = Phi x + n with diagonal Phi."""

    dims: Dims
    y: np.ndarray  # (N_D,), complex
    phi: np.ndarray  # (N_D,), complex diagonal of Phi

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex).ravel()
        phi = np.asarray(self.phi, dtype=complex).ravel()
        if y.shape[0] != self.dims.n_total or phi.shape[0] != self.dims.n_total:
            raise ValueError("y and phi must have length N_D")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi entries must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "phi", phi)


def steering_vector(f: float, n: int) -> np.ndarray:
    """s(f, N): entries exp(i 2 pi k f) for k = 0..N-1."""
    if n < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(n)
    return np.exp(2j * np.pi * k * np.mod(f, 1.0))


def atom(f, dims: Dims) -> np.ndarray:
    """Outer product of per-dimension steering vectors, shape dims.sizes."""
    f = np.asarray(f, dtype=float).ravel()
    if f.shape[0] != dims.d:
        raise ValueError(f"frequency vector has length {f.shape[0]}, expected {dims.d}")
    out = np.ones((), dtype=complex)
    for fi, ni in zip(f, dims.sizes):
        out = np.multiply.outer(out, steering_vector(fi, ni))
    return out.reshape(dims.sizes)


def atom_vec(f, dims: Dims) -> np.ndarray:
    """Vectorized atom a(f), length N_D."""
    return atom(f, dims).ravel()


def synthesize(model: SpectralModel, dims: Dims) -> np.ndarray:
    """Superposition sum_l sigma_l A(f_l), shape dims.sizes."""
    x = np.zeros(dims.sizes, dtype=complex)
    for f, sigma in zip(model.freqs, model.gains):
        x += sigma * atom(f, dims)
    return x


def observe(
    x_tensor: np.ndarray,
    p_tensor: np.ndarray,
    noise_std: float = 0.0,
    seed: int | None = None,
) -> Measurement:
    """Form y = Phi x + n with complex circular Gaussian noise.

    noise_std is the per-entry standard deviation of the complex noise:
    E|n|^2 = noise_std^2, real and imaginary parts each of variance
    noise_std^2 / 2.
    """
    x_tensor = np.asarray(x_tensor, dtype=complex)
    p_tensor = np.asarray(p_tensor, dtype=complex)
    if x_tensor.shape != p_tensor.shape:
        raise ValueError("observation tensor shape mismatch")
    dims = Dims(x_tensor.shape)
    phi = p_tensor.ravel()
    y = phi * x_tensor.ravel()
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        scale = noise_std / np.sqrt(2.0)
        y = y + rng.normal(scale=scale, size=y.shape) + 1j * rng.normal(
            scale=scale, size=y.shape
        )
    return Measurement(dims=dims, y=y, phi=phi)


def snr_to_noise_var(r: int, snr_db: float) -> float:
    """Noise variance from SNR = r / var, SNR given in dB."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return r / 10.0 ** (snr_db / 10.0)


def nmse(x_hat: np.ndarray, x_ref: np.ndarray) -> float:
    """||x_hat - x_ref||_2 / ||x_ref||_2."""
    x_hat = np.asarray(x_hat).ravel()
    x_ref = np.asarray(x_ref).ravel()
    if x_hat.shape != x_ref.shape:
        raise ValueError("length mismatch")
    denom = np.linalg.norm(x_ref)
    if denom == 0:
        raise ValueError("reference vector has zero norm")
    return float(np.linalg.norm(x_hat - x_ref) / denom)


def random_model(
    r: int,
    bands,
    rng: np.random.Generator,
    unit_modulus: bool = True,
) -> SpectralModel:
    """Draw r frequencies uniformly inside the given bands, random-phase gains."""
    freqs = np.empty((r, len(bands)))
    for i, band in enumerate(bands):
        lo, hi = band.f_low, band.f_high
        width = np.mod(hi - lo, 1.0)
        freqs[:, i] = np.mod(lo + width * rng.random(r), 1.0)
    phases = np.exp(2j * np.pi * rng.random(r))
    gains = phases if unit_modulus else phases * (0.5 + rng.random(r))
    return SpectralModel(freqs=freqs, gains=gains)
