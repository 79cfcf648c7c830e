"""Multi-level block Toeplitz construction, its averaging adjoint, band
polynomials, shifted Toeplitz matrices and PSD feasibility certificates.

A generator tensor for sizes (N_1, ..., N_d) has shape (2N_1-1, ..., 2N_d-1);
the offset p_i in [-N_i+1, N_i-1] is stored at index p_i + N_i - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tensors import Dims, SpectralModel, atom_vec


@dataclass(frozen=True)
class FrequencyBand:
    """Closed interval [f_low, f_high] on the unit torus.

    f_low > f_high means the wrap-around band [0,1) minus (f_high, f_low).
    """

    f_low: float
    f_high: float

    def __post_init__(self):
        lo = float(np.mod(self.f_low, 1.0))
        hi = float(np.mod(self.f_high, 1.0))
        if lo == hi:
            raise ValueError("degenerate band: f_low == f_high")
        object.__setattr__(self, "f_low", lo)
        object.__setattr__(self, "f_high", hi)

    @property
    def width(self) -> float:
        return float(np.mod(self.f_high - self.f_low, 1.0))

    def contains(self, f: float) -> bool:
        return np.mod(f - self.f_low, 1.0) <= self.width + 1e-15


FULL_BAND_EPS = 1e-6


def full_band() -> FrequencyBand:
    """Essentially unconstrained band [eps, 1-eps], used to disable the prior."""
    return FrequencyBand(FULL_BAND_EPS, 1.0 - FULL_BAND_EPS)


@dataclass(frozen=True)
class BandPolynomial:
    """Degree-one Hermitian trigonometric polynomial vanishing at the band edges."""

    r0: float
    r1: complex

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return self.r0 + 2.0 * np.real(self.r1 * np.exp(-2j * np.pi * f))


def band_polynomial(band: FrequencyBand) -> BandPolynomial:
    """g(f) = r0 + 2 Re(r1 e^{-i2pi f}): zero at the band edges, positive
    strictly inside the band and negative strictly outside."""
    sgn = np.sign(band.f_high - band.f_low)
    r0 = -2.0 * np.cos(np.pi * (band.f_high - band.f_low)) * sgn
    r1 = np.exp(1j * np.pi * (band.f_low + band.f_high)) * sgn
    return BandPolynomial(r0=float(r0), r1=complex(r1))


@dataclass(frozen=True)
class GeneratorTensor:
    """d-way tensor generating all diagonals of a d-level block Toeplitz matrix."""

    dims: Dims
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        expected = tuple(2 * n - 1 for n in self.dims.sizes)
        if values.shape != expected:
            raise ValueError(f"generator shape {values.shape}, expected {expected}")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, dims: Dims) -> "GeneratorTensor":
        return cls(dims, np.zeros(tuple(2 * n - 1 for n in dims.sizes), dtype=complex))

    @classmethod
    def from_model(cls, model: SpectralModel, dims: Dims) -> "GeneratorTensor":
        """sum_l sigma_l sbar(f_1) x ... x sbar(f_d); rank-r ML Toeplitz generator."""
        values = np.zeros(tuple(2 * n - 1 for n in dims.sizes), dtype=complex)
        for f, sigma in zip(model.freqs, model.gains):
            part = np.ones((), dtype=complex)
            for fi, ni in zip(f, dims.sizes):
                k = np.arange(1 - ni, ni)
                part = np.multiply.outer(part, np.exp(2j * np.pi * k * fi))
            values += sigma * part.reshape(values.shape)
        return cls(dims, values)


@dataclass(frozen=True)
class PsdCertificate:
    min_eigenvalue: float
    tolerance: float
    passed: bool

    @classmethod
    def check(cls, matrix: np.ndarray, tol: float | None = None) -> "PsdCertificate":
        h = 0.5 * (matrix + matrix.conj().T)
        if tol is None:
            tol = 1e-8 * max(1.0, float(np.linalg.norm(h)))
        min_eig = float(np.linalg.eigvalsh(h)[0]) if h.size else 0.0
        return cls(min_eigenvalue=min_eig, tolerance=float(tol), passed=min_eig >= -tol)


@lru_cache(maxsize=32)
def _offset_indices(sizes: tuple[int, ...]):
    """For each (row, col) of the N_D x N_D Toeplitz matrix, the index tuple
    into the generator tensor (offset m - n shifted by N_i - 1)."""
    idx = np.indices(sizes).reshape(len(sizes), -1)  # (d, N_D)
    off = idx[:, :, None] - idx[:, None, :]  # (d, N_D, N_D)
    shifted = tuple(off[j] + sizes[j] - 1 for j in range(len(sizes)))
    return shifted


@lru_cache(maxsize=32)
def _flat_offset_and_beta(sizes: tuple[int, ...]):
    """Flat scatter index into the generator for each Toeplitz entry, and the
    per-offset multiplicity beta_p = prod(N_i - |p_i|)."""
    shifted = _offset_indices(sizes)
    gen_shape = tuple(2 * n - 1 for n in sizes)
    flat = np.ravel_multi_index(shifted, gen_shape)
    beta = np.ones(gen_shape)
    for j, n in enumerate(sizes):
        p = np.arange(1 - n, n)
        shape = [1] * len(sizes)
        shape[j] = 2 * n - 1
        beta = beta * (n - np.abs(p)).reshape(shape)
    return flat, beta


def beta_weight(p, dims: Dims) -> int:
    """prod(N_i - |p_i|) for an offset multi-index p."""
    p = np.asarray(p, dtype=int).ravel()
    if p.shape[0] != dims.d:
        raise ValueError("offset dimension mismatch")
    if np.any(np.abs(p) > np.asarray(dims.sizes) - 1):
        raise ValueError(f"offset {tuple(p)} out of range for sizes {dims.sizes}")
    return int(np.prod(np.asarray(dims.sizes) - np.abs(p)))


def beta_weights(dims: Dims) -> np.ndarray:
    """All beta_p arranged on the generator-tensor grid."""
    _, beta = _flat_offset_and_beta(dims.sizes)
    return beta


def build_toeplitz(gen: GeneratorTensor) -> np.ndarray:
    """T^d with T[lin(m), lin(n)] = B(m - n)."""
    shifted = _offset_indices(gen.dims.sizes)
    return gen.values[shifted]


def toeplitz_average(matrix: np.ndarray, dims: Dims) -> GeneratorTensor:
    """Averaging adjoint: output(p) = mean of M over entries with m - n = p.

    Exactly inverts build_toeplitz on its range.
    """
    n_d = dims.n_total
    matrix = np.asarray(matrix)
    if matrix.shape != (n_d, n_d):
        raise ValueError(f"matrix shape {matrix.shape}, expected {(n_d, n_d)}")
    flat, beta = _flat_offset_and_beta(dims.sizes)
    acc = np.zeros(beta.size, dtype=complex)
    np.add.at(acc, flat.ravel(), matrix.ravel())
    return GeneratorTensor(dims, (acc.reshape(beta.shape) / beta))


def build_tg(gen: GeneratorTensor, poly: BandPolynomial, axis: int) -> np.ndarray:
    """Band-shifted Toeplitz matrix T_g^d of size prod(N_i - 1) squared.

    Entry at reduced multi-offset p = m - n is
    r1* B(p + e_axis) + r0 B(p) + r1 B(p - e_axis).
    """
    sizes = gen.dims.sizes
    if any(n < 2 for n in sizes):
        raise ValueError("all sizes must be >= 2 for band-shifted Toeplitz")
    if not 0 <= axis < len(sizes):
        raise ValueError("axis out of range")
    reduced = tuple(n - 1 for n in sizes)
    shifted = list(_offset_indices(reduced))
    # reduced offsets p_i live in [2-N_i, N_i-2]; re-center into the full
    # generator where p_i is stored at p_i + N_i - 1
    idx = tuple(s + 1 for s in shifted)
    b = gen.values
    idx_plus = tuple(s + (2 if j == axis else 1) for j, s in enumerate(shifted))
    idx_minus = tuple(s + (0 if j == axis else 1) for j, s in enumerate(shifted))
    r1 = poly.r1
    return np.conj(r1) * b[idx_plus] + poly.r0 * b[idx] + r1 * b[idx_minus]


def psd_project(h: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD matrix: symmetrize, clamp negative eigenvalues."""
    h = np.asarray(h)
    if not np.all(np.isfinite(h)):
        raise ValueError("non-finite entries in matrix to project")
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def check_fs_feasible(
    gen: GeneratorTensor,
    bands: list[FrequencyBand],
    tol: float | None = None,
) -> list[PsdCertificate]:
    """Certificates for T^d >= 0 and T_{g_i}^d >= 0, i = 1..d."""
    if len(bands) != gen.dims.d:
        raise ValueError("need one band per dimension")
    certs = [PsdCertificate.check(build_toeplitz(gen), tol)]
    for i, band in enumerate(bands):
        certs.append(PsdCertificate.check(build_tg(gen, band_polynomial(band), i), tol))
    return certs
