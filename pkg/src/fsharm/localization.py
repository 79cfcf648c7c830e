"""Frequency and gain extraction: dual-polynomial surfaces, MUSIC on the
recovered block Toeplitz matrix, and least-squares gains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .tensors import Dims, Measurement, atom_vec, steering_vector
from .toeplitz import FrequencyBand, GeneratorTensor, build_toeplitz


@dataclass(frozen=True)
class DualSurface:
    """|Q(f)| sampled on a per-dimension grid restricted to the bands."""

    grids: tuple[np.ndarray, ...]  # frequencies mod 1, one array per dimension
    values: np.ndarray  # shape (len(g_1), ..., len(g_d)), nonnegative


@dataclass(frozen=True)
class Estimate:
    freqs: np.ndarray  # (r, d)
    gains: np.ndarray  # (r,)
    method: str


def band_grid(band: FrequencyBand, grid_step: float) -> np.ndarray:
    """Uniform grid over the band (inclusive of both edges), wrapped mod 1."""
    if grid_step <= 0:
        raise ValueError("grid_step must be > 0")
    width = band.width
    n = int(np.floor(width / grid_step + 1e-9)) + 1
    pts = band.f_low + grid_step * np.arange(n)
    if pts[-1] < band.f_low + width - 1e-12:
        pts = np.append(pts, band.f_low + width)
    return np.mod(pts, 1.0)


def _steering_matrix(grid: np.ndarray, n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.outer(grid, np.arange(n)))


def _contract_over_grids(vec_tensor: np.ndarray, grids, sizes) -> np.ndarray:
    """Evaluate sum_k conj(a(f))_k V_k over the grid product.

    vec_tensor may carry leading batch axes; the d trailing axes of size
    N_i are each contracted with conj(steering) for that dimension.
    """
    out = vec_tensor
    batch = out.ndim - len(sizes)
    for i, (grid, n) in enumerate(zip(grids, sizes)):
        s = np.conj(_steering_matrix(grid, n))
        # contract the current leading tensor axis; result axis goes last
        out = np.tensordot(out, s, axes=([batch], [1]))
    return out


def dual_surface(
    dual_embedding: np.ndarray,
    dims: Dims,
    bands: list[FrequencyBand],
    grid_step: float = 1e-3,
) -> DualSurface:
    """|a(f)^H (Phi^H nu)| on the product grid inside the bands."""
    grids = tuple(band_grid(b, grid_step) for b in bands)
    if any(g.size == 0 for g in grids):
        raise ValueError("empty grid")
    v = np.asarray(dual_embedding, dtype=complex).reshape(dims.sizes)
    q = _contract_over_grids(v, grids, dims.sizes)
    return DualSurface(grids=grids, values=np.abs(q))


def locate_peaks(
    surface: DualSurface,
    level: float | None = None,
    rel_tol: float = 0.1,
    max_peaks: int | None = None,
) -> np.ndarray:
    """Strict local maxima of the surface, thresholded at level*(1 - rel_tol).

    Maxima are taken over the full 3^d - 1 grid neighborhood (edges compare
    against available neighbors only). Returns an (r, d) array of frequencies.
    """
    if level is not None and not 0 < rel_tol < 1:
        raise ValueError("rel_tol must be in (0, 1)")
    vals = surface.values
    footprint = ndimage.maximum_filter(vals, size=3, mode="nearest")
    is_max = vals >= footprint
    if level is not None:
        is_max &= vals >= level * (1.0 - rel_tol)
    else:
        is_max &= vals > 0
    coords = np.argwhere(is_max)
    if coords.size == 0:
        return np.zeros((0, len(surface.grids)))
    peak_vals = vals[tuple(coords.T)]
    order = np.argsort(peak_vals)[::-1]
    coords = coords[order]
    # merge plateau duplicates in adjacent cells, keeping the larger value
    kept: list[np.ndarray] = []
    for c in coords:
        if all(np.max(np.abs(c - k)) > 1 for k in kept):
            kept.append(c)
    if max_peaks is not None:
        kept = kept[:max_peaks]
    return np.array(
        [[surface.grids[i][c[i]] for i in range(len(surface.grids))] for c in kept]
    )


def locate_from_dual(
    surface: DualSurface,
    level: float = 1.0,
    rel_tol: float = 0.1,
) -> np.ndarray:
    """Peaks of the dual surface at the expected modulus level (1 or lambda)."""
    return locate_peaks(surface, level=level, rel_tol=rel_tol)


def choose_model_order(eigvals: np.ndarray, floor: float = 1e-6) -> int:
    """Largest relative gap in the descending eigenvalue sequence."""
    w = np.sort(np.abs(eigvals))[::-1]
    w = np.clip(w, floor, None)
    if w.size < 2 or w[0] <= floor:
        return 1
    ratios = w[:-1] / w[1:]
    return int(np.argmax(ratios)) + 1


def music_spectrum(
    b_hat: GeneratorTensor,
    dims: Dims,
    bands: list[FrequencyBand],
    model_order: int | None = None,
    grid_step: float = 1e-3,
) -> DualSurface:
    """MUSIC pseudospectrum 1 / ||E_n^H a(f)||^2 of T^d(b_hat) on the bands."""
    t_mat = build_toeplitz(b_hat)
    t_mat = 0.5 * (t_mat + t_mat.conj().T)
    w, v = np.linalg.eigh(t_mat)
    w, v = w[::-1], v[:, ::-1]
    if model_order is None:
        model_order = choose_model_order(w)
    if model_order < 1 or model_order >= dims.n_total:
        raise ValueError("model order must satisfy 1 <= r < N_D")
    noise = v[:, model_order:]
    grids = tuple(band_grid(b, grid_step) for b in bands)
    # E_n^H a(f) over the grid product; contract each tensor axis with conj(s_i)
    m = np.conj(noise.T).reshape((noise.shape[1],) + dims.sizes)
    proj = _contract_over_grids(np.conj(m), grids, dims.sizes)
    power = np.sum(np.abs(proj) ** 2, axis=0)
    return DualSurface(grids=grids, values=1.0 / np.maximum(power, 1e-300))


def locate_from_music(
    surface: DualSurface,
    model_order: int | None = None,
    quantile: float = 0.99,
) -> np.ndarray:
    """Pseudospectrum peaks; keeps the model_order largest when given."""
    level = float(np.quantile(surface.values, quantile))
    peaks = locate_peaks(surface, level=level, rel_tol=0.5, max_peaks=model_order)
    return peaks


def estimate_gains(freqs: np.ndarray, meas: Measurement) -> np.ndarray:
    """Least-squares gains argmin ||y - Phi A sigma||."""
    freqs = np.atleast_2d(freqs)
    if freqs.shape[0] < 1:
        raise ValueError("need at least one frequency")
    a = np.stack([atom_vec(f, meas.dims) for f in freqs], axis=1)
    design = meas.phi[:, None] * a
    if np.linalg.matrix_rank(design) < freqs.shape[0]:
        raise ValueError("rank-deficient design matrix")
    gains, *_ = np.linalg.lstsq(design, meas.y, rcond=None)
    return gains


def localize(
    output_dual_embedding: np.ndarray,
    meas: Measurement,
    bands: list[FrequencyBand],
    level: float = 1.0,
    rel_tol: float = 0.1,
    grid_step: float = 1e-3,
) -> Estimate:
    """Dual-polynomial localization followed by least-squares gains."""
    surface = dual_surface(output_dual_embedding, meas.dims, bands, grid_step)
    freqs = locate_from_dual(surface, level=level, rel_tol=rel_tol)
    if freqs.shape[0] == 0:
        return Estimate(freqs=freqs, gains=np.zeros(0, dtype=complex), method="dual")
    gains = estimate_gains(freqs, meas)
    return Estimate(freqs=freqs, gains=gains, method="dual")
