"""Selector matrices expressing multi-level block Toeplitz structure as
linear combinations of generator entries.

For sizes (N_1, ..., N_d), the selector for offset p is the 0/1 matrix with
ones exactly where the multi-index difference m - n equals p; the full and
band-shifted Toeplitz matrices are then sums over offsets weighted by the
generator entries. Vectorization is C order (last dimension fastest).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def offset_grid(sizes: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All offsets p with p_i in [-N_i+1, N_i-1], in C order of the
    storage grid (index p_i + N_i - 1)."""
    return list(itertools.product(*(range(1 - n, n) for n in sizes)))


def reduced_offset_grid(sizes: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Offsets of the reduced (band-shifted) grid: p_i in [2-N_i, N_i-2]."""
    return list(itertools.product(*(range(2 - n, n - 1) for n in sizes)))


@lru_cache(maxsize=8)
def _difference_table(sizes: tuple[int, ...]) -> np.ndarray:
    idx = np.indices(sizes).reshape(len(sizes), -1)
    return idx[:, :, None] - idx[:, None, :]  # (d, N, N)


def _selector_for(sizes: tuple[int, ...], p: tuple[int, ...]) -> np.ndarray:
    diff = _difference_table(sizes)
    mask = np.ones(diff.shape[1:], dtype=bool)
    for j, pj in enumerate(p):
        mask &= diff[j] == pj
    return mask.astype(float)


def selector(p: tuple[int, ...], sizes: tuple[int, ...]) -> np.ndarray:
    """Selector for the full grid; indicator of m - n = p."""
    if any(abs(pj) > n - 1 for pj, n in zip(p, sizes)):
        raise ValueError(f"offset {p} out of range for sizes {sizes}")
    return _selector_for(sizes, p)


def reduced_selector(p: tuple[int, ...], sizes: tuple[int, ...]) -> np.ndarray:
    """Selector on the reduced grid (sizes N_i - 1); zero matrix when the
    offset leaves the reduced range."""
    reduced = tuple(n - 1 for n in sizes)
    n_bar = int(np.prod(reduced))
    if any(abs(pj) > n - 2 for pj, n in zip(p, sizes)):
        return np.zeros((n_bar, n_bar))
    return _selector_for(reduced, p)


def band_coefficients(f_low: float, f_high: float) -> tuple[float, complex]:
    """Coefficients (r0, r1) of the degree-one polynomial vanishing at the
    band edges, positive inside, negative outside."""
    lo, hi = f_low % 1.0, f_high % 1.0
    if lo == hi:
        raise ValueError("degenerate band")
    sgn = np.sign(hi - lo)
    r0 = float(-2.0 * np.cos(np.pi * (hi - lo)) * sgn)
    r1 = complex(np.exp(1j * np.pi * (lo + hi)) * sgn)
    return r0, r1


def band_selector(
    p: tuple[int, ...],
    sizes: tuple[int, ...],
    r0: float,
    r1: complex,
    axis: int,
) -> np.ndarray:
    """Band-shifted selector: conj(r1) R(p - e_axis) + r0 R(p) + r1 R(p + e_axis)
    with R the reduced selector (zero outside its range)."""
    p = tuple(p)
    e = tuple(1 if j == axis else 0 for j in range(len(sizes)))
    minus = tuple(pj - ej for pj, ej in zip(p, e))
    plus = tuple(pj + ej for pj, ej in zip(p, e))
    return (
        np.conj(r1) * reduced_selector(minus, sizes)
        + r0 * reduced_selector(p, sizes)
        + r1 * reduced_selector(plus, sizes)
    )


def kron_selector(p: tuple[int, ...], sizes: tuple[int, ...]) -> np.ndarray:
    """Same selector built as a Kronecker product of one-dimensional
    selectors; used to cross-check the direct construction."""
    out = np.ones((1, 1))
    for pj, n in zip(p, sizes):
        one_d = np.zeros((n, n))
        for m in range(n):
            col = m - pj
            if 0 <= col < n:
                one_d[m, col] = 1.0
        out = np.kron(out, one_d)
    return out


def build_toeplitz_from_selectors(
    gen_values: np.ndarray, sizes: tuple[int, ...]
) -> np.ndarray:
    """Sum over offsets of selector(p) * generator(p)."""
    n = int(np.prod(sizes))
    out = np.zeros((n, n), dtype=complex)
    flat = np.asarray(gen_values, dtype=complex).ravel()
    for k, p in enumerate(offset_grid(sizes)):
        out += selector(p, sizes) * flat[k]
    return out


def build_band_shifted(
    gen_values: np.ndarray,
    sizes: tuple[int, ...],
    f_low: float,
    f_high: float,
    axis: int,
) -> np.ndarray:
    """Sum over offsets of band_selector(p) * generator(p)."""
    r0, r1 = band_coefficients(f_low, f_high)
    n_bar = int(np.prod([n - 1 for n in sizes]))
    out = np.zeros((n_bar, n_bar), dtype=complex)
    flat = np.asarray(gen_values, dtype=complex).ravel()
    for k, p in enumerate(offset_grid(sizes)):
        out += band_selector(p, sizes, r0, r1, axis) * flat[k]
    return out
