"""Exact primal and dual semidefinite programs via a convex-modeling layer.

Instances are capped at 36 total samples: the programs carry a dense
(N_D + 1)-sized PSD block and one selector equality per generator offset,
which is comfortable for a general-purpose interior-point solver only at
desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .selectors import band_coefficients, band_selector, offset_grid, selector

MAX_TOTAL_SIZE = 36


@dataclass(frozen=True)
class Instance:
    sizes: tuple[int, ...]
    y: np.ndarray
    phi: np.ndarray
    bands: list[tuple[float, float]]

    def __post_init__(self):
        n = int(np.prod(self.sizes))
        if n > MAX_TOTAL_SIZE:
            raise ValueError(f"instance size {n} exceeds cap {MAX_TOTAL_SIZE}")
        if len(self.bands) != len(self.sizes):
            raise ValueError("need one band per dimension")
        if self.y.shape != (n,) or self.phi.shape != (n,):
            raise ValueError("y and phi must have length prod(sizes)")

    @property
    def n_total(self) -> int:
        return int(np.prod(self.sizes))

    @classmethod
    def from_scene(cls, scene: dict) -> "Instance":
        return cls(
            sizes=scene["sizes"], y=scene["y"], phi=scene["phi"],
            bands=scene["bands"],
        )


def default_lambda(noise_std: float, n_total: int) -> float:
    return noise_std * math.sqrt(2.0 * math.log(n_total))


def _structure_pieces(instance: Instance):
    """Selectors for every offset plus the band-shifted selector stacks."""
    sizes = instance.sizes
    offsets = offset_grid(sizes)
    sel = [selector(p, sizes) for p in offsets]
    band_sel = []
    for axis, (lo, hi) in enumerate(instance.bands):
        r0, r1 = band_coefficients(lo, hi)
        band_sel.append([band_selector(p, sizes, r0, r1, axis) for p in offsets])
    return offsets, sel, band_sel


def _solve(problem: cp.Problem, solver: str) -> None:
    options = {}
    if solver == "SCS":
        options = {"eps_abs": 1e-9, "eps_rel": 1e-9, "max_iters": 200_000}
    problem.solve(solver=solver, **options)
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise RuntimeError(f"oracle SDP not solved: status {problem.status}")


def solve_primal(
    instance: Instance,
    mode: str = "constrained",
    lam: float | None = None,
    solver: str = "SCS",
) -> dict:
    """Minimize the trace/t surrogate of the band-constrained atomic norm,
    subject to the block PSD and band-shifted PSD constraints."""
    if mode not in ("constrained", "regularized"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "regularized" and (lam is None or lam <= 0):
        raise ValueError("regularized mode requires lam > 0")
    n = instance.n_total
    sizes = instance.sizes
    n_bar = int(np.prod([s - 1 for s in sizes]))
    offsets, sel, band_sel = _structure_pieces(instance)
    rev = list(range(len(offsets)))[::-1]  # storage order reverses p to -p

    b = cp.Variable(len(offsets), complex=True, name="generator")
    x = cp.Variable(n, complex=True, name="x")
    big = cp.Variable((n + 1, n + 1), hermitian=True, name="block")
    t_mat = sum(s * b[k] for k, s in enumerate(sel))

    constraints = [
        b[rev] == cp.conj(b),  # Hermitian generator
        big >> 0,
        big[:n, :n] == t_mat,
        big[:n, n] == x,
    ]
    for axis in range(len(sizes)):
        tg = sum(s * b[k] for k, s in enumerate(band_sel[axis]))
        g = cp.Variable((n_bar, n_bar), hermitian=True)
        constraints += [g >> 0, g == tg]

    t = cp.real(big[n, n])
    surrogate = cp.real(cp.trace(t_mat)) / (2.0 * n) + t / 2.0
    if mode == "constrained":
        constraints.append(cp.multiply(instance.phi, x) == instance.y)
        objective = surrogate
    else:
        misfit = 0.5 * cp.sum_squares(instance.y - cp.multiply(instance.phi, x))
        objective = misfit + lam * surrogate

    problem = cp.Problem(cp.Minimize(objective), constraints)
    _solve(problem, solver)
    gen_shape = tuple(2 * s - 1 for s in sizes)
    return {
        "x": np.asarray(x.value).ravel(),
        "generator": np.asarray(b.value).reshape(gen_shape),
        "t": float(t.value),
        "objective": float(problem.value),
        "mode": mode,
        "lam": lam,
        "status": problem.status,
    }


def dual_constraint_rhs(mode: str, lam: float | None) -> float:
    """Right-hand side of the selector equality at the zero offset."""
    if mode == "constrained":
        return 1.0
    return float(lam) ** 2


def solve_dual(
    instance: Instance,
    mode: str = "constrained",
    lam: float | None = None,
    solver: str = "SCS",
) -> dict:
    """Maximize the data correlation subject to the dual-norm certificate
    constraints expressed through the selector matrices."""
    if mode not in ("constrained", "regularized"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "regularized" and (lam is None or lam <= 0):
        raise ValueError("regularized mode requires lam > 0")
    n = instance.n_total
    sizes = instance.sizes
    n_bar = int(np.prod([s - 1 for s in sizes]))
    offsets, sel, band_sel = _structure_pieces(instance)

    nu = cp.Variable(n, complex=True, name="nu")
    big = cp.Variable((n + 1, n + 1), hermitian=True, name="block")
    q = big[:n, :n]
    q_g = [cp.Variable((n_bar, n_bar), hermitian=True) for _ in sizes]

    constraints = [
        big >> 0,
        big[:n, n] == cp.multiply(instance.phi, nu),
        big[n, n] == 1.0,
    ]
    constraints += [g >> 0 for g in q_g]
    rhs = dual_constraint_rhs(mode, lam)
    for k in range(len(offsets)):
        lhs = cp.sum(cp.multiply(np.conj(sel[k]), q))
        for axis, g in enumerate(q_g):
            lhs = lhs + cp.sum(cp.multiply(np.conj(band_sel[axis][k]), g))
        constraints.append(lhs == (rhs if all(p == 0 for p in offsets[k]) else 0.0))

    data_corr = cp.real(cp.sum(cp.multiply(np.conj(instance.y), nu)))
    if mode == "constrained":
        objective = data_corr
    else:
        objective = data_corr - 0.5 * cp.sum_squares(nu)

    problem = cp.Problem(cp.Maximize(objective), constraints)
    _solve(problem, solver)
    return {
        "nu": np.asarray(nu.value).ravel(),
        "q": np.asarray(q.value),
        "q_g": [np.asarray(g.value) for g in q_g],
        "objective": float(problem.value),
        "mode": mode,
        "lam": lam,
        "status": problem.status,
    }
