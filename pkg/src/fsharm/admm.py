"""ADMM solvers for the frequency-selective atomic-norm SDPs.

Two variants share one iteration engine: a noiseless solver enforcing the
data constraint y = Phi x exactly, and a regularized solver trading data fit
against the trace/t objective with weight lambda. Each iteration refines the
Toeplitz generator toward simultaneous feasibility of the band-shifted PSD
constraints by Jacobi sweeps against PSD-projected targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensors import Dims, Measurement, nmse
from .toeplitz import (
    BandPolynomial,
    FrequencyBand,
    GeneratorTensor,
    band_polynomial,
    build_tg,
    build_toeplitz,
    psd_project,
    toeplitz_average,
)


@dataclass
class AdmmParams:
    rho: float = 0.05
    varrho: float = 9.0
    inner_iters: int = 10
    max_iters: int = 2000
    lam: float | None = None  # regularized solver only
    early_stop_tol: float | None = None  # optional primal-residual stop, off by default

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.varrho <= 1:
            raise ValueError("varrho must be > 1")
        if self.inner_iters < 0 or self.max_iters < 1:
            raise ValueError("invalid iteration counts")

    @classmethod
    def noiseless_defaults(cls, **kw) -> "AdmmParams":
        base = dict(rho=0.05, varrho=9.0, inner_iters=10, max_iters=2000)
        base.update(kw)
        return cls(**base)

    @classmethod
    def noisy_defaults(cls, lam: float, **kw) -> "AdmmParams":
        base = dict(rho=0.05, varrho=3.0, inner_iters=20, max_iters=1000, lam=lam)
        base.update(kw)
        return cls(**base)


def default_lambda(noise_std: float, n_total: int) -> float:
    """noise_std * sqrt(2 ln N_D); the log base is a convention choice."""
    return noise_std * math.sqrt(2.0 * math.log(n_total))


@dataclass
class SolverOutput:
    x_hat: np.ndarray
    b_hat: GeneratorTensor
    t_hat: float
    dual_embedding: np.ndarray  # Phi^H nu_hat = -2 * ubar_hat
    trace: dict[str, np.ndarray]
    mode: str


class DivergenceError(RuntimeError):
    def __init__(self, iteration: int):
        super().__init__(f"non-finite iterate at ADMM iteration {iteration}")
        self.iteration = iteration


def refine_generator(
    b_temp: GeneratorTensor,
    psd_targets: list[np.ndarray] | None,
    polys: list[BandPolynomial],
    varrho: float,
    inner_iters: int,
) -> GeneratorTensor:
    """Jacobi sweeps pulling the generator toward PSD-projected targets.

    psd_targets[i], when given, is the averaging adjoint of the PSD
    projection of T_{g_i}(b_temp) on the reduced grid with offsets p_i in
    [2-N_i, N_i-2], held fixed through all sweeps of dimension i. When
    psd_targets is None the target is recomputed from the current iterate
    before every sweep, which keeps the sweep a no-op on feasible
    generators and is stable for small varrho (the fixed-target variant
    amplifies in-band modes by roughly (1 + g_max/(|r0|(1+varrho)))^K and
    diverges at varrho = 3, K = 20). Boundary offsets are untouched.
    """
    dims = b_temp.dims
    sizes = dims.sizes
    d = len(sizes)
    if psd_targets is not None and len(psd_targets) != d:
        raise ValueError("need one target per dimension")
    if len(polys) != d:
        raise ValueError("need one polynomial per dimension")
    values = b_temp.values.copy()
    inner = tuple(slice(1, 2 * n - 2) for n in sizes)
    reduced = dims.reduced if inner_iters > 0 else None
    for i in range(d):
        r0 = polys[i].r0
        if abs(r0) < 1e-8:
            raise ValueError("band width too close to 1/2: r0 is numerically zero")
        r1 = polys[i].r1
        plus = tuple(
            slice(2, 2 * n - 1) if j == i else s
            for j, (s, n) in enumerate(zip(inner, sizes))
        )
        minus = tuple(
            slice(0, 2 * n - 3) if j == i else s
            for j, (s, n) in enumerate(zip(inner, sizes))
        )
        for _ in range(inner_iters):
            if psd_targets is None:
                current = GeneratorTensor(dims, values)
                target = toeplitz_average(
                    psd_project(build_tg(current, polys[i], i)), reduced
                ).values
            else:
                target = psd_targets[i]
            new_inner = target / (r0 * (1.0 + varrho)) + (
                varrho * values[inner]
                - (np.conj(r1) / r0) * values[plus]
                - (r1 / r0) * values[minus]
            ) / (1.0 + varrho)
            updated = values.copy()
            updated[inner] = new_inner
            values = updated
    return GeneratorTensor(dims, values)


def _solve(
    meas: Measurement,
    bands: list[FrequencyBand],
    params: AdmmParams,
    mode: str,
    x_ref: np.ndarray | None = None,
) -> SolverOutput:
    dims = meas.dims
    if len(bands) != dims.d:
        raise ValueError("need one band per dimension")
    constrained = mode == "constrained"
    if not constrained and (params.lam is None or params.lam <= 0):
        raise ValueError("regularized solver requires lambda > 0")
    lam = 1.0 if constrained else float(params.lam)
    rho = params.rho
    n_d = dims.n_total
    reduced = dims.reduced
    polys = [band_polynomial(b) for b in bands]
    y, phi = meas.y, meas.phi
    abs_phi2 = np.abs(phi) ** 2

    theta = np.zeros((n_d + 1, n_d + 1), dtype=complex)
    dual = np.zeros((n_d + 1, n_d + 1), dtype=complex)
    u_vec = np.zeros(n_d, dtype=complex)

    center = tuple(n - 1 for n in dims.sizes)
    n_iters = params.max_iters
    trace = {
        key: np.zeros(n_iters)
        for key in ("primal_residual", "data_residual", "objective")
    }
    if x_ref is not None:
        trace["nmse"] = np.zeros(n_iters)

    x = np.zeros(n_d, dtype=complex)
    b_hat = GeneratorTensor.zeros(dims)
    t = 0.0
    used = 0
    for q in range(n_iters):
        bar_theta_mat = theta[:n_d, :n_d]
        bar_theta_vec = theta[:n_d, n_d]
        theta_corner = theta[n_d, n_d].real
        bar_u_mat = dual[:n_d, :n_d]
        bar_u_vec = dual[:n_d, n_d]
        u_corner = dual[n_d, n_d].real

        if constrained:
            # diagonal Phi makes the x-solve an elementwise division
            x = (
                rho * np.conj(phi) * y
                + np.conj(phi) * u_vec
                + 2.0 * bar_u_vec
                + 2.0 * rho * bar_theta_vec
            ) / (rho * abs_phi2 + 2.0 * rho)
        else:
            x = (np.conj(phi) * y + 2.0 * bar_u_vec + 2.0 * rho * bar_theta_vec) / (
                abs_phi2 + 2.0 * rho
            )
        b_temp = toeplitz_average(bar_theta_mat + bar_u_mat / rho, dims)
        b_temp.values[center] -= lam / (2.0 * rho * n_d)
        t = theta_corner + (u_corner - lam / 2.0) / rho

        if params.inner_iters > 0:
            b_hat = refine_generator(b_temp, None, polys, params.varrho, params.inner_iters)
        else:
            b_hat = b_temp

        big = np.empty((n_d + 1, n_d + 1), dtype=complex)
        big[:n_d, :n_d] = build_toeplitz(b_hat)
        big[:n_d, n_d] = x
        big[n_d, :n_d] = np.conj(x)
        big[n_d, n_d] = t
        if not np.all(np.isfinite(big)):
            raise DivergenceError(q)
        theta = psd_project(big - dual / rho)
        dual = dual + rho * (theta - big)
        if constrained:
            u_vec = u_vec + rho * (y - phi * x)

        if not np.all(np.isfinite(theta)):
            raise DivergenceError(q)

        primal_res = float(np.linalg.norm(theta - big))
        data_res = float(np.linalg.norm(y - phi * x))
        tr_term = float(np.real(np.trace(big[:n_d, :n_d]))) / (2.0 * n_d)
        if constrained:
            objective = tr_term + t / 2.0
        else:
            objective = 0.5 * data_res**2 + lam * tr_term + lam * t / 2.0
        trace["primal_residual"][q] = primal_res
        trace["data_residual"][q] = data_res
        trace["objective"][q] = objective
        if x_ref is not None:
            trace["nmse"][q] = nmse(x, x_ref)
        used = q + 1
        if params.early_stop_tol is not None and primal_res < params.early_stop_tol:
            break

    trace = {k: v[:used] for k, v in trace.items()}
    dual_embedding = -2.0 * dual[:n_d, n_d]
    return SolverOutput(
        x_hat=x,
        b_hat=b_hat,
        t_hat=float(t),
        dual_embedding=dual_embedding,
        trace=trace,
        mode=mode,
    )


def solve_constrained(
    meas: Measurement,
    bands: list[FrequencyBand],
    params: AdmmParams | None = None,
    x_ref: np.ndarray | None = None,
) -> SolverOutput:
    """Noiseless solver enforcing y = Phi x exactly at convergence."""
    return _solve(meas, bands, params or AdmmParams.noiseless_defaults(), "constrained", x_ref)


def solve_regularized(
    meas: Measurement,
    bands: list[FrequencyBand],
    params: AdmmParams,
    x_ref: np.ndarray | None = None,
) -> SolverOutput:
    """Noisy solver with lambda-weighted atomic-norm regularization."""
    return _solve(meas, bands, params, "regularized", x_ref)


@dataclass
class SolverState:
    """A full primal/dual state, used for checking the augmented Lagrangian."""

    x: np.ndarray
    b: GeneratorTensor
    t: float
    theta: np.ndarray  # (N_D+1) x (N_D+1) Hermitian
    dual: np.ndarray  # (N_D+1) x (N_D+1) Hermitian
    u_vec: np.ndarray | None = None  # extra dual column, constrained mode only


def augmented_lagrangian_value(
    state: SolverState,
    meas: Measurement,
    params: AdmmParams,
    mode: str,
):
    """Smooth part of the augmented Lagrangian and its analytic gradients.

    The PSD indicator terms are excluded. Returns
    (value, grad_x, grad_t, grad_b) where grad_b has the generator shape and
    complex gradients follow the d/dRe + i d/dIm convention.
    """
    dims = meas.dims
    n_d = dims.n_total
    rho = params.rho
    constrained = mode == "constrained"
    lam = 1.0 if constrained else float(params.lam)
    y, phi = meas.y, meas.phi

    x, t = state.x, state.t
    t_mat = build_toeplitz(state.b)
    bar_theta_mat = state.theta[:n_d, :n_d]
    bar_theta_vec = state.theta[:n_d, n_d]
    theta_corner = state.theta[n_d, n_d].real
    bar_u_mat = state.dual[:n_d, :n_d]
    bar_u_vec = state.dual[:n_d, n_d]
    u_corner = state.dual[n_d, n_d].real

    resid_mat = bar_theta_mat - t_mat
    resid_vec = bar_theta_vec - x
    resid_t = theta_corner - t
    resid_data = y - phi * x

    value = (
        lam * np.real(np.trace(t_mat)) / (2.0 * n_d)
        + lam * t / 2.0
        + np.real(np.vdot(resid_mat, bar_u_mat))
        + 2.0 * np.real(np.vdot(resid_vec, bar_u_vec))
        + u_corner * resid_t
        + 0.5 * rho * np.linalg.norm(resid_mat) ** 2
        + rho * np.linalg.norm(resid_vec) ** 2
        + 0.5 * rho * resid_t**2
    )
    if constrained:
        # the data equality is a constraint: multiplier term plus rho penalty
        value += np.real(np.vdot(resid_data, state.u_vec))
        value += 0.5 * rho * np.linalg.norm(resid_data) ** 2
    else:
        value += 0.5 * np.linalg.norm(resid_data) ** 2

    if constrained:
        grad_x = (
            rho * np.conj(phi) * (phi * x - y)
            - np.conj(phi) * state.u_vec
            - 2.0 * bar_u_vec
            + 2.0 * rho * (x - bar_theta_vec)
        )
    else:
        grad_x = (
            np.conj(phi) * (phi * x - y)
            - 2.0 * bar_u_vec
            + 2.0 * rho * (x - bar_theta_vec)
        )
    grad_t = lam / 2.0 - u_corner + rho * (t - theta_corner)

    from .toeplitz import beta_weights

    beta = beta_weights(dims)
    avg = toeplitz_average(rho * bar_theta_mat + bar_u_mat, dims).values
    grad_b = beta * (rho * state.b.values - avg)
    center = tuple(n - 1 for n in dims.sizes)
    grad_b[center] += lam / 2.0
    return float(value), grad_x, float(grad_t), grad_b
