"""ADMM solvers: parameters, generator refinement, update identities,
convergence behavior and dual extraction."""

import numpy as np
import pytest

import fsharm as fs
from fsharm.admm import (
    AdmmParams,
    DivergenceError,
    SolverState,
    augmented_lagrangian_value,
    default_lambda,
    refine_generator,
    solve_constrained,
    solve_regularized,
)
from fsharm.toeplitz import band_polynomial, full_band, toeplitz_average


def small_scene(dims=(4, 4), freqs=((0.35, 0.55),), n_samples=None, seed=0,
                noise_std=0.0):
    rng = np.random.default_rng(seed)
    d = fs.Dims(dims)
    model = fs.SpectralModel(freqs=np.array(freqs), gains=np.ones(len(freqs)))
    x = fs.synthesize(model, d)
    p = np.ones(d.n_total)
    if n_samples is not None:
        p = np.zeros(d.n_total)
        p[rng.choice(d.n_total, size=n_samples, replace=False)] = 1.0
    meas = fs.observe(x, p.reshape(d.sizes), noise_std=noise_std, seed=seed)
    bands = [fs.FrequencyBand(0.3, 0.4), fs.FrequencyBand(0.5, 0.6)]
    return model, meas, bands, x.ravel()


class TestAdmmParams:
    def test_noiseless_defaults(self):
        p = AdmmParams.noiseless_defaults()
        assert (p.rho, p.varrho, p.inner_iters, p.max_iters) == (0.05, 9.0, 10, 2000)

    def test_noisy_defaults(self):
        p = AdmmParams.noisy_defaults(lam=1.5)
        assert (p.varrho, p.inner_iters, p.max_iters, p.lam) == (3.0, 20, 1000, 1.5)

    def test_overrides(self):
        p = AdmmParams.noiseless_defaults(max_iters=7, rho=0.1)
        assert p.max_iters == 7 and p.rho == 0.1

    @pytest.mark.parametrize("kw", [{"rho": 0.0}, {"varrho": 1.0}, {"inner_iters": -1},
                                    {"max_iters": 0}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            AdmmParams(**kw)

    def test_default_lambda(self):
        assert default_lambda(0.5, 64) == pytest.approx(0.5 * np.sqrt(2 * np.log(64)))


class TestRefineGenerator:
    def polys(self):
        return [band_polynomial(fs.FrequencyBand(0.3, 0.4)),
                band_polynomial(fs.FrequencyBand(0.5, 0.6))]

    def feasible_generator(self, dims=(4, 4)):
        model = fs.SpectralModel(freqs=[[0.35, 0.55], [0.32, 0.58]], gains=[1.0, 0.7])
        return fs.GeneratorTensor.from_model(model, fs.Dims(dims))

    def test_zero_sweeps_is_identity(self):
        gen = self.feasible_generator()
        out = refine_generator(gen, None, self.polys(), varrho=9.0, inner_iters=0)
        np.testing.assert_array_equal(out.values, gen.values)

    def test_feasible_generator_is_fixed_point(self):
        gen = self.feasible_generator()
        out = refine_generator(gen, None, self.polys(), varrho=9.0, inner_iters=10)
        assert np.max(np.abs(out.values - gen.values)) < 1e-8

    def test_fixed_targets_single_sweep_fixed_point(self):
        # with targets computed from an already-feasible generator, one sweep
        # reproduces the interior entries exactly
        gen = self.feasible_generator()
        dims = gen.dims
        polys = self.polys()
        targets = [
            toeplitz_average(fs.build_tg(gen, polys[i], i), dims.reduced).values
            for i in range(dims.d)
        ]
        out = refine_generator(gen, targets, polys, varrho=9.0, inner_iters=1)
        assert np.max(np.abs(out.values - gen.values)) < 1e-9

    def test_boundary_entries_untouched(self):
        rng = np.random.default_rng(4)
        dims = fs.Dims((4, 4))
        gen = fs.GeneratorTensor(dims, rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7)))
        out = refine_generator(gen, None, self.polys(), varrho=3.0, inner_iters=5)
        np.testing.assert_array_equal(out.values[0, :], gen.values[0, :])
        np.testing.assert_array_equal(out.values[-1, :], gen.values[-1, :])
        np.testing.assert_array_equal(out.values[:, 0], gen.values[:, 0])
        np.testing.assert_array_equal(out.values[:, -1], gen.values[:, -1])

    def test_half_width_band_rejected(self):
        # a band of width exactly 1/2 zeroes the constant coefficient
        gen = self.feasible_generator()
        polys = [band_polynomial(fs.FrequencyBand(0.25, 0.75)),
                 band_polynomial(fs.FrequencyBand(0.5, 0.6))]
        with pytest.raises(ValueError, match="1/2"):
            refine_generator(gen, None, polys, varrho=9.0, inner_iters=1)

    def test_wrong_target_count(self):
        gen = self.feasible_generator()
        with pytest.raises(ValueError):
            refine_generator(gen, [gen.values], self.polys(), varrho=9.0, inner_iters=1)


class TestUpdateIdentities:
    def test_x_update_matches_dense_solve_constrained(self):
        # first-iteration x from the solver equals a dense linear solve of
        # (rho Phi^H Phi + 2 rho I) x = rho Phi^H y from the all-zero state
        _, meas, bands, _ = small_scene(n_samples=10, seed=2)
        params = AdmmParams.noiseless_defaults(max_iters=1, inner_iters=0)
        out = solve_constrained(meas, bands, params)
        n = meas.dims.n_total
        rho = params.rho
        lhs = rho * np.diag(np.abs(meas.phi) ** 2) + 2.0 * rho * np.eye(n)
        rhs = rho * np.conj(meas.phi) * meas.y
        np.testing.assert_allclose(out.x_hat, np.linalg.solve(lhs, rhs), atol=1e-10)

    def test_x_update_matches_dense_solve_regularized(self):
        _, meas, bands, _ = small_scene(n_samples=10, seed=2, noise_std=0.1)
        params = AdmmParams(rho=0.05, varrho=3.0, inner_iters=0, max_iters=1, lam=0.7)
        out = solve_regularized(meas, bands, params)
        n = meas.dims.n_total
        lhs = np.diag(np.abs(meas.phi) ** 2) + 2.0 * params.rho * np.eye(n)
        rhs = np.conj(meas.phi) * meas.y
        np.testing.assert_allclose(out.x_hat, np.linalg.solve(lhs, rhs), atol=1e-10)

    @pytest.mark.parametrize("mode", ["constrained", "regularized"])
    def test_x_update_is_stationary_point(self, mode):
        # the closed-form x zeroes the x-gradient of the augmented Lagrangian
        rng = np.random.default_rng(9)
        _, meas, bands, _ = small_scene(n_samples=10, seed=2, noise_std=0.1)
        dims = meas.dims
        n = dims.n_total
        params = AdmmParams(rho=0.07, lam=1.3)
        a = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
        theta = 0.5 * (a + a.conj().T)
        b = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
        dual = 0.5 * (b + b.conj().T)
        u_vec = rng.normal(size=n) + 1j * rng.normal(size=n)
        phi, y, rho = meas.phi, meas.y, params.rho
        bar_u_vec = dual[:n, n]
        bar_theta_vec = theta[:n, n]
        if mode == "constrained":
            x = (rho * np.conj(phi) * y + np.conj(phi) * u_vec + 2 * bar_u_vec
                 + 2 * rho * bar_theta_vec) / (rho * np.abs(phi) ** 2 + 2 * rho)
        else:
            x = (np.conj(phi) * y + 2 * bar_u_vec + 2 * rho * bar_theta_vec) / (
                np.abs(phi) ** 2 + 2 * rho)
        state = SolverState(x=x, b=fs.GeneratorTensor.zeros(dims), t=0.3,
                            theta=theta, dual=dual, u_vec=u_vec)
        _, grad_x, _, _ = augmented_lagrangian_value(state, meas, params, mode)
        assert np.max(np.abs(grad_x)) < 1e-10


class TestSolverBehavior:
    def test_zero_data_full_mask_converges_to_zero(self):
        dims = fs.Dims((3, 3))
        meas = fs.Measurement(dims, np.zeros(9, dtype=complex), np.ones(9, dtype=complex))
        bands = [fs.FrequencyBand(0.3, 0.4), fs.FrequencyBand(0.5, 0.6)]
        out = solve_constrained(meas, bands, AdmmParams.noiseless_defaults(max_iters=200))
        assert np.linalg.norm(out.x_hat) < 1e-6
        assert abs(out.trace["objective"][-1]) < 1e-6

    def test_determinism(self):
        _, meas, bands, x = small_scene(n_samples=12, seed=6)
        params = AdmmParams.noiseless_defaults(max_iters=40)
        a = solve_constrained(meas, bands, params, x_ref=x)
        b = solve_constrained(meas, bands, params, x_ref=x)
        for key in a.trace:
            np.testing.assert_array_equal(a.trace[key], b.trace[key])
        np.testing.assert_array_equal(a.x_hat, b.x_hat)

    def test_trace_keys_and_length(self):
        _, meas, bands, x = small_scene(seed=1)
        out = solve_constrained(
            meas, bands, AdmmParams.noiseless_defaults(max_iters=15), x_ref=x
        )
        assert set(out.trace) == {"primal_residual", "data_residual", "objective", "nmse"}
        assert all(len(v) == 15 for v in out.trace.values())

    def test_early_stop(self):
        _, meas, bands, _ = small_scene(seed=1)
        params = AdmmParams.noiseless_defaults(max_iters=500, early_stop_tol=1e3)
        out = solve_constrained(meas, bands, params)
        assert len(out.trace["objective"]) == 1

    def test_divergence_reported_with_iteration(self):
        dims = fs.Dims((2, 2))
        y = np.array([np.inf, 0, 0, 0], dtype=complex)
        meas = fs.Measurement(dims, y, np.ones(4, dtype=complex))
        bands = [fs.FrequencyBand(0.3, 0.4), fs.FrequencyBand(0.5, 0.6)]
        with pytest.raises(DivergenceError) as exc:
            solve_constrained(meas, bands, AdmmParams.noiseless_defaults(max_iters=5))
        assert exc.value.iteration == 0

    def test_regularized_requires_lambda(self):
        _, meas, bands, _ = small_scene(noise_std=0.1)
        with pytest.raises(ValueError):
            solve_regularized(meas, bands, AdmmParams.noiseless_defaults())

    def test_band_count_mismatch(self):
        _, meas, _, _ = small_scene()
        with pytest.raises(ValueError):
            solve_constrained(meas, [fs.FrequencyBand(0.3, 0.4)])

    def test_plain_solver_without_prior_recovers_full_observation(self):
        # full-width bands and no refinement: graceful degradation
        _, meas, _, x = small_scene(dims=(8, 8),
                                    freqs=((0.35, 0.51), (0.31, 0.59)), seed=1)
        bands = [full_band(), full_band()]
        params = AdmmParams.noiseless_defaults(inner_iters=0)
        out = solve_constrained(meas, bands, params, x_ref=x)
        assert out.trace["nmse"][-1] < 1e-2

    def test_small_lambda_fits_data(self):
        _, meas, bands, x = small_scene(seed=3)
        params = AdmmParams(rho=0.05, varrho=3.0, inner_iters=20, max_iters=400,
                            lam=1e-6)
        out = solve_regularized(meas, bands, params)
        assert fs.nmse(out.x_hat, meas.y) < 1e-2

    def test_large_lambda_shrinks_solution(self):
        _, meas, bands, _ = small_scene(seed=3)
        lam = 10.0 * float(np.linalg.norm(meas.y))
        params = AdmmParams(rho=0.05, varrho=3.0, inner_iters=20, max_iters=400,
                            lam=lam)
        out = solve_regularized(meas, bands, params)
        assert np.linalg.norm(out.x_hat) < np.linalg.norm(meas.y) / 10.0


class TestReferenceSceneProperties:
    def test_primal_residual_coarse_decrease(self, noiseless_solve):
        output, _ = noiseless_solve
        res = output.trace["primal_residual"]
        assert res[999] < res[9]

    def test_solution_block_matrix_nearly_psd(self, noiseless_solve):
        output, _ = noiseless_solve
        n = output.x_hat.shape[0]
        big = np.empty((n + 1, n + 1), dtype=complex)
        big[:n, :n] = fs.build_toeplitz(output.b_hat)
        big[:n, n] = output.x_hat
        big[n, :n] = np.conj(output.x_hat)
        big[n, n] = output.t_hat
        min_eig = np.linalg.eigvalsh(0.5 * (big + big.conj().T))[0]
        assert min_eig >= -1e-3 * np.linalg.norm(big)

    def test_solution_generator_nearly_feasible(self, noiseless_solve, reference_scene):
        output, _ = noiseless_solve
        _, _, bands, _ = reference_scene
        scale = float(np.linalg.norm(output.b_hat.values))
        certs = fs.check_fs_feasible(output.b_hat, bands, tol=1e-3 * scale)
        assert all(c.passed for c in certs)

    def test_dual_embedding_matches_residual_form(self, regularized_solve,
                                                  regularized_scene):
        # at convergence the dual embedding agrees with Phi^H (y - Phi x)
        _, meas, _, _ = regularized_scene
        output = regularized_solve
        direct = np.conj(meas.phi) * (meas.y - meas.phi * output.x_hat)
        rel = np.linalg.norm(output.dual_embedding - direct) / np.linalg.norm(direct)
        assert rel < 0.05
