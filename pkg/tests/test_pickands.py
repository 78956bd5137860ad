"""Sojourn-constant closed forms, path functionals, and MC estimators."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import sojourn_ruin as sr
from sojourn_ruin.pickands import _richardson_weights, closed_form, decay_rates

from conftest import random_pd_matrix

# high-precision evaluations of h0, frozen from a 30-digit computation
H0_QUARTER = 0.41927852005066776
H0_ONE = 0.15067956668754151
H0_FOUR = 0.011537453429039864


def make_random_model(case):
    rng = np.random.default_rng(case)
    d = int(rng.integers(1, 5))
    sigma = random_pd_matrix(rng, d, unit_diag=bool(rng.integers(2)))
    mu = rng.uniform(0.2, 3.0, size=d)
    alpha = rng.uniform(0.2, 3.0, size=d)
    return sr.make_model(mu=mu, alpha=alpha, sigma=sigma)


def unit_path(values, dt=1.0):
    values = np.asarray(values, dtype=float).reshape(-1, 1)
    n = values.shape[0]
    grid = dt * np.arange(n)
    return sr.SojournPath(grid=grid, values=values, dt=dt, T=dt * (n - 1))


class TestH0:
    def test_at_zero(self):
        assert abs(h := sr.h0(0.0)) - 0 >= 0  # smoke the call shape
        assert abs(sr.h0(0.0) - 1.0) < 1e-15

    def test_pinned_values(self):
        assert abs(sr.h0(1.0) - H0_ONE) < 1e-15
        # independently published rounding of the same number
        assert abs(sr.h0(1.0) - 0.15067956668754157) < 1e-13
        assert abs(sr.h0(0.25) - H0_QUARTER) < 1e-14
        assert abs(sr.h0(4.0) - H0_FOUR) < 1e-15

    def test_strictly_decreasing_to_zero(self):
        x = np.linspace(0.0, 6.0, 61)
        vals = sr.h0(x)
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 0)
        assert sr.h0(60.0) < 1e-12

    def test_vectorized_matches_scalar(self):
        x = np.array([0.0, 0.3, 1.7])
        vals = sr.h0(x)
        assert vals.shape == (3,)
        for xi, vi in zip(x, vals):
            assert vi == sr.h0(float(xi))


class TestOneDClosedForm:
    def test_unit_variance_form(self):
        assert sr.h_oneD_closed_form(2.0, 0.5) == pytest.approx(2.0 * sr.h0(2.0), rel=1e-15)
        assert sr.h_oneD_closed_form(3.0, 0.0) == pytest.approx(3.0, rel=1e-15)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sr.h_oneD_closed_form(0.0, 1.0)
        with pytest.raises(ValueError):
            sr.h_oneD_closed_form(-1.0, 1.0)
        with pytest.raises(ValueError):
            sr.h_oneD_closed_form(1.0, -0.1)

    def test_general_variance(self):
        model = sr.make_model(mu=[3.0], alpha=[1.0], sigma=[[4.0]])
        gm = sr.minimize_g(model)
        # variance rescales the sojourn argument: mu^2 r / Sigma_ii
        assert closed_form(gm, model, 0.8) == pytest.approx(3.0 * sr.h0(9.0 * 0.8 / 4.0), rel=1e-14)

    def test_none_when_multivariate(self, model_2d_iid):
        gm = sr.minimize_g(model_2d_iid)
        assert gm.m == 2
        assert closed_form(gm, model_2d_iid, 1.0) is None


class TestTiltAndDecay:
    def test_unit_model(self, model_1d):
        gm = sr.minimize_g(model_1d)
        c = sr.tilt_vector(gm, model_1d)
        np.testing.assert_allclose(c, [2.0], rtol=1e-12)
        lam_f, lam_b = decay_rates(gm, model_1d)
        assert lam_f == pytest.approx(2.0, rel=1e-12)
        assert lam_b == pytest.approx(2.0, rel=1e-12)

    def test_skew_model(self, model_1d_skew):
        # mu=2, alpha=0.5: t0=0.25, b=alpha+mu*t0=1, c=b/t0=4
        gm = sr.minimize_g(model_1d_skew)
        c = sr.tilt_vector(gm, model_1d_skew)
        np.testing.assert_allclose(c, [4.0], rtol=1e-12)
        lam_f, lam_b = decay_rates(gm, model_1d_skew)
        assert lam_f == pytest.approx(8.0, rel=1e-12)
        assert lam_b == pytest.approx(8.0, rel=1e-12)

    @given(case=st.integers(0, 10**6))
    @settings(max_examples=60)
    def test_critical_identity(self, case):
        # <c, Sigma_II c>/2 == <c, mu_I>: the tilt is exactly critical,
        # so the anchored change of measure has unit anchor weights
        model = make_random_model(case)
        gm = sr.minimize_g(model)
        assume(not gm.degenerate)
        idx = list(gm.essential)
        c = sr.tilt_vector(gm, model)
        quad = 0.5 * float(c @ model.sigma[np.ix_(idx, idx)] @ c)
        lin = float(c @ model.mu[idx])
        assert quad == pytest.approx(lin, rel=1e-9)
        lam_f, lam_b = decay_rates(gm, model)
        assert lam_f > 0
        assert lam_b > 0


class TestPerPathIntegral:
    def test_handcrafted_order_statistics(self):
        path = unit_path([0.5, 0.2, -0.1, 0.3])
        c = np.array([2.0])
        # k = floor(r/dt) + 1 points must clear the level
        assert sr.per_path_integral(path, c, 0.0) == pytest.approx(np.exp(1.0) / 2.0, rel=1e-14)
        assert sr.per_path_integral(path, c, 1.0) == pytest.approx(np.exp(0.6) / 2.0, rel=1e-14)
        assert sr.per_path_integral(path, c, 1.5) == pytest.approx(np.exp(0.6) / 2.0, rel=1e-14)
        assert sr.per_path_integral(path, c, 2.5) == pytest.approx(np.exp(0.4) / 2.0, rel=1e-14)

    def test_window_and_domain_edges(self):
        path = unit_path([0.5, 0.2, -0.1, 0.3])
        c = np.array([2.0])
        assert sr.per_path_integral(path, c, 3.0) == 0.0
        assert sr.per_path_integral(path, c, 10.0) == 0.0
        with pytest.raises(ValueError):
            sr.per_path_integral(path, c, -0.5)

    def test_constant_path_two_dim_exact(self):
        # all grid values equal z: every sampled level below the peak is
        # cleared by the whole path, so the importance sampling returns
        # exp(<c, z>) / prod(c) exactly, independent of the draws
        z = np.array([0.4, -0.3])
        values = np.tile(z, (5, 1))
        path = sr.SojournPath(grid=np.arange(5.0), values=values, dt=1.0, T=4.0)
        c = np.array([2.0, 1.0])
        want = np.exp(c @ z) / np.prod(c)
        for seed, inner in [(1, 4), (2, 64), (3, 16)]:
            got = sr.per_path_integral(path, c, 2.5, inner_samples=inner,
                                       rng=np.random.default_rng(seed))
            assert got == pytest.approx(want, rel=1e-12)

    def test_two_dim_requires_rng(self):
        values = np.zeros((4, 2))
        path = sr.SojournPath(grid=np.arange(4.0), values=values, dt=1.0, T=3.0)
        with pytest.raises(ValueError):
            sr.per_path_integral(path, np.array([1.0, 1.0]), 0.5)


class TestSimulatePath:
    def test_shapes_and_grid(self, model_1d):
        gm = sr.minimize_g(model_1d)
        path = sr.simulate_sojourn_path(gm, model_1d, T=4.0, dt=0.5,
                                        rng=np.random.default_rng(0))
        assert path.values.shape == (9, 1)
        assert path.grid.shape == (9,)
        assert path.grid[0] == 0.0
        assert path.grid[-1] == 4.0
        assert path.dt == pytest.approx(0.5)
        assert np.all(path.values[0] == 0.0)

    def test_reproducible(self, model_2d_corr):
        gm = sr.minimize_g(model_2d_corr)
        a = sr.simulate_sojourn_path(gm, model_2d_corr, 2.0, 0.25, np.random.default_rng(42))
        b = sr.simulate_sojourn_path(gm, model_2d_corr, 2.0, 0.25, np.random.default_rng(42))
        c = sr.simulate_sojourn_path(gm, model_2d_corr, 2.0, 0.25, np.random.default_rng(43))
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_rejects_bad_window(self, model_1d):
        gm = sr.minimize_g(model_1d)
        rng = np.random.default_rng(0)
        for T, dt in [(0.0, 0.1), (1.0, 0.0), (1.0, 2.0), (-1.0, 0.1)]:
            with pytest.raises(ValueError):
                sr.simulate_sojourn_path(gm, model_1d, T, dt, rng)


class TestEstimateH:
    def test_rejects_bad_args(self, model_1d):
        gm = sr.minimize_g(model_1d)
        with pytest.raises(ValueError):
            sr.estimate_h(gm, model_1d, 1.0, method="exact")
        with pytest.raises(ValueError):
            sr.estimate_h(gm, model_1d, -1.0)

    def test_r_beyond_window_is_zero(self, model_1d):
        gm = sr.minimize_g(model_1d)
        for r in (8.0, 9.5):
            est = sr.estimate_h(gm, model_1d, r, T=8.0, n_paths=64, seed=1)
            assert est.value == 0.0
            assert est.std_error == 0.0

    def test_matches_one_d_constant(self, model_1d):
        gm = sr.minimize_g(model_1d)
        est = sr.estimate_h(gm, model_1d, 1.0, T=16.0, dt=16.0 / 1024,
                            n_paths=8000, seed=2024)
        assert est.std_error < 0.02
        assert abs(est.value - H0_ONE) < 4.0 * est.std_error

    def test_window_stability(self, model_1d):
        # once the tent is padded, halving the nominal span should move
        # the estimate by less than the MC noise
        gm = sr.minimize_g(model_1d)
        a = sr.estimate_h(gm, model_1d, 1.0, T=16.0, n_paths=20000, seed=5)
        b = sr.estimate_h(gm, model_1d, 1.0, T=32.0, n_paths=20000, seed=6)
        gap = abs(a.value - b.value)
        assert gap < 3.0 * np.hypot(a.std_error, b.std_error)

    def test_crn_monotone_in_r_pathwise(self, model_1d):
        # same seed, richardson off: each path's volume is monotone in r
        gm = sr.minimize_g(model_1d)
        vals = [
            sr.estimate_h(gm, model_1d, r, T=16.0, dt=16.0 / 512,
                          n_paths=3000, seed=7, richardson=False).value
            for r in (0.0, 0.5, 1.0, 2.0)
        ]
        assert np.all(np.diff(vals) <= 0)

    def test_crn_monotone_in_r_default(self, model_1d):
        gm = sr.minimize_g(model_1d)
        vals = [
            sr.estimate_h(gm, model_1d, r, T=16.0, dt=16.0 / 512,
                          n_paths=4000, seed=21).value
            for r in (0.0, 0.75, 2.0)
        ]
        assert np.all(np.diff(vals) <= 0)

    def test_direct_crn_monotone_in_r(self, model_1d):
        gm = sr.minimize_g(model_1d)
        vals = [
            sr.estimate_h(gm, model_1d, r, T=4.0, dt=4.0 / 256, n_paths=2000,
                          seed=9, method="direct", richardson=False).value
            for r in (0.0, 0.5, 1.0)
        ]
        assert np.all(np.diff(vals) <= 0)

    def test_direct_matches_per_path_average(self, model_1d):
        # the windowed estimator must agree with an independent average
        # of the per-path functional on the same grid, including the
        # division by the span
        gm = sr.minimize_g(model_1d)
        c = sr.tilt_vector(gm, model_1d)
        T, dt = 1.0, 1.0 / 8
        rng = np.random.default_rng(999)
        for r in (0.0, 0.6):
            est = sr.estimate_h(gm, model_1d, r, T=T, dt=dt, n_paths=20000,
                                seed=11, method="direct", richardson=False)
            assert est.dt == pytest.approx(dt, rel=1e-15)
            vals = np.array([
                sr.per_path_integral(
                    sr.simulate_sojourn_path(gm, model_1d, T, dt, rng), c, r) / T
                for _ in range(20000)
            ])
            se = vals.std(ddof=1) / np.sqrt(len(vals))
            assert abs(est.value - vals.mean()) < 4.0 * np.hypot(est.std_error, se)

    def test_stride_values_combine_linearly(self, model_1d):
        gm = sr.minimize_g(model_1d)
        est = sr.estimate_h(gm, model_1d, 0.5, T=8.0, dt=8.0 / 256,
                            n_paths=512, seed=13)
        assert len(est.stride_values) == 3
        combo = float(_richardson_weights(3) @ np.array(est.stride_values))
        assert est.value == pytest.approx(combo, rel=1e-12)
        flat = sr.estimate_h(gm, model_1d, 0.5, T=8.0, dt=8.0 / 256,
                             n_paths=512, seed=13, richardson=False)
        assert len(flat.stride_values) == 1
        assert flat.value == pytest.approx(flat.stride_values[0], rel=1e-15)

    def test_two_dim_smoke(self, model_2d_iid):
        gm = sr.minimize_g(model_2d_iid)
        est = sr.estimate_h(gm, model_2d_iid, 0.5, T=8.0, dt=8.0 / 256,
                            n_paths=512, inner_samples=32, seed=3,
                            richardson=False)
        assert est.method == "anchored"
        assert np.isfinite(est.value)
        assert 0.0 < est.value < 10.0
        assert 0.0 < est.std_error < np.inf


class TestSojournConstant:
    def test_one_d_is_closed_form(self, model_1d_skew):
        gm = sr.minimize_g(model_1d_skew)
        value, err, method = sr.sojourn_constant(gm, model_1d_skew, 0.7)
        assert method == "closed_form"
        assert err == 0.0
        assert value == closed_form(gm, model_1d_skew, 0.7)

    def test_two_dim_falls_back_to_mc(self, model_2d_iid):
        gm = sr.minimize_g(model_2d_iid)
        value, err, method = sr.sojourn_constant(gm, model_2d_iid, 0.5, seed=4,
                                                 n_paths=256, T=6.0, dt=6.0 / 128)
        assert method == "anchored"
        assert value > 0
        assert err > 0
