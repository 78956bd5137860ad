import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ndtr

import sojourn_ruin as sr

from conftest import random_pd_matrix


def orthant_2d(rho):
    return 0.25 + np.arcsin(rho) / (2.0 * np.pi)


def orthant_3d(r12, r13, r23):
    return 0.125 + (np.arcsin(r12) + np.arcsin(r13) + np.arcsin(r23)) / (4.0 * np.pi)


@given(st.floats(-8.0, 8.0))
def test_phi_cdf_symmetry(x):
    assert abs(sr.phi_cdf(x) + sr.phi_cdf(-x) - 1.0) <= 1e-14


def test_phi_cdf_matches_reference():
    xs = np.linspace(-6.0, 6.0, 41)
    assert np.allclose(sr.phi_cdf(xs), ndtr(xs), rtol=0, atol=1e-15)


def test_survival_1d_closed_form():
    for b, var in [(0.7, 1.0), (-1.2, 1.0), (0.3, 4.0)]:
        res = sr.mvn_survival([[var]], [b])
        assert res.value == pytest.approx(ndtr(-b / np.sqrt(var)), abs=1e-12)


def test_survival_2d_orthant():
    for rho in (-0.7, -0.3, 0.0, 0.5, 0.9):
        res = sr.mvn_survival([[1.0, rho], [rho, 1.0]], [0.0, 0.0])
        assert res.value == pytest.approx(orthant_2d(rho), abs=1e-9)


def test_survival_3d_orthant():
    rng = np.random.default_rng(7)
    cov = np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]])
    res = sr.mvn_survival(cov, np.zeros(3), rng=rng)
    assert res.value == pytest.approx(0.25, abs=max(4 * res.error, 5e-5))


def test_survival_3d_general_orthant():
    rng = np.random.default_rng(11)
    cov = np.array([[1.0, 0.2, -0.3], [0.2, 1.0, 0.4], [-0.3, 0.4, 1.0]])
    exact = orthant_3d(0.2, -0.3, 0.4)
    res = sr.mvn_survival(cov, np.zeros(3), rng=rng)
    assert res.value == pytest.approx(exact, abs=max(4 * res.error, 5e-5))


def test_survival_independent_factorizes():
    rng = np.random.default_rng(3)
    cov = np.diag([1.0, 2.0, 0.5, 1.5])
    b = np.array([0.4, -0.2, 1.0, 0.1])
    exact = float(np.prod(ndtr(-b / np.sqrt(np.diag(cov)))))
    res = sr.mvn_survival(cov, b, rng=rng)
    assert res.value == pytest.approx(exact, abs=max(4 * res.error, 5e-5))


def test_survival_monotone_in_thresholds():
    rng_seed = 5
    cov = random_pd_matrix(np.random.default_rng(0), 3, unit_diag=True)
    b = np.array([0.2, -0.1, 0.4])
    lo = sr.mvn_survival(cov, b, rng=np.random.default_rng(rng_seed))
    hi = sr.mvn_survival(cov, b + 0.3, rng=np.random.default_rng(rng_seed))
    slack = 3.0 * (lo.error + hi.error)
    assert hi.value <= lo.value + slack


def test_survival_bounds():
    rng = np.random.default_rng(9)
    for d in (1, 2, 3, 4):
        cov = random_pd_matrix(rng, d)
        b = rng.normal(size=d)
        res = sr.mvn_survival(cov, b, rng=np.random.default_rng(int(rng.integers(2**32))))
        assert 0.0 <= res.value <= 1.0
        assert res.error >= 0.0


def test_survival_error_is_honest_4d():
    # exchangeable rho = 0.5 reduces to a 1-d mixture integral
    rho = 0.5
    cov = np.full((4, 4), rho) + np.diag(np.full(4, 1.0 - rho))
    b = np.array([0.3, 0.3, 0.3, 0.3])
    from scipy.integrate import quad

    def integrand(z):
        p = ndtr((-b[0] + np.sqrt(rho) * z) / np.sqrt(1.0 - rho)) ** 4
        return p * np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)

    exact, _ = quad(integrand, -10, 10, epsabs=1e-12)
    res = sr.mvn_survival(cov, b, rng=np.random.default_rng(17))
    assert res.value == pytest.approx(exact, abs=max(4 * res.error, 5e-5))


def test_survival_rejects_bad_inputs():
    with pytest.raises(ValueError):
        sr.mvn_survival([[1.0, 0.0]], [0.0, 0.0])
    with pytest.raises(np.linalg.LinAlgError):
        sr.mvn_survival([[1.0, 2.0], [2.0, 1.0]], [0.0, 0.0])
