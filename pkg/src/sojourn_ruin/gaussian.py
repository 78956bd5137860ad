"""Gaussian building blocks: 1-d functions and multivariate survival.

``mvn_survival`` computes P{Y > b} (all coordinates simultaneously) for
a centered Gaussian vector Y with a given covariance.  Dimension 1 is
closed form, dimension 2 reduces to a single numerical integral, and
higher dimensions use separation-of-variables sequential conditioning
driven by scrambled Sobol points, whose replicate spread yields a
standard-error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri
from scipy.stats import qmc


def phi_pdf(x):
    return np.exp(-0.5 * np.square(x)) / np.sqrt(2.0 * np.pi)


def phi_cdf(x):
    return ndtr(x)


def phi_inv(p):
    return ndtri(p)


@dataclass(frozen=True)
class PdFactor:
    """Cholesky factorization of a positive definite matrix."""

    matrix: np.ndarray
    lower: np.ndarray
    log_det: float


def chol_factor(matrix) -> PdFactor:
    m = np.asarray(matrix, dtype=float)
    lower = np.linalg.cholesky(m)
    log_det = 2.0 * float(np.sum(np.log(np.diag(lower))))
    return PdFactor(matrix=m, lower=lower, log_det=log_det)


@dataclass(frozen=True)
class MvnResult:
    value: float
    error: float  # estimated absolute error (1 standard error for qmc)
    method: str


def _survival_2d(b: np.ndarray, rho: float) -> MvnResult:
    # P{Z1 > b1, Z2 > b2} for standard normals with correlation rho,
    # integrating the conditional tail over the first coordinate.
    if abs(rho) >= 1.0 - 1e-14:
        if rho > 0:
            val = float(ndtr(-max(b[0], b[1])))
        else:
            val = float(max(0.0, ndtr(-b[0]) - ndtr(b[1])))
        return MvnResult(value=val, error=1e-15, method="quad")
    denom = np.sqrt(1.0 - rho * rho)

    def integrand(z):
        return phi_pdf(z) * ndtr(-(b[1] - rho * z) / denom)

    val, abserr = integrate.quad(integrand, b[0], np.inf, epsabs=1e-12, epsrel=1e-11, limit=200)
    return MvnResult(value=float(val), error=float(abserr), method="quad")


def _genz_sample(chol: np.ndarray, b: np.ndarray, points: np.ndarray) -> float:
    # One scrambled-Sobol replicate of the sequential-conditioning estimator
    # for P{C Z > b} with C lower triangular.  points has shape (n, k-1).
    k = b.size
    n = points.shape[0]
    tiny = 1e-15
    prod = np.ones(n)
    z = np.zeros((n, k - 1))
    partial = np.zeros(n)
    for i in range(k):
        d = ndtr((b[i] - partial) / chol[i, i])
        prod *= 1.0 - d
        if i < k - 1:
            # draw Z_i from its conditional tail above the running bound
            u = d + points[:, i] * (1.0 - d)
            z[:, i] = ndtri(np.clip(u, tiny, 1.0 - tiny))
            partial = z[:, : i + 1] @ chol[i + 1, : i + 1]
    return float(np.mean(prod))


def _survival_qmc(cov: np.ndarray, b: np.ndarray, rng: np.random.Generator, target: float) -> MvnResult:
    k = b.size
    # most restrictive coordinate first stabilizes the conditioning
    order = np.argsort(-b / np.sqrt(np.diag(cov)))
    cov_o = cov[np.ix_(order, order)]
    b_o = b[order]
    chol = np.linalg.cholesky(cov_o)

    n_rep = 8
    log2_n = 12
    while True:
        estimates = []
        for _ in range(n_rep):
            sob = qmc.Sobol(d=k - 1, scramble=True, rng=rng)
            pts = sob.random(2**log2_n)
            estimates.append(_genz_sample(chol, b_o, pts))
        est = float(np.mean(estimates))
        se = float(np.std(estimates, ddof=1) / np.sqrt(n_rep))
        if se <= target / 3.0 or log2_n >= 17:
            return MvnResult(value=est, error=se, method="qmc")
        log2_n += 2


def mvn_survival(cov, threshold, rng: np.random.Generator | None = None) -> MvnResult:
    """P{Y > threshold componentwise} for Y ~ N(0, cov).

    Accuracy targets: essentially exact for k = 1, absolute error
    around 1e-10 for k = 2, and 1e-6 (k = 3) / 1e-4 (k > 3) for the
    quasi Monte Carlo branch.
    """
    cov_m = np.atleast_2d(np.asarray(cov, dtype=float))
    b = np.atleast_1d(np.asarray(threshold, dtype=float))
    k = b.size
    if cov_m.shape != (k, k):
        raise ValueError(f"covariance shape {cov_m.shape} does not match threshold length {k}")
    np.linalg.cholesky((cov_m + cov_m.T) / 2.0)

    if k == 1:
        val = float(ndtr(-b[0] / np.sqrt(cov_m[0, 0])))
        return MvnResult(value=val, error=1e-16, method="exact")

    s = np.sqrt(np.diag(cov_m))
    b_std = b / s
    corr = cov_m / np.outer(s, s)
    if k == 2:
        return _survival_2d(b_std, float(corr[0, 1]))

    if rng is None:
        rng = np.random.default_rng(0)
    target = 1e-6 if k == 3 else 1e-4
    return _survival_qmc(corr, b_std, rng, target)
