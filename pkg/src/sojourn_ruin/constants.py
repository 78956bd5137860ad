"""Prefactor constant and boundary-coordinate corrections.

The polynomial-order constant multiplying u^((1-m)/2) exp(-ghat u / 2)
in the ruin approximation is

    C = (2 pi t0)^(-m/2) |Sigma_II|^(-1/2) Int_R exp(-gtilde x^2/4) psi(x) dx

where psi accounts for the weakly essential coordinates K: conditioned
on the essential block sitting on its barrier at time (t0 + x/sqrt(u))u,
the K block clears its own barrier with probability

    psi(x) = P{ Y_K > x (mu_K - Sigma_KI Sigma_II^{-1} mu_I) / sqrt(t0) },

Y_K centered Gaussian with the Schur complement covariance
D_KK = Sigma_KK - Sigma_KI Sigma_II^{-1} Sigma_IK.  With K empty,
psi = 1 and the integral is the plain Gaussian one.

The same weighted integrals, truncated at a finite upper limit, give
the limiting conditional law of the ruin time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import ndtr

from .gaussian import mvn_survival
from .gmin import GMinimum
from .model import RiskModel


@dataclass(frozen=True)
class PsiSpec:
    """Data for the weak-coordinate clearing probability psi."""

    t0: float
    k_index: tuple[int, ...]
    direction: np.ndarray | None  # (mu_K - Sigma_KI Sigma_II^{-1} mu_I)/sqrt(t0)
    d_kk: np.ndarray | None  # Schur complement Sigma_KK - Sigma_KI Sigma_II^{-1} Sigma_IK

    @property
    def trivial(self) -> bool:
        return self.direction is None


def build_psi_spec(gm: GMinimum, model: RiskModel) -> PsiSpec:
    k_idx = gm.weakly_essential
    if not k_idx:
        return PsiSpec(t0=gm.t0, k_index=(), direction=None, d_kk=None)
    i_idx = list(gm.essential)
    k_list = list(k_idx)
    s_ii = model.sigma[np.ix_(i_idx, i_idx)]
    s_ki = model.sigma[np.ix_(k_list, i_idx)]
    s_kk = model.sigma[np.ix_(k_list, k_list)]
    cross = s_ki @ np.linalg.solve(s_ii, np.eye(len(i_idx)))
    direction = (model.mu[k_list] - cross @ model.mu[i_idx]) / np.sqrt(gm.t0)
    d_kk = s_kk - cross @ s_ki.T
    d_kk = (d_kk + d_kk.T) / 2.0
    direction.setflags(write=False)
    d_kk.setflags(write=False)
    return PsiSpec(t0=gm.t0, k_index=k_idx, direction=direction, d_kk=d_kk)


def psi(spec: PsiSpec, x: float, rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Clearing probability and its numerical error at fluctuation x."""
    if spec.trivial:
        return 1.0, 0.0
    res = mvn_survival(spec.d_kk, spec.direction * x, rng=rng)
    return res.value, res.error


@dataclass(frozen=True)
class PrefactorConstant:
    value: float
    log_value: float
    error: float
    nodes: int
    converged: bool = True


def prefactor_constant(gm: GMinimum, model: RiskModel, rng: np.random.Generator | None = None) -> PrefactorConstant:
    """Compute C by Gauss-Hermite quadrature with node doubling."""
    i_idx = list(gm.essential)
    s_ii = model.sigma[np.ix_(i_idx, i_idx)]
    sign, log_det = np.linalg.slogdet(s_ii)
    if sign <= 0:
        raise ValueError("essential covariance block is not positive definite")
    spec = build_psi_spec(gm, model)
    scale = 2.0 / np.sqrt(gm.gtilde)

    if spec.trivial:
        # Int exp(-gtilde x^2 / 4) dx = sqrt(4 pi / gtilde)
        integral = float(np.sqrt(4.0 * np.pi / gm.gtilde))
        err = 0.0
        nodes = 0
        converged = True
    else:
        prev = None
        integral = np.nan
        err = np.inf
        nodes = 32
        converged = False
        while nodes <= 1024:
            y, w = hermgauss(nodes)
            vals = np.empty(nodes)
            errs = np.empty(nodes)
            for j in range(nodes):
                vals[j], errs[j] = psi(spec, scale * y[j], rng=rng)
            integral = scale * float(w @ vals)
            err = scale * float(w @ errs)
            if prev is not None and abs(integral - prev) <= max(1e-8 * abs(integral), 3.0 * err):
                converged = True
                break
            prev = integral
            nodes *= 2
        nodes = min(nodes, 1024)

    m = gm.m
    log_c = -0.5 * m * np.log(2.0 * np.pi * gm.t0) - 0.5 * log_det + np.log(integral)
    value = float(np.exp(log_c))
    rel_err = err / integral if integral > 0 else np.inf
    return PrefactorConstant(value=value, log_value=float(log_c), error=float(value * rel_err),
                             nodes=nodes, converged=converged)


def c_constant(gm: GMinimum, model: RiskModel, rng: np.random.Generator | None = None) -> float:
    """The polynomial-order constant C as a plain number."""
    return prefactor_constant(gm, model, rng=rng).value


def gaussian_psi_integral(
    gtilde: float,
    spec: PsiSpec,
    upper: float | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """(1/sqrt(2 pi)) Int_{-inf}^{upper} exp(-z^2/2) psi(sqrt(2/gtilde) z) dz.

    ``upper`` is in standardized units (None means the whole line).
    With trivial psi this is the normal cdf of the upper limit.
    """
    if spec.trivial:
        return 1.0 if upper is None else float(ndtr(upper))

    # the weight is below 1e-140 outside [-26, 26]
    hi = 26.0 if upper is None else min(float(upper), 26.0)
    lo = -26.0
    if hi <= lo:
        return 0.0
    scale = np.sqrt(2.0 / gtilde)
    prev = None
    result = 0.0
    nodes = 64
    while nodes <= 4096:
        y, w = leggauss(nodes)
        z = lo + (hi - lo) * (y + 1.0) / 2.0
        vals = np.empty(nodes)
        errs = np.empty(nodes)
        for j in range(nodes):
            vals[j], errs[j] = psi(spec, scale * z[j], rng=rng)
        core = np.exp(-0.5 * z * z) * vals
        result = (hi - lo) / 2.0 * float(w @ core) / np.sqrt(2.0 * np.pi)
        err = (hi - lo) / 2.0 * float(w @ errs) / np.sqrt(2.0 * np.pi)
        if prev is not None and abs(result - prev) <= max(1e-9, 1e-8 * abs(result), 3.0 * err):
            break
        prev = result
        nodes *= 2
    return result
