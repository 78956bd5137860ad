"""Closed-form catalogue for two-dimensional unit-variance portfolios.

A 2-d model with unit variances is summarized by the ratios
a = alpha_2/alpha_1, m = mu_2/mu_1 and the correlation rho, with
capital and sojourn budget rescaled to

    v = alpha_1 mu_1 u,        r~ = mu_1^2 r.

Which single coordinate can take over is decided by the ratios alone:
condition group i (a m <= 1, only the first coordinate can be solely
essential) uses the threshold (a + m)/2, group ii (a m > 1, only the
second) uses (a + m)/(2 a m).  Comparing rho with the group threshold
gives the regime: below it both coordinates stay essential (R1), at it
the other coordinate is weakly essential (R2), above it unessential
(R3).  Everything except the R1 sojourn constant is explicit; the
asymptotics read

    R1:    P ~ (t0 sqrt(pi (1-rho^2) gtilde))^{-1} H_R1(r~)
                 v^{-1/2} exp(-ghat v / 2)
    R2/R3: P ~ C h0-form(r~) exp(-ghat v / 2)

in the reduced variables.  These formulas double as an independent
check of the general pipeline, which reaches the same numbers through
the quadratic program and Gauss-Hermite quadrature.

Models whose variances are not one are rejected here: the catalogue's
ratio algebra assumes unit variances, and a general 2-d covariance is
served exactly by the general modules, so silently renormalizing would
hide which route produced a number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pickands
from .constants import PsiSpec, gaussian_psi_integral
from .gmin import minimize_g
from .model import RiskModel, make_model

_LOG_TINY = -700.0
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class TwoDimReduction:
    """Reduced coordinates (a, m, rho) with rescaled capital and budget."""

    v: float  # alpha_1 mu_1 u
    r_tilde: float  # mu_1^2 r
    alpha_ratio: float
    mu_ratio: float
    rho: float
    u: float
    r: float
    mu1: float
    alpha1: float


def reduce(model: RiskModel, r: float, u: float) -> TwoDimReduction:
    """Collapse a unit-variance 2-d model to ratio coordinates.

    Raises ValueError when either variance differs from one; general
    covariances belong to the general pipeline, not to this catalogue.
    """
    if model.dim != 2:
        raise ValueError("the closed-form catalogue is for 2-d models")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if u <= 0:
        raise ValueError("u must be positive")
    for i in range(2):
        if abs(model.sigma[i, i] - 1.0) > 1e-12:
            raise ValueError(
                f"sigma[{i},{i}] = {model.sigma[i, i]!r} != 1: the reduction "
                "requires unit variances; use the general asymptotics instead"
            )
    alpha = model.alpha
    mu = model.mu
    rho = float(model.sigma[0, 1])
    return TwoDimReduction(
        v=float(alpha[0] * mu[0] * u),
        r_tilde=float(mu[0] ** 2 * r),
        alpha_ratio=float(alpha[1] / alpha[0]),
        mu_ratio=float(mu[1] / mu[0]),
        rho=rho,
        u=float(u),
        r=float(r),
        mu1=float(mu[0]),
        alpha1=float(alpha[0]),
    )


@dataclass(frozen=True)
class RegimeClassification:
    condition_group: str  # "i" or "ii"
    regime: str  # "R1", "R2" or "R3"
    threshold: float  # the group's takeover correlation
    essential: tuple[int, ...]
    weakly_essential: tuple[int, ...]
    unessential: tuple[int, ...]
    t0: float
    ghat: float
    gtilde: float
    prefactor: float  # explicit constant; R1 value excludes the H factor

    @property
    def label(self) -> str:
        return f"{self.condition_group}.{self.regime}"


def classify(alpha_ratio: float, mu_ratio: float, rho: float) -> RegimeClassification:
    """Decide the regime of a reduced (a, m, rho) triple."""
    a, m = float(alpha_ratio), float(mu_ratio)
    if a <= 0 or m <= 0:
        raise ValueError("ratios must be positive")
    if not -1.0 < rho < 1.0:
        raise ValueError("need -1 < rho < 1")

    # a m <= 1 makes (a+m)/2 the only threshold reachable below 1, and
    # a m > 1 makes it (a+m)/(2am); group and threshold come in pairs.
    group = "i" if a * m <= 1.0 else "ii"
    if group == "i":
        threshold = (a + m) / 2.0
        takeover = 0
    else:
        threshold = (a + m) / (2.0 * a * m)
        takeover = 1
    tie = abs(rho - threshold) <= _TIE_RTOL * abs(threshold)

    if tie or rho > threshold:
        other = 1 - takeover
        if takeover == 0:
            t0, ghat, gtilde, base = 1.0, 4.0, 2.0, 1.0
        else:
            t0, ghat, gtilde, base = a / m, 4.0 * a * m, 2.0 * m**3 / a, 1.0 / m
        return RegimeClassification(
            condition_group=group,
            regime="R2" if tie else "R3",
            threshold=float(threshold),
            essential=(takeover,),
            weakly_essential=(other,) if tie else (),
            unessential=() if tie else (other,),
            t0=float(t0),
            ghat=float(ghat),
            gtilde=float(gtilde),
            prefactor=base / 2.0 if tie else base,
        )

    one_rho2 = 1.0 - rho * rho
    big_a = (1.0 + a * a - 2.0 * a * rho) / one_rho2
    big_q = (1.0 + m * m - 2.0 * m * rho) / one_rho2
    t0 = float(np.sqrt(big_a / big_q))
    ghat = 2.0 * big_a / t0 + 2.0 * (1.0 + a * m - rho * (a + m)) / one_rho2
    gtilde = 2.0 * big_a / t0**3
    pref = 1.0 / (t0 * np.sqrt(np.pi * one_rho2 * gtilde))
    return RegimeClassification(
        condition_group=group,
        regime="R1",
        threshold=float(threshold),
        essential=(0, 1),
        weakly_essential=(),
        unessential=(),
        t0=t0,
        ghat=float(ghat),
        gtilde=float(gtilde),
        prefactor=float(pref),
    )


def _reduced_model(red: TwoDimReduction) -> RiskModel:
    rho = red.rho
    return make_model(
        mu=[1.0, red.mu_ratio],
        alpha=[1.0, red.alpha_ratio],
        sigma=[[1.0, rho], [rho, 1.0]],
    )


def sojourn_factor(cls: RegimeClassification, red: TwoDimReduction, r: float,
                   seed: int | None = None, n_paths: int = 200_000) -> tuple[float, float]:
    """H(r~) of the reduced model and its standard error, r in original time."""
    r_red = red.mu1**2 * r
    if cls.regime in ("R2", "R3"):
        if cls.essential == (0,):
            return float(pickands.h0(r_red)), 0.0
        m = red.mu_ratio
        return float(m * pickands.h0(m * m * r_red)), 0.0
    red_model = _reduced_model(red)
    est = pickands.estimate_h(minimize_g(red_model), red_model, r_red, seed=seed, n_paths=n_paths)
    return est.value, est.std_error


def psi_spec(cls: RegimeClassification, red: TwoDimReduction) -> PsiSpec:
    """Weak-coordinate clearing data in reduced units (R2 only)."""
    if cls.regime != "R2":
        return PsiSpec(t0=cls.t0, k_index=(), direction=None, d_kk=None)
    rho = red.rho
    a, m = red.alpha_ratio, red.mu_ratio
    if cls.essential == (0,):
        direction = np.array([m - rho])
        k_index = (1,)
    else:
        direction = np.array([(1.0 - rho * m) / np.sqrt(a / m)])
        k_index = (0,)
    d_kk = np.array([[1.0 - rho * rho]])
    direction.setflags(write=False)
    d_kk.setflags(write=False)
    return PsiSpec(t0=cls.t0, k_index=k_index, direction=direction, d_kk=d_kk)


@dataclass(frozen=True)
class TwoDimAsymptotic:
    u: float
    r: float
    value: float
    log_value: float
    underflow: bool
    reduction: TwoDimReduction
    classification: RegimeClassification
    h_value: float
    h_error: float

    def log_approx(self, u: float) -> float:
        cls = self.classification
        red = self.reduction
        v = red.alpha1 * red.mu1 * u
        m = len(cls.essential)
        return (
            np.log(cls.prefactor)
            + np.log(self.h_value)
            + 0.5 * (1.0 - m) * np.log(v)
            - 0.5 * cls.ghat * v
        )

    def approx(self, u: float) -> float:
        lv = self.log_approx(u)
        return float(np.exp(lv)) if lv > _LOG_TINY else 0.0


def two_dim_asymptotic(model: RiskModel, r: float, u: float,
                       seed: int | None = None, n_paths: int = 200_000) -> TwoDimAsymptotic:
    """Closed-form tail approximation for a unit-variance 2-d model."""
    red = reduce(model, r, u)
    cls = classify(red.alpha_ratio, red.mu_ratio, red.rho)
    h_val, h_err = sojourn_factor(cls, red, r, seed=seed, n_paths=n_paths)
    m = len(cls.essential)
    lv = float(np.log(cls.prefactor) + np.log(h_val)
               + 0.5 * (1.0 - m) * np.log(red.v) - 0.5 * cls.ghat * red.v)
    underflow = lv <= _LOG_TINY
    return TwoDimAsymptotic(
        u=red.u,
        r=red.r,
        value=0.0 if underflow else float(np.exp(lv)),
        log_value=lv,
        underflow=underflow,
        reduction=red,
        classification=cls,
        h_value=float(h_val),
        h_error=float(h_err),
    )


@dataclass(frozen=True)
class TwoDimConditionalLaw:
    """Limit law of the ruin time for unit-variance 2-d models."""

    r1: float
    r2: float
    reduction: TwoDimReduction
    classification: RegimeClassification
    h_ratio: float
    spec: PsiSpec = field(repr=False)
    norm: float = field(repr=False)

    def center(self, u: float) -> float:
        red, cls = self.reduction, self.classification
        return float(cls.t0 * red.alpha1 * u / red.mu1)

    def scale(self, u: float) -> float:
        red, cls = self.reduction, self.classification
        v = red.alpha1 * red.mu1 * u
        return float(np.sqrt(2.0 * v / cls.gtilde) / red.mu1**2)

    def cdf_standardized(self, s: float) -> float:
        """cdf in units of scale(u) around center(u); u-free by affinity."""
        g = gaussian_psi_integral(self.classification.gtilde, self.spec, upper=float(s))
        return float(self.h_ratio * g / self.norm)

    def cdf_time(self, t: float, u: float) -> float:
        return self.cdf_standardized((t - self.center(u)) / self.scale(u))


def two_dim_law(model: RiskModel, r1: float, r2: float | None = None,
                seed: int | None = None, n_paths: int = 200_000) -> TwoDimConditionalLaw:
    """Build the conditional ruin-time law object for a 2-d model."""
    if r2 is None:
        r2 = r1
    if r1 < 0 or r2 < r1:
        raise ValueError("need 0 <= r1 <= r2")
    red = reduce(model, r1, 1.0)
    cls = classify(red.alpha_ratio, red.mu_ratio, red.rho)
    spec = psi_spec(cls, red)
    if r1 == r2:
        ratio = 1.0
    else:
        h1, _ = sojourn_factor(cls, red, r1, seed=seed, n_paths=n_paths)
        h2, _ = sojourn_factor(cls, red, r2, seed=None if seed is None else seed + 1, n_paths=n_paths)
        ratio = h2 / h1
    norm = gaussian_psi_integral(cls.gtilde, spec, upper=None)
    return TwoDimConditionalLaw(
        r1=float(r1),
        r2=float(r2),
        reduction=red,
        classification=cls,
        h_ratio=float(ratio),
        spec=spec,
        norm=float(norm),
    )


def two_dim_cond_law(model: RiskModel, r1: float, r2: float, s: float,
                     seed: int | None = None, n_paths: int = 200_000) -> float:
    """Limiting P{standardized tau_{r2} <= s | tau_{r1} < inf} for 2-d models."""
    return two_dim_law(model, r1, r2, seed=seed, n_paths=n_paths).cdf_standardized(s)
