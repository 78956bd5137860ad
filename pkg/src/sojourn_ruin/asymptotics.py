"""Large-capital approximations of the cumulative ruin probability.

For initial capital u the probability that the all-components-negative
sojourn of the surplus exceeds r behaves like

    P(u) ~ C * H(r) * u^((1-m)/2) * exp(-ghat u / 2),

with m the number of essential coordinates, ghat the minimal decay
rate, C the prefactor constant and H(r) the sojourn constant of the
local field.  Conditioned on this rare event, the time the sojourn
budget is exhausted concentrates at t0 u with fluctuations of order
sqrt(u):

    P{ tau_{r2} <= t0 u + x sqrt(u) | tau_{r1} < inf }
        ->  (H(r2)/H(r1)) * G(x) / G(inf),
    G(x) = Int_{-inf}^{x} exp(-gtilde s^2/4) psi(s) ds,

which for a single essential coordinate is a centered Gaussian law
with variance 2/gtilde.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pickands
from .constants import PrefactorConstant, PsiSpec, build_psi_spec, gaussian_psi_integral, prefactor_constant
from .gmin import GMinimum, minimize_g
from .model import RiskModel

_LOG_TINY = -700.0


@dataclass(frozen=True)
class AsymptoticConfig:
    seed: int | None = None
    h_method: str = "auto"  # auto | closed_form | anchored | direct
    h_n_paths: int = 200_000
    h_T: float = 32.0
    h_dt: float | None = None
    inner_samples: int = 64


def _h_value(gm, model, r, config) -> tuple[float, float, str, pickands.HEstimate | None]:
    method = config.h_method
    exact = pickands.closed_form(gm, model, r)
    if method == "auto":
        method = "closed_form" if exact is not None else "anchored"
    if method == "closed_form":
        if exact is None:
            raise ValueError("closed-form sojourn constant needs a single essential coordinate")
        return exact, 0.0, "closed_form", None
    est = pickands.estimate_h(
        gm,
        model,
        r,
        T=config.h_T,
        dt=config.h_dt,
        n_paths=config.h_n_paths,
        inner_samples=config.inner_samples,
        seed=config.seed,
        method=method,
    )
    return est.value, est.std_error, method, est


@dataclass(frozen=True)
class AsymptoticResult:
    u: float
    r: float
    value: float
    log_value: float
    underflow: bool
    prefactor: PrefactorConstant
    h_value: float
    h_error: float
    h_method: str
    gm: GMinimum
    h_r: pickands.HEstimate | None = field(repr=False, default=None)

    @property
    def c_i(self) -> float:
        return self.prefactor.value

    def log_approx(self, u: float) -> float:
        gm = self.gm
        return (
            self.prefactor.log_value
            + np.log(self.h_value)
            + 0.5 * (1.0 - gm.m) * np.log(u)
            - 0.5 * gm.ghat * u
        )

    def approx(self, u: float) -> float:
        lv = self.log_approx(u)
        return float(np.exp(lv)) if lv > _LOG_TINY else 0.0


def asymptotic_ruin(model: RiskModel, r: float, u: float, config: AsymptoticConfig | None = None) -> AsymptoticResult:
    """Evaluate the tail approximation at capital u."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if u <= 0:
        raise ValueError("u must be positive")
    if config is None:
        config = AsymptoticConfig()
    gm = minimize_g(model)
    pre = prefactor_constant(gm, model)
    h_val, h_err, h_method, h_est = _h_value(gm, model, r, config)
    log_value = pre.log_value + np.log(h_val) + 0.5 * (1.0 - gm.m) * np.log(u) - 0.5 * gm.ghat * u
    underflow = log_value <= _LOG_TINY
    value = 0.0 if underflow else float(np.exp(log_value))
    return AsymptoticResult(
        u=float(u),
        r=float(r),
        value=value,
        log_value=float(log_value),
        underflow=underflow,
        prefactor=pre,
        h_value=float(h_val),
        h_error=float(h_err),
        h_method=h_method,
        gm=gm,
        h_r=h_est,
    )


@dataclass(frozen=True)
class ConditionalLaw:
    """Limiting law of the ruin time given eventual ruin.

    ``cdf_fluctuation(x)`` is the limit of
    P{tau_{r2}(u) <= t0 u + x sqrt(u) | tau_{r1}(u) < inf}; it reaches
    h_ratio = H(r2)/H(r1) at x -> inf (one when r1 == r2).
    """

    r1: float
    r2: float
    t0: float
    gtilde: float
    h_ratio: float
    gm: GMinimum = field(repr=False)
    spec: PsiSpec = field(repr=False)
    norm: float = field(repr=False)

    def cdf_fluctuation(self, x: float) -> float:
        return self.cdf_standardized(float(x) * np.sqrt(self.gtilde / 2.0))

    def cdf_standardized(self, s: float) -> float:
        """Limit cdf in units of the natural scale sqrt(2 u / gtilde)."""
        g = gaussian_psi_integral(self.gtilde, self.spec, upper=float(s))
        return float(self.h_ratio * g / self.norm)

    def cdf_time(self, t: float, u: float) -> float:
        return self.cdf_fluctuation((t - self.t0 * u) / np.sqrt(u))

    def scale(self, u: float) -> float:
        """Standard-deviation-like width of the time law at capital u."""
        return float(np.sqrt(2.0 * u / self.gtilde))

    def center(self, u: float) -> float:
        return float(self.t0 * u)


def cond_ruin_time_law(
    model: RiskModel,
    r1: float,
    r2: float | None = None,
    config: AsymptoticConfig | None = None,
) -> ConditionalLaw:
    """Limit law of the r2-sojourn ruin time given r1-sojourn ruin."""
    if r2 is None:
        r2 = r1
    if r1 < 0 or r2 < r1:
        raise ValueError("need 0 <= r1 <= r2")
    if config is None:
        config = AsymptoticConfig()
    gm = minimize_g(model)
    spec = build_psi_spec(gm, model)
    if r1 == r2:
        ratio = 1.0
    else:
        h1, _, _, _ = _h_value(gm, model, r1, config)
        seed2 = None if config.seed is None else config.seed + 1
        cfg2 = AsymptoticConfig(
            seed=seed2,
            h_method=config.h_method,
            h_n_paths=config.h_n_paths,
            h_T=config.h_T,
            h_dt=config.h_dt,
            inner_samples=config.inner_samples,
        )
        h2, _, _, _ = _h_value(gm, model, r2, cfg2)
        ratio = h2 / h1
    norm = gaussian_psi_integral(gm.gtilde, spec, upper=None)
    return ConditionalLaw(
        r1=float(r1),
        r2=float(r2),
        t0=gm.t0,
        gtilde=gm.gtilde,
        h_ratio=float(ratio),
        gm=gm,
        spec=spec,
        norm=float(norm),
    )


def cond_ruin_time_cdf(
    model: RiskModel,
    r1: float,
    r2: float,
    s: float,
    config: AsymptoticConfig | None = None,
) -> float:
    """Limiting P{(tau_{r2} - t0 u)/sqrt(2u/gtilde) <= s | tau_{r1} < inf}."""
    return cond_ruin_time_law(model, r1, r2, config).cdf_standardized(s)
