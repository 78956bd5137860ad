"""Minimization of the decay-rate function.

The logarithmic rate of the ruin probability is governed by

    g(t) = P_Sigma(alpha + mu t) / t,       t > 0,

whose unique minimizer t0 determines the essential coordinate set I,
the exponent constant ghat = g(t0) and the curvature gtilde = g''(t0).
On the region where I is constant,

    g(t) = a/t + 2c + q t,    a = alpha_I' S alpha_I,  q = mu_I' S mu_I,
    S = Sigma_II^{-1},        c = alpha_I' S mu_I,

so t0 = sqrt(a/q), ghat = 2 sqrt(a q) + 2 c and gtilde = 2 a / t0^3.
The minimizer is located by a coarse geometric scan plus golden-section
search, then snapped to the fixed point t0(I) of the active set,
iterating the fixed point until the set stabilizes (golden section
alone resolves the flat quadratic bottom only to about sqrt(eps)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RiskModel
from .qp import QpSolution, solve_pm

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GMinimum:
    t0: float
    b: np.ndarray  # alpha + mu * t0
    essential: tuple[int, ...]
    weakly_essential: tuple[int, ...]
    unessential: tuple[int, ...]
    ghat: float
    gtilde: float
    m: int  # number of essential coordinates
    degenerate: bool


def g_at(model: RiskModel, t: float) -> tuple[float, QpSolution]:
    if t <= 0:
        raise ValueError("g(t) is defined for t > 0 only")
    sol = solve_pm(model.sigma, model.alpha + model.mu * t)
    return sol.value / t, sol


def _subblock_scalars(model: RiskModel, idx: list[int]):
    s_ii = model.sigma[np.ix_(idx, idx)]
    alpha_i = model.alpha[idx]
    mu_i = model.mu[idx]
    sa = np.linalg.solve(s_ii, alpha_i)
    sm = np.linalg.solve(s_ii, mu_i)
    return float(alpha_i @ sa), float(alpha_i @ sm), float(mu_i @ sm)


def minimize_g(model: RiskModel) -> GMinimum:
    """Locate the unique minimizer of g and package the expansion data."""
    ks = np.arange(-27, 28)
    vals = np.array([g_at(model, float(2.0**k))[0] for k in ks])
    j = int(np.argmin(vals))
    if j == 0 or j == ks.size - 1:
        raise ValueError("minimizer of g outside the scan range [2^-27, 2^27]")

    lo, hi = float(2.0 ** ks[j - 1]), float(2.0 ** ks[j + 1])
    # golden-section search; g is strictly convex in t on each active region
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, _ = g_at(model, x1)
    f2, _ = g_at(model, x2)
    while hi - lo > 1e-10 * (1.0 + 0.5 * (lo + hi)):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1, _ = g_at(model, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2, _ = g_at(model, x2)
    t_star = 0.5 * (lo + hi)

    g_star, sol = g_at(model, t_star)
    degenerate = False
    t0, g_check, sol0 = t_star, g_star, sol
    idx = list(sol.essential)
    seen = set()
    # the flat quadratic bottom limits golden section to about sqrt(eps)
    # relative accuracy, so never keep t_star when the exact fixed point
    # t0(I) = sqrt(a/q) of a stabilized active set is available
    while tuple(idx) not in seen:
        seen.add(tuple(idx))
        a, c, q = _subblock_scalars(model, idx)
        t_fp = float(np.sqrt(a / q))
        if not np.isfinite(t_fp) or t_fp <= 0:
            degenerate = True
            break
        g_fp, sol_fp = g_at(model, t_fp)
        if g_fp > g_star + 1e-9 * max(1.0, abs(g_star)):
            # this set's fixed point overshoots a kink; stay at the scan
            degenerate = True
            break
        t0, g_check, sol0 = t_fp, g_fp, sol_fp
        if sol_fp.essential == tuple(idx):
            break
        idx = list(sol_fp.essential)
    else:
        degenerate = True  # active set cycles through a tie

    idx = list(sol0.essential)
    a, c, q = _subblock_scalars(model, idx)
    ghat = 2.0 * np.sqrt(a * q) + 2.0 * c
    gtilde = 2.0 * a / t0**3
    if abs(g_check - ghat) > 1e-8 * max(1.0, abs(ghat)):
        degenerate = True
        ghat = g_check
    if sol0.degenerate:
        degenerate = True

    b = model.alpha + model.mu * t0
    b.setflags(write=False)
    return GMinimum(
        t0=t0,
        b=b,
        essential=sol0.essential,
        weakly_essential=sol0.weakly_essential,
        unessential=sol0.unessential,
        ghat=float(ghat),
        gtilde=float(gtilde),
        m=len(sol0.essential),
        degenerate=degenerate,
    )
