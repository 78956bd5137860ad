"""Sojourn constants of the limiting local field.

The local time-scale constant entering the ruin asymptotics is, with
c the tilt vector of the essential block and Z(v) = A_I W(v) - mu_I v,

    H(r) = lim_{T->inf} (1/T) Int_{R^m} e^{<c,x>}
                 P{ meas{v in [0,T] : Z(v) > x} > r } dx.

For a single essential coordinate i this is closed form:

    H(r) = mu_i h0(mu_i^2 r / Sigma_ii),
    h0(x) = 2 (1+x) Psi(sqrt(x)) - sqrt(2 x / pi) exp(-x/2),

with Psi the standard normal survival function.

Monte Carlo estimation for m >= 2 uses an anchored exchange-of-measure
identity rather than the definition above.  Inserting the partition of
unity sum_t e^{<c,Z(t)>} / sum_s e^{<c,Z(s)>} over grid anchors,
tilting at the anchor (the critical identity <c, Sigma_II c>/2 =
<c, mu_I> makes every anchor weight one) and recentering yields, for a
step-delta grid,

    H_delta(r) = (1/delta) E[ V(chi; r) / sum_v e^{<c, chi(v)>} ]

where chi is the recentered two-sided field with tent drift (slope
-mu_I forward, -alpha_I/t0 backward), and V(chi; r) is the weighted
volume of the set of levels x cleared for longer than r,

    V(chi; r) = Int_{R^m} e^{<c,x>} I{ delta #{v : chi(v) > x} > r } dx.

For m = 1, V = exp(c Lambda)/c with Lambda the k-th largest grid value,
k = floor(r/delta) + 1; for m >= 2 it is estimated by exponential
importance sampling of levels below the componentwise running maximum.
The ratio inside the expectation is bounded by one, so plain CLT
errors apply.  The finite window costs an exponentially small
truncation, at rate lam^2/(2 c'Sigma_II c) per unit length on the side
with drift slope lam; each side is padded by four nats of that decay
beyond the nominal span T so the truncation stays well under the MC
error.
The remaining grid bias, of order sqrt(delta), is removed by Richardson
extrapolation across strides (delta, 2 delta, 4 delta) of one fine
path, which keeps the coarse grids coupled to the fine one.

``method="direct"`` instead averages V(Z; r)/T over one-sided windows,
a literal discretization of the definition.  Its per-path values are
heavy tailed (the level integral is dominated by rare high excursions
whose weight grows like e^{c x}), so it needs short windows to be
trustworthy; it serves as an independent cross-check of the anchored
estimator, not as the production method.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .gmin import GMinimum
from .model import RiskModel
from .streams import resolve_seed, substream, thread_count

_BATCH_1D = 2048
_BATCH_ND = 256


def h0(x):
    """Sojourn-time factor of the one-dimensional constant."""
    x = np.asarray(x, dtype=float)
    root = np.sqrt(x)
    val = 2.0 * (1.0 + x) * ndtr(-root) - np.sqrt(2.0 * x / np.pi) * np.exp(-x / 2.0)
    return val if val.ndim else float(val)


def h_oneD_closed_form(mu: float, r: float) -> float:
    """Closed-form constant for a unit-variance coordinate with drift mu."""
    if mu <= 0 or r < 0:
        raise ValueError("need mu > 0 and r >= 0")
    return mu * h0(mu * mu * r)


def tilt_vector(gm: GMinimum, model: RiskModel) -> np.ndarray:
    """c = Sigma_II^{-1} b_I / t0, the (componentwise positive) tilt."""
    idx = list(gm.essential)
    c = np.linalg.solve(model.sigma[np.ix_(idx, idx)], gm.b[idx]) / gm.t0
    c.setflags(write=False)
    return c


def decay_rates(gm: GMinimum, model: RiskModel) -> tuple[float, float]:
    """Forward and backward truncation rates of the anchored window."""
    idx = list(gm.essential)
    c = tilt_vector(gm, model)
    lam_f = float(c @ model.mu[idx])
    lam_b = float(c @ model.alpha[idx]) / gm.t0
    return lam_f, lam_b


def closed_form(gm: GMinimum, model: RiskModel, r: float) -> float | None:
    """Exact constant when a single coordinate is essential, else None."""
    if gm.m != 1:
        return None
    i = gm.essential[0]
    var = model.sigma[i, i]
    mu = model.mu[i]
    return float(mu * h0(mu * mu * r / var))


@dataclass(frozen=True)
class HEstimate:
    value: float
    std_error: float
    r: float
    T: float
    dt: float
    n_paths: int
    inner_samples: int
    seed: int
    method: str
    richardson: bool
    stride_values: tuple[float, ...]  # means on the delta, 2 delta, 4 delta grids


def _richardson_weights(n_strides: int) -> np.ndarray:
    # cancel the sqrt(delta) (and for 3 strides the delta) bias terms
    s = np.sqrt(np.array([1.0, 2.0, 4.0][:n_strides]))
    vander = np.vstack([s**0, s, s * s])[:n_strides, :]
    rhs = np.zeros(n_strides)
    rhs[0] = 1.0
    return np.linalg.solve(vander, rhs)


def _volume_log(values: np.ndarray, c: np.ndarray, k: int, exponentials: np.ndarray | None) -> np.ndarray:
    """log V(chi; r) per path on one grid.

    values: (n_paths, n_grid, m); exponentials: (n_paths, n_inner, m),
    unused when m = 1 (the volume is exact there).
    """
    n, g, m = values.shape
    if m == 1:
        z = values[:, :, 0]
        lam = np.partition(z, g - k, axis=1)[:, g - k]
        return c[0] * lam - np.log(c[0])
    peak = values.max(axis=1)  # (n, m)
    x = peak[:, None, :] - exponentials / c  # levels under the maxima
    hits = np.zeros(x.shape[:2], dtype=np.int32)
    for j in range(g):
        hits += np.all(values[:, j, None, :] > x, axis=2)
    frac = np.mean(hits >= k, axis=1)
    logv = np.full(n, -np.inf)
    ok = frac > 0
    logv[ok] = np.log(frac[ok]) + peak[ok] @ c - np.log(c).sum()
    return logv


def _tent_paths(model, gm, dt, n_rows, n_b, n_f, rng):
    """Two-sided recentered field on the fine grid, kink at index n_b."""
    idx = list(gm.essential)
    m = len(idx)
    a_fac = np.linalg.cholesky(model.sigma[np.ix_(idx, idx)])
    fwd = rng.standard_normal((n_rows, n_f, m)) * np.sqrt(dt) @ a_fac.T
    fwd -= model.mu[idx] * dt
    bwd = rng.standard_normal((n_rows, n_b, m)) * np.sqrt(dt) @ a_fac.T
    bwd -= (model.alpha[idx] / gm.t0) * dt
    return np.concatenate(
        [np.cumsum(bwd, axis=1)[:, ::-1, :], np.zeros((n_rows, 1, m)), np.cumsum(fwd, axis=1)],
        axis=1,
    )


def _one_sided_paths(model, gm, dt, n_rows, n_grid, rng):
    idx = list(gm.essential)
    m = len(idx)
    a_fac = np.linalg.cholesky(model.sigma[np.ix_(idx, idx)])
    inc = rng.standard_normal((n_rows, n_grid, m)) * np.sqrt(dt) @ a_fac.T
    inc -= model.mu[idx] * dt
    return np.concatenate([np.zeros((n_rows, 1, m)), np.cumsum(inc, axis=1)], axis=1)


@dataclass(frozen=True)
class SojournPath:
    """One grid path of the drifted essential-block field Z."""

    grid: np.ndarray  # times 0, dt, ..., T
    values: np.ndarray  # (len(grid), m)
    dt: float
    T: float


def simulate_sojourn_path(gm: GMinimum, model: RiskModel, T: float, dt: float,
                          rng: np.random.Generator) -> SojournPath:
    """Simulate Z(t) = A_I W(t) - mu_I t on a step-dt grid over [0, T]."""
    if T <= 0 or dt <= 0 or dt > T:
        raise ValueError("need 0 < dt <= T")
    n = max(1, int(round(T / dt)))
    values = _one_sided_paths(model, gm, T / n, 1, n, rng)[0]
    grid = np.linspace(0.0, T, n + 1)
    values.setflags(write=False)
    grid.setflags(write=False)
    return SojournPath(grid=grid, values=values, dt=T / n, T=float(T))


def per_path_integral(path: SojournPath, c: np.ndarray, r: float,
                      inner_samples: int = 64,
                      rng: np.random.Generator | None = None) -> float:
    """Weighted volume of levels the path clears for longer than r.

    V = Int_{R^m} e^{<c,x>} I{ dt #{t : Z(t) > x} > r } dx, exact via the
    order statistic when m = 1, exponential importance sampling with
    inner_samples draws per path otherwise.  Zero when r >= T: the
    sojourn time over [0, T] cannot exceed the window.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r >= path.T:
        return 0.0
    c = np.asarray(c, dtype=float)
    m = path.values.shape[1]
    k = int(np.floor(r / path.dt)) + 1
    if k > path.values.shape[0]:
        return 0.0
    if m == 1:
        exps = None
    else:
        if rng is None:
            raise ValueError("m >= 2 needs an rng for the level sampling")
        exps = rng.exponential(size=(1, inner_samples, m))
    logv = _volume_log(path.values[None, :, :], c, k, exps)[0]
    return float(np.exp(logv))


def estimate_h(
    gm: GMinimum,
    model: RiskModel,
    r: float,
    T: float = 32.0,
    dt: float | None = None,
    n_paths: int = 200_000,
    inner_samples: int = 64,
    seed: int | None = None,
    method: str = "anchored",
    richardson: bool = True,
) -> HEstimate:
    """Monte Carlo estimate of the sojourn constant H(r).

    ``T`` is the nominal time span; the anchored method splits it
    across the two sides in proportion to the inverse decay rates and
    pads each side by four nats of truncation decay.  The grid step is
    T/n with n the multiple of four nearest to T/dt, so stride-4
    subgrids keep the kink.
    """
    if method not in ("anchored", "direct"):
        raise ValueError(f"unknown method {method!r}")
    if r < 0:
        raise ValueError("r must be nonnegative")
    window = float(T)
    if dt is None:
        dt = window / 2048.0
    n_total = max(8, int(round(window / dt / 4.0)) * 4)
    dt_eff = window / n_total
    c = tilt_vector(gm, model)
    m = gm.m
    seed = resolve_seed(seed)
    n_strides = 3 if richardson else 1
    weights = _richardson_weights(n_strides)
    strides = (1, 2, 4)[:n_strides]

    if method == "anchored":
        lam_f, lam_b = decay_rates(gm, model)
        idx = list(gm.essential)
        sigma_c2 = float(c @ model.sigma[np.ix_(idx, idx)] @ c)
        frac_f = (1.0 / lam_f) / (1.0 / lam_f + 1.0 / lam_b)
        # pad each side by four nats of drift-squared-over-variance decay:
        # the tent is a simulation device for the T -> inf limit, and the
        # truncation bias e^{-lam^2 span / (2 sigma_c^2)} must stay well
        # under the MC standard error
        pad_f = 8.0 * sigma_c2 / lam_f**2
        pad_b = 8.0 * sigma_c2 / lam_b**2
        n_f = max(int(round((frac_f * window + pad_f) / dt_eff / 4.0)) * 4, 4)
        n_b = max(int(round(((1.0 - frac_f) * window + pad_b) / dt_eff / 4.0)) * 4, 4)
    else:
        n_f, n_b = n_total, 0

    batch = _BATCH_1D if m == 1 else _BATCH_ND
    n_batches = (n_paths + batch - 1) // batch

    def run(bi: int):
        rng = substream(seed, bi)
        if method == "anchored":
            path = _tent_paths(model, gm, dt_eff, batch, n_b, n_f, rng)
        else:
            path = _one_sided_paths(model, gm, dt_eff, batch, n_f, rng)
        exps = None if m == 1 else rng.exponential(size=(batch, inner_samples, m))
        per_stride = []
        for s in strides:
            sub = path[:, ::s, :]
            k = int(np.floor(r / (s * dt_eff))) + 1
            if r >= window or k > sub.shape[1]:
                per_stride.append(np.zeros(batch))
                continue
            logv = _volume_log(sub, c, k, exps)
            if method == "anchored":
                proj = sub @ c
                peak = proj.max(axis=1)
                logden = peak + np.log(np.sum(np.exp(proj - peak[:, None]), axis=1))
                per_stride.append(np.exp(logv - logden) / (s * dt_eff))
            else:
                per_stride.append(np.exp(logv) / window)
        ys = np.stack(per_stride, axis=1)
        rows = batch if (bi + 1) * batch <= n_paths else n_paths - bi * batch
        y = (ys @ weights)[:rows]
        ys = ys[:rows]
        return y.sum(), np.square(y).sum(), ys.sum(axis=0), rows

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_batches)))
    else:
        parts = [run(bi) for bi in range(n_batches)]

    tot = sum(p[0] for p in parts)
    tot2 = sum(p[1] for p in parts)
    stride_sums = sum(p[2] for p in parts)
    n = sum(p[3] for p in parts)
    mean = tot / n
    var = max(tot2 / n - mean * mean, 0.0)
    return HEstimate(
        value=float(mean),
        std_error=float(np.sqrt(var / n)),
        r=float(r),
        T=window,
        dt=float(dt_eff),
        n_paths=int(n),
        inner_samples=int(inner_samples),
        seed=int(seed),
        method=method,
        richardson=bool(richardson),
        stride_values=tuple(float(v / n) for v in stride_sums),
    )


def sojourn_constant(
    gm: GMinimum,
    model: RiskModel,
    r: float,
    seed: int | None = None,
    n_paths: int = 200_000,
    T: float = 32.0,
    dt: float | None = None,
) -> tuple[float, float, str]:
    """H(r) and its standard error: closed form when m = 1, else MC."""
    exact = closed_form(gm, model, r)
    if exact is not None:
        return exact, 0.0, "closed_form"
    est = estimate_h(gm, model, r, T=T, dt=dt, n_paths=n_paths, seed=seed)
    return est.value, est.std_error, "anchored"
