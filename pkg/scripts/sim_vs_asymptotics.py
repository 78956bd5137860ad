#!/usr/bin/env python3
"""Sweep capital u and compare simulated ruin probabilities to the tail formula.

For each u the script prints the Monte Carlo estimate p_hat with its 95%
half-width next to the asymptotic approximation C * H(r) * u^{(1-m)/2} *
exp(-ghat u / 2) and their ratio.  The approximation is a u -> inf
statement, so the ratio should drift toward 1 as u grows until the event
becomes too rare for the path budget.  When at least three u values have
ruined paths the script also fits the exponential rate from the simulated
points (after removing the known polynomial factor) and compares it to
-ghat/2.

Usage:
    python scripts/sim_vs_asymptotics.py --model unit1d
    python scripts/sim_vs_asymptotics.py --model iid2d --n-paths 400000
    python scripts/sim_vs_asymptotics.py --model corr2d --r 0.5 --u 0.6 0.9 1.2
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sojourn_ruin import (
    AsymptoticConfig,
    SimConfig,
    asymptotic_ruin,
    make_model,
    minimize_g,
    simulate_ruin,
)

MODELS = {
    "unit1d": dict(mu=[1.0], alpha=[1.0], sigma=[[1.0]]),
    "steep1d": dict(mu=[2.0], alpha=[0.5], sigma=[[1.0]]),
    "iid2d": dict(mu=[1.0, 1.0], alpha=[1.0, 1.0], sigma=[[1.0, 0.0], [0.0, 1.0]]),
    "corr2d": dict(mu=[1.0, 1.0], alpha=[1.0, 1.0],
                   sigma=[[1.0, 0.5], [0.5, 1.0]]),
}

DEFAULT_U = {
    "unit1d": (0.5, 1.0, 2.0, 3.0),
    "steep1d": (0.5, 1.0, 2.0, 3.0),
    "iid2d": (0.6, 0.8, 1.0, 1.2),
    "corr2d": (0.6, 0.8, 1.0, 1.2),
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", choices=sorted(MODELS), default="unit1d")
    ap.add_argument("--r", type=float, default=0.0, help="sojourn budget")
    ap.add_argument("--u", type=float, nargs="+", default=None,
                    help="capital sweep (default depends on the model)")
    ap.add_argument("--n-paths", type=int, default=200_000)
    ap.add_argument("--h-paths", type=int, default=None,
                    help="paths for the H(r) estimate when no closed form"
                         " applies (default: same as --n-paths)")
    ap.add_argument("--seed", type=int, default=314)
    args = ap.parse_args()
    if args.r < 0:
        ap.error("--r must be nonnegative")

    model = make_model(**MODELS[args.model])
    u_values = tuple(args.u) if args.u else DEFAULT_U[args.model]
    if any(u <= 0 for u in u_values):
        ap.error("capitals must be positive")

    gm = minimize_g(model)
    # one H estimate per (model, r); the u dependence is analytic
    h_paths = args.h_paths if args.h_paths is not None else args.n_paths
    asym = asymptotic_ruin(model, args.r, u_values[0],
                           config=AsymptoticConfig(seed=args.seed, h_n_paths=h_paths))
    print(f"model {args.model}: essential set {gm.essential}, m={gm.m},"
          f" t0={gm.t0:.6f}, ghat={gm.ghat:.6f}")
    print(f"H({args.r}) = {asym.h_value:.6f}"
          f" ({asym.h_method}, std err {asym.h_error:.2g})")
    print(f"{'u':>6} {'p_hat':>12} {'ci95':>10} {'asym':>12} {'ratio':>8} {'hits':>8}  time")

    logs = []
    for u in u_values:
        tic = time.perf_counter()
        sim = simulate_ruin(model, args.r, u,
                            config=SimConfig(n_paths=args.n_paths, seed=args.seed))
        approx = asym.approx(u)
        ratio = sim.p_hat / approx if approx > 0 else float("nan")
        print(f"{u:6.2f} {sim.p_hat:12.3e} {sim.ci_half_width:10.1e}"
              f" {approx:12.3e} {ratio:8.3f} {sim.n_ruined:8d}"
              f"  {time.perf_counter() - tic:5.1f}s")
        if sim.n_ruined > 0:
            logs.append((u, np.log(sim.p_hat) - 0.5 * (1.0 - gm.m) * np.log(u)))

    if len(logs) >= 3:
        us, ys = np.array(logs).T
        slope = np.polyfit(us, ys, 1)[0]
        target = -0.5 * gm.ghat
        print(f"fitted exponential rate {slope:+.4f} vs -ghat/2 = {target:+.4f}"
              f" (rel err {abs(slope - target) / abs(target):.2%})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
