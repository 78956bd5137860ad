"""Command-line surface emitting machine-readable results.

Single results are printed as JSON envelopes (command, model echo,
resolved inputs, results, seed, versions, wall time) that validate
against the schema shipped in ``schemas/output.schema.json``; tables
and ladders are printed as CSV with the resolved configuration echoed
on ``#`` comment lines.  Every command is deterministic given --seed;
omitting it draws one from entropy and echoes it.  All reported index
sets are 0-based.  Exit codes: 0 success, 2 file or input errors,
1 unexpected failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time

import numpy as np
import scipy

from . import __version__
from .asymptotics import AsymptoticConfig, asymptotic_ruin
from .gmin import g_at, minimize_g
from .model import ModelError, load_model
from .pickands import estimate_h
from .simulator import SimConfig, simulate_ruin
from .streams import resolve_seed
from .twodim import two_dim_asymptotic, two_dim_law


def _versions() -> dict:
    return {
        "sojourn_ruin": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _record(command: str, model, inputs: dict, results: dict, seed, t_start: float) -> dict:
    return {
        "command": command,
        "model": model.to_dict(),
        "inputs": inputs,
        "results": results,
        "seed": seed,
        "versions": _versions(),
        "wall_time_s": time.perf_counter() - t_start,
    }


def _emit_json(record: dict) -> None:
    print(json.dumps(record, indent=2, sort_keys=True))


def _emit_csv(echo: dict, columns: list[str], rows: list[list]) -> None:
    out = sys.stdout
    for key, value in echo.items():
        out.write(f"# {key}: {value}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def _floats(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise ValueError(f"{flag} must contain at least one number")
    return values


def cmd_qp(args) -> int:
    t_start = time.perf_counter()
    model = load_model(args.model)
    if args.t is not None:
        t_used = float(args.t)
        if t_used <= 0:
            raise ValueError("--t must be positive")
    else:
        t_used = minimize_g(model).t0
    g_value, sol = g_at(model, t_used)
    results = {
        "t": t_used,
        "b": (model.alpha + model.mu * t_used).tolist(),
        "I": list(sol.essential),
        "K": list(sol.weakly_essential),
        "J": list(sol.unessential),
        "solution": sol.solution.tolist(),
        "value": sol.value,
        "g_value": g_value,
        "degenerate": sol.degenerate,
    }
    inputs = {"model_file": args.model, "t": t_used, "t_from_flag": args.t is not None}
    _emit_json(_record("qp", model, inputs, results, args.seed, t_start))
    return 0


def _asym_rows(model, r: float, u_list: list[float], config: AsymptoticConfig) -> tuple[list[dict], dict]:
    first = asymptotic_ruin(model, r, u_list[0], config)
    gm = first.gm
    shared = {
        "m": gm.m,
        "t0": gm.t0,
        "ghat": gm.ghat,
        "gtilde": gm.gtilde,
        "c_i": first.c_i,
        "h_value": first.h_value,
        "h_error": first.h_error,
        "h_method": first.h_method,
    }
    rows = []
    for u in u_list:
        log_value = float(first.log_approx(u))
        value = first.approx(u)
        underflow = value == 0.0 and log_value < 0
        rows.append({
            "u": float(u),
            "r": float(r),
            "value": None if underflow else value,
            "log_value": log_value,
            "underflow": underflow,
        })
    return rows, shared


def cmd_asym(args) -> int:
    t_start = time.perf_counter()
    model = load_model(args.model)
    u_list = _floats(args.u_list, "--u-list")
    if any(u <= 0 for u in u_list):
        raise ValueError("--u-list entries must be positive")
    seed = resolve_seed(args.seed)
    if args.h_mc is not None:
        mc = _floats(args.h_mc, "--h-mc")
        if len(mc) != 3:
            raise ValueError("--h-mc expects paths,T,dt")
        config = AsymptoticConfig(seed=seed, h_method="anchored", h_n_paths=int(mc[0]),
                                  h_T=float(mc[1]), h_dt=float(mc[2]))
        h_mc_echo = {"n_paths": int(mc[0]), "T": float(mc[1]), "dt": float(mc[2])}
    else:
        config = AsymptoticConfig(seed=seed)
        h_mc_echo = None
    rows, shared = _asym_rows(model, args.r, u_list, config)
    inputs = {
        "model_file": args.model,
        "r": float(args.r),
        "u_list": u_list,
        "h_mc": h_mc_echo,
        "format": args.format,
    }
    if args.format == "json":
        results = dict(shared)
        results["rows"] = rows
        _emit_json(_record("asym", model, inputs, results, seed, t_start))
        return 0
    echo = {
        "command": "asym",
        "model": json.dumps(model.to_dict(), sort_keys=True),
        "r": float(args.r),
        "u_list": ",".join(repr(u) for u in u_list),
        "h_mc": "none" if h_mc_echo is None else json.dumps(h_mc_echo, sort_keys=True),
        "seed": seed,
        **{k: shared[k] for k in ("m", "t0", "ghat", "gtilde", "c_i", "h_value", "h_error", "h_method")},
        "versions": json.dumps(_versions(), sort_keys=True),
    }
    columns = ["u", "r", "value", "log_value", "underflow"]
    table = [[row["u"], row["r"], "" if row["value"] is None else row["value"],
              row["log_value"], row["underflow"]] for row in rows]
    _emit_csv(echo, columns, table)
    return 0


def cmd_simulate(args) -> int:
    t_start = time.perf_counter()
    model = load_model(args.model)
    seed = resolve_seed(args.seed)
    config = SimConfig(
        n_paths=args.paths,
        dt=args.dt,
        horizon_mult=args.horizon_mult,
        seed=seed,
        antithetic=args.antithetic,
        exact_zero_crossing=not args.no_bridge,
    )
    est = simulate_ruin(model, args.r, args.u, config)
    if est.n_ruined:
        qs = np.quantile(est.ruin_times, [0.1, 0.25, 0.5, 0.75, 0.9])
        quantiles = {p: float(v) for p, v in zip(("p10", "p25", "p50", "p75", "p90"), qs)}
    else:
        quantiles = None
    results = {
        "p_hat": est.p_hat,
        "ci_half_width": est.ci_half_width,
        "n_paths": est.n_paths,
        "n_ruined": est.n_ruined,
        "dt": est.dt,
        "horizon": est.horizon,
        "bridge_corrected": est.bridge_corrected,
        "antithetic": est.antithetic,
        "ruin_time_quantiles": quantiles,
    }
    inputs = {
        "model_file": args.model,
        "r": float(args.r),
        "u": float(args.u),
        "n_paths": args.paths,
        "dt": est.dt,
        "horizon_mult": float(args.horizon_mult),
        "antithetic": bool(args.antithetic),
        "exact_zero_crossing": not args.no_bridge,
    }
    _emit_json(_record("simulate", model, inputs, results, seed, t_start))
    return 0


def cmd_two_dim(args) -> int:
    t_start = time.perf_counter()
    model = load_model(args.model)
    seed = resolve_seed(args.seed)
    asym = two_dim_asymptotic(model, args.r, args.u, seed=seed, n_paths=args.paths)
    cls = asym.classification
    red = asym.reduction
    results = {
        "regime": cls.label,
        "condition_group": cls.condition_group,
        "threshold": cls.threshold,
        "essential": list(cls.essential),
        "weakly_essential": list(cls.weakly_essential),
        "unessential": list(cls.unessential),
        "t0": cls.t0,
        "ghat": cls.ghat,
        "gtilde": cls.gtilde,
        "prefactor": cls.prefactor,
        "reduction": {
            "v": red.v,
            "r_tilde": red.r_tilde,
            "alpha_ratio": red.alpha_ratio,
            "mu_ratio": red.mu_ratio,
            "rho": red.rho,
        },
        "h_value": asym.h_value,
        "h_error": asym.h_error,
        "value": None if asym.underflow else asym.value,
        "log_value": asym.log_value,
        "underflow": asym.underflow,
    }
    cond_echo = None
    if args.cond is not None:
        r1, r2 = args.cond
        s_grid = _floats(args.s_grid, "--s-grid")
        law = two_dim_law(model, r1, r2, seed=seed, n_paths=args.paths)
        results["cond"] = {
            "r1": float(r1),
            "r2": float(r2),
            "h_ratio": law.h_ratio,
            "center": law.center(args.u),
            "scale": law.scale(args.u),
            "cdf": [{"s": float(s), "value": law.cdf_standardized(s)} for s in s_grid],
        }
        cond_echo = {"r1": float(r1), "r2": float(r2), "s_grid": s_grid}
    inputs = {
        "model_file": args.model,
        "r": float(args.r),
        "u": float(args.u),
        "n_paths": args.paths,
        "cond": cond_echo,
    }
    _emit_json(_record("two-dim", model, inputs, results, seed, t_start))
    return 0


def cmd_hconst(args) -> int:
    t_start = time.perf_counter()
    model = load_model(args.model)
    seed = resolve_seed(args.seed)
    ladder = _floats(args.T_ladder, "--T-ladder")
    if any(t <= 0 for t in ladder):
        raise ValueError("--T-ladder entries must be positive")
    gm = minimize_g(model)
    rows = []
    for T in ladder:
        est = estimate_h(
            gm,
            model,
            args.r,
            T=T,
            dt=args.dt,
            n_paths=args.paths,
            inner_samples=args.inner,
            seed=seed,
            method=args.method,
        )
        rows.append([est.T, est.dt, est.n_paths, est.inner_samples, est.r,
                     est.value, est.std_error, est.method, est.richardson, est.seed])
    echo = {
        "command": "hconst",
        "model": json.dumps(model.to_dict(), sort_keys=True),
        "r": float(args.r),
        "T_ladder": ",".join(repr(t) for t in ladder),
        "n_paths": args.paths,
        "inner_samples": args.inner,
        "dt": "T/2048" if args.dt is None else repr(float(args.dt)),
        "method": args.method,
        "seed": seed,
        "essential": ",".join(str(i) for i in gm.essential),
        "versions": json.dumps(_versions(), sort_keys=True),
    }
    columns = ["T", "dt", "n_paths", "inner_samples", "r", "value", "std_error",
               "method", "richardson", "seed"]
    _emit_csv(echo, columns, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sojourn-ruin",
        description="Cumulative-sojourn ruin asymptotics, constants and simulation",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_qp = sub.add_parser("qp", help="active-set solution of the decay-rate quadratic program")
    p_qp.add_argument("--model", required=True, help="model JSON file")
    p_qp.add_argument("--t", type=float, default=None, help="time point; defaults to the minimizer t0")
    p_qp.add_argument("--seed", type=int, default=None, help="unused; echoed for uniformity")
    p_qp.set_defaults(func=cmd_qp)

    p_asym = sub.add_parser("asym", help="tail approximation over a list of capitals")
    p_asym.add_argument("--model", required=True)
    p_asym.add_argument("--r", type=float, default=0.0, help="sojourn budget (default 0)")
    p_asym.add_argument("--u-list", required=True, help="comma-separated capitals")
    p_asym.add_argument("--h-mc", default=None, metavar="PATHS,T,DT",
                        help="force Monte Carlo for H with these parameters")
    p_asym.add_argument("--seed", type=int, default=None)
    p_asym.add_argument("--format", choices=("csv", "json"), default="csv")
    p_asym.set_defaults(func=cmd_asym)

    p_sim = sub.add_parser("simulate", help="direct Monte Carlo of the ruin probability")
    p_sim.add_argument("--model", required=True)
    p_sim.add_argument("--r", type=float, default=0.0)
    p_sim.add_argument("--u", type=float, required=True)
    p_sim.add_argument("--paths", type=int, default=100_000)
    p_sim.add_argument("--dt", type=float, default=None, help="grid step (default t0*u/1024)")
    p_sim.add_argument("--horizon-mult", type=float, default=3.0, help="horizon in units of t0*u")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--antithetic", action="store_true")
    p_sim.add_argument("--no-bridge", action="store_true",
                       help="disable the exact zero-crossing correction (r=0, d=1)")
    p_sim.set_defaults(func=cmd_simulate)

    p_two = sub.add_parser("two-dim", help="closed-form catalogue for unit-variance 2-d models")
    p_two.add_argument("--model", required=True)
    p_two.add_argument("--r", type=float, default=0.0)
    p_two.add_argument("--u", type=float, required=True)
    p_two.add_argument("--paths", type=int, default=200_000, help="paths for the R1 sojourn constant")
    p_two.add_argument("--cond", type=float, nargs=2, default=None, metavar=("R1", "R2"),
                       help="also evaluate the conditional ruin-time law")
    p_two.add_argument("--s-grid", default="-2,-1,0,1,2", help="standardized grid for --cond")
    p_two.add_argument("--seed", type=int, default=None)
    p_two.set_defaults(func=cmd_two_dim)

    p_h = sub.add_parser("hconst", help="sojourn-constant estimates over a window ladder")
    p_h.add_argument("--model", required=True)
    p_h.add_argument("--r", type=float, default=0.0)
    p_h.add_argument("--T-ladder", default="8,16,32", help="comma-separated window lengths")
    p_h.add_argument("--paths", type=int, default=200_000)
    p_h.add_argument("--inner", type=int, default=64, help="level samples per path (m >= 2)")
    p_h.add_argument("--dt", type=float, default=None, help="grid step (default T/2048)")
    p_h.add_argument("--method", choices=("anchored", "direct"), default="anchored")
    p_h.add_argument("--seed", type=int, default=None)
    p_h.set_defaults(func=cmd_hconst)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
