"""Exact asymptotics and simulation of cumulative Parisian ruin.

A d-dimensional Brownian risk portfolio is ruined in the cumulative
sense once the total time all surplus components spend simultaneously
below zero exceeds a budget r.  This package computes the exact
large-capital asymptotics of that ruin probability, the limiting law
of the ruin time, the closed-form two-dimensional catalogue, and a
direct Monte Carlo simulator used to validate them.
"""

from .asymptotics import (
    AsymptoticConfig,
    AsymptoticResult,
    ConditionalLaw,
    asymptotic_ruin,
    cond_ruin_time_cdf,
    cond_ruin_time_law,
)
from .constants import (
    PrefactorConstant,
    PsiSpec,
    build_psi_spec,
    c_constant,
    gaussian_psi_integral,
    prefactor_constant,
    psi,
)
from .gaussian import MvnResult, mvn_survival, phi_cdf
from .gmin import GMinimum, g_at, minimize_g
from .model import ModelError, RiskModel, load_model, make_model, save_model, validate
from .pickands import (
    HEstimate,
    SojournPath,
    estimate_h,
    h0,
    h_oneD_closed_form,
    per_path_integral,
    simulate_sojourn_path,
    sojourn_constant,
    tilt_vector,
)
from .qp import QpSolution, classify_indices, solve_pm
from .simulator import RuinTimeSamples, SimConfig, SimEstimate, ruin_time_samples, simulate_ruin
from .twodim import (
    RegimeClassification,
    TwoDimAsymptotic,
    TwoDimConditionalLaw,
    TwoDimReduction,
    classify,
    reduce,
    two_dim_asymptotic,
    two_dim_cond_law,
    two_dim_law,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticConfig",
    "AsymptoticResult",
    "ConditionalLaw",
    "GMinimum",
    "HEstimate",
    "ModelError",
    "MvnResult",
    "PrefactorConstant",
    "PsiSpec",
    "QpSolution",
    "RegimeClassification",
    "RiskModel",
    "RuinTimeSamples",
    "SimConfig",
    "SimEstimate",
    "SojournPath",
    "TwoDimAsymptotic",
    "TwoDimConditionalLaw",
    "TwoDimReduction",
    "asymptotic_ruin",
    "build_psi_spec",
    "c_constant",
    "classify",
    "classify_indices",
    "cond_ruin_time_cdf",
    "cond_ruin_time_law",
    "estimate_h",
    "g_at",
    "gaussian_psi_integral",
    "h0",
    "h_oneD_closed_form",
    "load_model",
    "make_model",
    "minimize_g",
    "mvn_survival",
    "per_path_integral",
    "phi_cdf",
    "prefactor_constant",
    "psi",
    "reduce",
    "ruin_time_samples",
    "save_model",
    "simulate_ruin",
    "simulate_sojourn_path",
    "sojourn_constant",
    "solve_pm",
    "tilt_vector",
    "two_dim_asymptotic",
    "two_dim_cond_law",
    "two_dim_law",
    "validate",
]
