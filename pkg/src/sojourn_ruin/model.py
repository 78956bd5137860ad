"""Risk model container and validation.

A d-dimensional risk portfolio is parametrized by a drift vector mu,
an initial-capital allocation alpha (both strictly positive), and a
dependence structure given either as a covariance matrix sigma or as a
square full-rank factor a with sigma = a @ a.T.  The surplus process is

    U_i(t) = alpha_i * u + mu_i * t - X_i(t),      X = a B(t),

for a standard d-dimensional Brownian motion B.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class ModelError(ValueError):
    """Invalid model parameters.

    ``code`` is a stable machine-readable tag:
    parse, ambiguous, dimension, symmetry, not_positive_definite, positivity.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RiskModel:
    dim: int
    mu: np.ndarray
    alpha: np.ndarray
    sigma: np.ndarray
    a: np.ndarray  # lower Cholesky factor of sigma

    def standard_deviations(self) -> np.ndarray:
        return np.sqrt(np.diag(self.sigma))

    def correlation(self) -> np.ndarray:
        s = self.standard_deviations()
        return self.sigma / np.outer(s, s)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu.tolist(),
            "alpha": self.alpha.tolist(),
            "sigma": self.sigma.tolist(),
        }


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ModelError("dimension", f"{name} must be a nonempty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ModelError("parse", f"{name} contains non-finite entries")
    return v


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ModelError("dimension", f"{name} must be a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ModelError("parse", f"{name} contains non-finite entries")
    return m


def make_model(mu, alpha, sigma=None, a=None) -> RiskModel:
    """Build a validated RiskModel.

    Exactly one of ``sigma`` and ``a`` must be given.  ``sigma`` is
    symmetrized after an asymmetry check and must be positive definite;
    ``a`` must be square and full rank (equivalently a @ a.T positive
    definite).  Raises ModelError on any violation.
    """
    if (sigma is None) == (a is None):
        raise ModelError("ambiguous", "exactly one of sigma and a must be provided")

    mu_v = _as_vector(mu, "mu")
    alpha_v = _as_vector(alpha, "alpha")
    d = mu_v.size
    if alpha_v.size != d:
        raise ModelError("dimension", f"mu has length {d} but alpha has length {alpha_v.size}")
    if np.any(mu_v <= 0):
        raise ModelError("positivity", "all drift components mu_i must be strictly positive")
    if np.any(alpha_v <= 0):
        raise ModelError("positivity", "all allocation components alpha_i must be strictly positive")

    if sigma is not None:
        sig = _as_matrix(sigma, "sigma")
        if sig.shape[0] != d:
            raise ModelError("dimension", f"sigma is {sig.shape[0]}x{sig.shape[0]} but mu has length {d}")
        asym = np.max(np.abs(sig - sig.T))
        if asym > 1e-12 * max(1.0, np.max(np.abs(sig))):
            raise ModelError("symmetry", f"sigma is not symmetric (max |sigma - sigma.T| = {asym:.3e})")
        sig = (sig + sig.T) / 2.0
        try:
            chol = np.linalg.cholesky(sig)
        except np.linalg.LinAlgError:
            raise ModelError("not_positive_definite", "sigma is not positive definite") from None
    else:
        fac = _as_matrix(a, "a")
        if fac.shape[0] != d:
            raise ModelError("dimension", f"a is {fac.shape[0]}x{fac.shape[0]} but mu has length {d}")
        sig = fac @ fac.T
        sig = (sig + sig.T) / 2.0
        try:
            chol = np.linalg.cholesky(sig)
        except np.linalg.LinAlgError:
            raise ModelError("not_positive_definite", "a is rank deficient: a @ a.T is not positive definite") from None

    mu_v.setflags(write=False)
    alpha_v.setflags(write=False)
    sig.setflags(write=False)
    chol.setflags(write=False)
    return RiskModel(dim=d, mu=mu_v, alpha=alpha_v, sigma=sig, a=chol)


def validate(model: RiskModel) -> list[str]:
    """Return a list of violated constraints (empty when sound)."""
    problems = []
    if model.mu.shape != (model.dim,):
        problems.append("mu shape mismatch")
    if model.alpha.shape != (model.dim,):
        problems.append("alpha shape mismatch")
    if model.sigma.shape != (model.dim, model.dim):
        problems.append("sigma shape mismatch")
        return problems
    for i in range(model.dim):
        if not model.mu[i] > 0:
            problems.append(f"mu[{i}] not > 0")
    for i in range(model.dim):
        if not model.alpha[i] > 0:
            problems.append(f"alpha[{i}] not > 0")
    if np.max(np.abs(model.sigma - model.sigma.T)) > 0:
        problems.append("sigma not symmetric")
    try:
        np.linalg.cholesky((model.sigma + model.sigma.T) / 2.0)
    except np.linalg.LinAlgError:
        problems.append("sigma not positive definite")
    if np.max(np.abs(model.a @ model.a.T - model.sigma)) > 1e-10 * max(1.0, float(np.max(np.abs(model.sigma)))):
        problems.append("a is not a factor of sigma")
    return problems


def load_model(path: str) -> RiskModel:
    """Load a model from a JSON file.

    Expected keys: "mu", "alpha", and exactly one of "sigma" / "a".
    Unknown keys are rejected so typos fail loudly.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ModelError("parse", f"cannot read model file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ModelError("parse", f"model file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ModelError("parse", "model file must contain a JSON object")
    unknown = set(raw) - {"mu", "alpha", "sigma", "a"}
    if unknown:
        raise ModelError("parse", f"unknown keys in model file: {sorted(unknown)}")
    if "mu" not in raw or "alpha" not in raw:
        raise ModelError("parse", 'model file must define "mu" and "alpha"')
    return make_model(raw["mu"], raw["alpha"], sigma=raw.get("sigma"), a=raw.get("a"))


def save_model(model: RiskModel, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
