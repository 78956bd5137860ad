"""Quadratic program behind the logarithmic asymptotics.

For a positive definite matrix M and a bound vector b (not entirely
nonpositive), solve

    P_M(b) = min { x' M^{-1} x : x >= b componentwise }.

The minimizer x~ is unique and is characterized by a unique nonempty
index set I with

    M_II^{-1} b_I > 0        (componentwise, the active multipliers)
    x~_I = b_I
    x~_{I^c} = M_{I^c I} M_II^{-1} b_I >= b_{I^c}

and then P_M(b) = b_I' M_II^{-1} b_I.  Coordinates of I are called
essential, coordinates j outside I with x~_j = b_j weakly essential,
the rest unessential.  All index sets are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class QpSolution:
    solution: np.ndarray
    essential: tuple[int, ...]
    weakly_essential: tuple[int, ...]
    unessential: tuple[int, ...]
    value: float
    degenerate: bool


def _split_complement(solution: np.ndarray, essential: tuple[int, ...], b: np.ndarray, tol: float):
    weak = []
    slack = []
    for j in range(b.size):
        if j in essential:
            continue
        if abs(solution[j] - b[j]) <= tol * (1.0 + abs(b[j])):
            weak.append(j)
        else:
            slack.append(j)
    return tuple(weak), tuple(slack)


def classify_indices(sol: "QpSolution", b, tol: float = 1e-9):
    """Split the coordinates of a solution into (I, K, J).

    I is the essential set of the solution; a coordinate j outside I is
    weakly essential (K) when the minimizer sits on its constraint,
    x~_j = b_j, within relative tolerance tol, and unessential (J)
    otherwise.
    """
    bv = np.asarray(b, dtype=float)
    weak, slack = _split_complement(sol.solution, sol.essential, bv, tol)
    return sol.essential, weak, slack


def solve_pm(m_matrix, b) -> QpSolution:
    """Solve P_M(b) by enumerating candidate index sets.

    Subsets are visited by increasing cardinality, so when ties make
    several sets satisfy the optimality test (the multipliers of the
    extra coordinates are then zero), the strict essential set is the
    one reported.  Any such multiplicity is flagged as degenerate.
    """
    m = np.asarray(m_matrix, dtype=float)
    bv = np.asarray(b, dtype=float)
    d = bv.size
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} does not match b length {d}")
    if np.all(bv <= 0):
        raise ValueError("b must have at least one positive component")

    scale = max(1.0, float(np.max(np.abs(bv))))
    w_tol = -1e-12 * scale
    passes = []
    for size in range(1, d + 1):
        for subset in combinations(range(d), size):
            idx = list(subset)
            m_ii = m[np.ix_(idx, idx)]
            try:
                w = np.linalg.solve(m_ii, bv[idx])
            except np.linalg.LinAlgError:
                continue
            if np.min(w) <= w_tol:
                continue
            comp = [j for j in range(d) if j not in subset]
            x = np.empty(d)
            x[idx] = bv[idx]
            if comp:
                x_comp = m[np.ix_(comp, idx)] @ w
                if np.any(x_comp < bv[comp] - 1e-12 * (1.0 + np.abs(bv[comp]))):
                    continue
                x[comp] = x_comp
            passes.append((subset, w, x))
        if passes:
            break

    if not passes:
        raise ValueError("no index set satisfies the optimality conditions")

    degenerate = len(passes) > 1
    subset, w, x = passes[0]
    value = float(bv[list(subset)] @ w)
    weak, slack = _split_complement(x, subset, bv, 1e-9)
    if weak:
        degenerate = True
    x.setflags(write=False)
    return QpSolution(
        solution=x,
        essential=subset,
        weakly_essential=weak,
        unessential=slack,
        value=value,
        degenerate=degenerate,
    )
