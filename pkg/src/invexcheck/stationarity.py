"""Stationary-point detection via LP multiplier recovery.

A point is *vector critical* when some nonzero nonnegative weight vector
lies in the left null space of the objective jacobian; it is *KT stationary*
when the weighted objective gradients can be balanced by nonnegative
multipliers on the active constraint gradients. Both conditions are linear
feasibility questions, solved here with the in-house simplex so every
returned multiplier set carries an exactly replayable residual.

Recovered multipliers are canonicalized to make scans reproducible:
weights are normalized to sum to one, the constraint multipliers minimize
their total first, and among the remaining solutions the largest weight
component is minimized (which yields uniform weights in degenerate cases
such as a vanishing jacobian).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .problems import (
    EvaluatedPoint,
    InfeasiblePointError,
    Problem,
    evaluate,
    grid_points,
    without_constraints,
)
from .simplex import (
    DEFAULT_TOL,
    ROW_EQ,
    ROW_LE,
    VAR_NONNEG,
    LpProblem,
    LpStatus,
    NumericalBreakdownError,
    ToleranceConfig,
    solve_lp,
)


@dataclass
class CriticalMultipliers:
    """Weights λ with λ ≧ 0, Σλ = 1, and λ·Jf(x) ≈ 0."""

    lam: np.ndarray
    residual: float


@dataclass
class KtMultipliers:
    """Weights λ plus active-constraint multipliers μ balancing the gradients."""

    lam: np.ndarray
    mu: np.ndarray                  # aligned with active_indices
    active_indices: tuple[int, ...]
    residual: float


class StationaryKind(Enum):
    VECTOR = "vector"
    KT = "kt"


@dataclass
class StationaryPoint:
    x: np.ndarray
    kind: StationaryKind
    multipliers: CriticalMultipliers | KtMultipliers


def _min_max_weight(
    eq_matrix: np.ndarray,
    eq_rhs: np.ndarray,
    n: int,
    extra_le: tuple[np.ndarray, float] | None,
    tol: ToleranceConfig,
) -> np.ndarray | None:
    """Minimize max λ_i over {eq_matrix·v = eq_rhs, v ≧ 0}, v = (λ, μ...).

    Appends a fresh variable t with rows λ_i − t ≤ 0 and objective t; the
    optional extra ≤-row pins a previous stage's optimum. Returns the full
    variable vector v (without t), or None when infeasible.
    """
    rows_eq, cols = eq_matrix.shape
    extra = 1 if extra_le is not None else 0
    total_rows = rows_eq + extra + n
    matrix = np.zeros((total_rows, cols + 1))
    rhs = np.zeros(total_rows)
    matrix[:rows_eq, :cols] = eq_matrix
    rhs[:rows_eq] = eq_rhs
    kinds = [ROW_EQ] * rows_eq
    at = rows_eq
    if extra_le is not None:
        coeffs, bound = extra_le
        matrix[at, :cols] = coeffs
        rhs[at] = bound
        kinds.append(ROW_LE)
        at += 1
    for i in range(n):
        matrix[at + i, i] = 1.0
        matrix[at + i, cols] = -1.0
        kinds.append(ROW_LE)
    objective = np.zeros(cols + 1)
    objective[cols] = 1.0
    lp = LpProblem(
        objective=objective,
        constraint_matrix=matrix,
        rhs=rhs,
        row_kinds=tuple(kinds),
        variable_bounds=(VAR_NONNEG,) * (cols + 1),
    )
    outcome = solve_lp(lp, tol)
    if outcome.status is LpStatus.INFEASIBLE:
        return None
    if outcome.status is not LpStatus.OPTIMAL:
        raise NumericalBreakdownError(
            f"multiplier recovery LP ended {outcome.status.value}"
        )
    return outcome.primal_solution[:cols]


def critical_multipliers(
    ep: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> CriticalMultipliers | None:
    """Recover weights proving ``ep`` vector critical, or None."""
    n, s = ep.objective_jacobian.shape
    eq = np.zeros((s + 1, n))
    eq[:s] = ep.objective_jacobian.T
    eq[s] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    v = _min_max_weight(eq, rhs, n, None, tol)
    if v is None:
        return None
    lam = np.clip(v[:n], 0.0, None)
    lam /= lam.sum()
    residual = float(np.max(np.abs(lam @ ep.objective_jacobian)))
    if residual > tol.stationary:
        raise NumericalBreakdownError(
            f"critical multiplier residual {residual:.3e} exceeds tolerance"
        )
    return CriticalMultipliers(lam=lam, residual=residual)


def kt_multipliers(
    ep: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> KtMultipliers | None:
    """Recover (λ, μ) proving ``ep`` KT stationary, or None.

    μ lives only on the active set (zero elsewhere by construction, so
    complementary slackness is automatic). Requires a feasible point.
    """
    if not ep.feasible:
        raise InfeasiblePointError(
            f"KT multipliers need a feasible point; max g = {ep.constraint_values.max():.3e}"
        )
    n, s = ep.objective_jacobian.shape
    jac_active = ep.active_jacobian
    r = jac_active.shape[0]
    # stage 1: minimize total constraint multiplier subject to stationarity
    eq = np.zeros((s + 1, n + r))
    eq[:s, :n] = ep.objective_jacobian.T
    eq[:s, n:] = jac_active.T
    eq[s, :n] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    objective = np.concatenate([np.zeros(n), np.ones(r)])
    lp = LpProblem(
        objective=objective,
        constraint_matrix=eq,
        rhs=rhs,
        row_kinds=(ROW_EQ,) * (s + 1),
        variable_bounds=(VAR_NONNEG,) * (n + r),
    )
    outcome = solve_lp(lp, tol)
    if outcome.status is LpStatus.INFEASIBLE:
        return None
    if outcome.status is not LpStatus.OPTIMAL:
        raise NumericalBreakdownError(
            f"KT stage-1 LP ended {outcome.status.value}"
        )
    mu_total = float(outcome.objective_value)
    # stage 2: among minimal-Σμ solutions, minimize the largest weight
    v = _min_max_weight(eq, rhs, n, (objective, mu_total), tol)
    if v is None:  # stage-1 optimum satisfies the pin, so this cannot happen
        raise NumericalBreakdownError("KT stage-2 LP infeasible after stage 1")
    lam = np.clip(v[:n], 0.0, None)
    mu = np.clip(v[n:], 0.0, None)
    lam /= lam.sum()
    residual = float(
        np.max(np.abs(lam @ ep.objective_jacobian + mu @ jac_active))
    )
    if residual > tol.stationary:
        raise NumericalBreakdownError(
            f"KT multiplier residual {residual:.3e} exceeds tolerance"
        )
    return KtMultipliers(
        lam=lam, mu=mu, active_indices=ep.active_indices, residual=residual
    )


@lru_cache(maxsize=64)
def _scan(
    problem: Problem,
    grid_step: float,
    kind: StationaryKind,
    tol: ToleranceConfig,
) -> tuple[StationaryPoint, ...]:
    found: list[StationaryPoint] = []
    for node in grid_points(problem, grid_step):
        ep = evaluate(problem, node, tol)
        if kind is StationaryKind.KT:
            if not ep.feasible:
                continue
            mult = kt_multipliers(ep, tol)
        else:
            mult = critical_multipliers(ep, tol)
        if mult is not None:
            found.append(StationaryPoint(x=ep.x, kind=kind, multipliers=mult))
    return tuple(found)


def scan_critical_points(
    problem: Problem,
    grid_step: float,
    kind: StationaryKind,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[StationaryPoint, ...]:
    """Every grid node (feasible, for the KT kind) with recoverable multipliers.

    The vector-critical scan ignores constraints by definition, so the
    problem is normalized to its unconstrained form first; this also lets
    callers with and without constraints share one cache entry.
    """
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    if kind is StationaryKind.VECTOR:
        problem = without_constraints(problem)
    return _scan(problem, float(grid_step), kind, tol)
