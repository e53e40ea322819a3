"""Dense two-phase simplex solver with replayable certificates.

Every outcome carries evidence that can be checked by direct substitution:
optimal solutions come with dual values (strong duality), infeasible problems
with a Farkas vector, unbounded problems with a feasible point and a ray.
The solver is deterministic: identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

ROW_LE = "<="
ROW_EQ = "="
VAR_NONNEG = "nonneg"
VAR_FREE = "free"


class DimensionMismatchError(ValueError):
    """Shapes of the problem pieces do not line up."""


class NumericalBreakdownError(RuntimeError):
    """Pivoting could not continue reliably (tiny pivots or iteration cap)."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric thresholds shared across the package.

    pivot: entries smaller than this are treated as zero during pivoting.
    feasibility: constraint violation allowed for a point to count as feasible.
    duality_gap: allowed |primal - dual| objective gap at optimality.
    strict: margin below which a strict-inequality system is considered
        unsatisfied (alternative theorems).
    active: |g_j(x)| threshold for a constraint to count as active.
    stationary: allowed residual of multiplier stationarity conditions.
    value_tie: objective-value difference under which two points are
        considered to attain the same value on a grid.
    """

    pivot: float = 1e-9
    feasibility: float = 1e-8
    duality_gap: float = 1e-7
    strict: float = 1e-7
    active: float = 1e-7
    stationary: float = 1e-7
    value_tie: float = 1e-9
    max_pivots: int = 10_000
    degeneracy_streak: int = 10


DEFAULT_TOL = ToleranceConfig()


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    """min objective @ x  subject to rows of constraint_matrix {<=,=} rhs.

    row_kinds entries are ROW_LE or ROW_EQ; variable_bounds entries are
    VAR_NONNEG (x_j >= 0) or VAR_FREE.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    row_kinds: tuple[str, ...]
    variable_bounds: tuple[str, ...]

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        self.constraint_matrix = np.asarray(self.constraint_matrix, dtype=float)
        if self.constraint_matrix.ndim != 2:
            raise DimensionMismatchError("constraint matrix must be 2-D")
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.row_kinds = tuple(self.row_kinds)
        self.variable_bounds = tuple(self.variable_bounds)
        m, n = self.constraint_matrix.shape
        if self.objective.shape[0] != n:
            raise DimensionMismatchError(
                f"objective has {self.objective.shape[0]} entries, matrix has {n} columns"
            )
        if self.rhs.shape[0] != m:
            raise DimensionMismatchError(f"rhs has {self.rhs.shape[0]} entries, matrix has {m} rows")
        if len(self.row_kinds) != m:
            raise DimensionMismatchError("row_kinds length does not match row count")
        if len(self.variable_bounds) != n:
            raise DimensionMismatchError("variable_bounds length does not match column count")
        for kind in self.row_kinds:
            if kind not in (ROW_LE, ROW_EQ):
                raise ValueError(f"unknown row kind {kind!r}")
        for bound in self.variable_bounds:
            if bound not in (VAR_NONNEG, VAR_FREE):
                raise ValueError(f"unknown variable bound {bound!r}")
        if not (
            np.all(np.isfinite(self.objective))
            and np.all(np.isfinite(self.constraint_matrix))
            and np.all(np.isfinite(self.rhs))
        ):
            raise ValueError("LP data must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.constraint_matrix.shape


@dataclass
class LpOutcome:
    status: LpStatus
    primal_solution: np.ndarray | None = None
    objective_value: float | None = None
    dual_values: np.ndarray | None = None
    farkas_certificate: np.ndarray | None = None
    ray: np.ndarray | None = None


@dataclass
class FeasiblePoint:
    point: np.ndarray


@dataclass
class FarkasCertificate:
    y: np.ndarray


class _Standardized:
    """Equality standard form: A z = b, z >= 0, b >= 0, with bookkeeping."""

    def __init__(self, lp: LpProblem):
        m, n = lp.shape
        cols: list[np.ndarray] = []
        costs: list[float] = []
        # var_map[j] = (plus column, minus column or -1) for the original variable j
        self.var_map: list[tuple[int, int]] = []
        for j in range(n):
            col = lp.constraint_matrix[:, j]
            plus = len(costs)
            cols.append(col)
            costs.append(lp.objective[j])
            if lp.variable_bounds[j] == VAR_FREE:
                cols.append(-col)
                costs.append(-lp.objective[j])
                self.var_map.append((plus, plus + 1))
            else:
                self.var_map.append((plus, -1))
        self.slack_col: dict[int, int] = {}
        for i in range(m):
            if lp.row_kinds[i] == ROW_LE:
                e = np.zeros(m)
                e[i] = 1.0
                self.slack_col[i] = len(costs)
                cols.append(e)
                costs.append(0.0)
        self.n_structural = len(costs)
        if cols:
            matrix = np.column_stack(cols)
        else:
            matrix = np.zeros((m, 0))
        rhs = lp.rhs.astype(float).copy()
        self.sigma = np.ones(m)
        for i in range(m):
            if rhs[i] < 0.0:
                matrix[i, :] *= -1.0
                rhs[i] *= -1.0
                self.sigma[i] = -1.0
        # artificial basis: reuse slack columns where they already form identity
        basis = np.full(m, -1, dtype=int)
        art_cols: list[int] = []
        extra: list[np.ndarray] = []
        for i in range(m):
            j = self.slack_col.get(i)
            if j is not None and self.sigma[i] > 0:
                basis[i] = j
            else:
                e = np.zeros(m)
                e[i] = 1.0
                idx = self.n_structural + len(extra)
                extra.append(e)
                basis[i] = idx
                art_cols.append(idx)
        if extra:
            matrix = np.column_stack([matrix] + extra) if matrix.size else np.column_stack(extra)
        self.matrix = matrix
        self.rhs = rhs
        self.costs = np.array(costs + [0.0] * len(art_cols))
        self.basis = basis
        self.artificial = np.zeros(self.costs.shape[0], dtype=bool)
        self.artificial[art_cols] = True

    def merge(self, z: np.ndarray) -> np.ndarray:
        """Map a standard-form vector back to original variables."""
        out = np.empty(len(self.var_map))
        for j, (plus, minus) in enumerate(self.var_map):
            out[j] = z[plus] - (z[minus] if minus >= 0 else 0.0)
        return out


class _Unbounded(Exception):
    def __init__(self, col: int):
        self.col = col


def _pivot_loop(
    T: np.ndarray,
    basis: np.ndarray,
    allowed: np.ndarray,
    tol: ToleranceConfig,
    counter: list[int],
    allow_unbounded: bool,
) -> None:
    """Run simplex pivots on tableau T (last row = reduced costs | -objective).

    Dantzig selection by default; after `degeneracy_streak` pivots without
    objective movement the rule switches to Bland's until progress resumes.
    """
    m = T.shape[0] - 1
    streak = 0
    while True:
        rc = T[-1, :-1]
        candidates = np.where(allowed & (rc < -tol.pivot))[0]
        if candidates.size == 0:
            return
        if streak >= tol.degeneracy_streak:
            enter = int(candidates[0])  # Bland: lowest eligible index
        else:
            enter = int(candidates[np.argmin(rc[candidates])])
        col = T[:m, enter]
        rows = np.where(col > tol.pivot)[0]
        if rows.size == 0:
            if allow_unbounded:
                raise _Unbounded(enter)
            raise NumericalBreakdownError("no admissible pivot row")
        ratios = T[rows, -1] / col[rows]
        best = np.min(ratios)
        ties = rows[ratios <= best + 1e-15 * (1.0 + abs(best))]
        leave = int(ties[np.argmin(basis[ties])])
        before = T[-1, -1]
        piv = T[leave, enter]
        T[leave, :] /= piv
        for i in range(T.shape[0]):
            if i != leave and T[i, enter] != 0.0:
                T[i, :] -= T[i, enter] * T[leave, :]
        basis[leave] = enter
        counter[0] += 1
        if counter[0] > tol.max_pivots:
            raise NumericalBreakdownError(f"pivot cap of {tol.max_pivots} exceeded")
        if abs(T[-1, -1] - before) <= 1e-12 * (1.0 + abs(before)):
            streak += 1
        else:
            streak = 0


def _reduced_cost_row(matrix: np.ndarray, rhs: np.ndarray, costs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    row = np.concatenate([costs.astype(float), [0.0]])
    for i, b in enumerate(basis):
        cb = costs[b]
        if cb != 0.0:
            row[:-1] -= cb * matrix[i, :]
            row[-1] -= cb * rhs[i]
    return row


def solve_lp(lp: LpProblem, tol: ToleranceConfig = DEFAULT_TOL) -> LpOutcome:
    """Solve the LP, returning status plus certificates (duals/Farkas/ray)."""
    std = _Standardized(lp)
    m = std.matrix.shape[0]
    N = std.costs.shape[0]
    counter = [0]

    T = np.zeros((m + 1, N + 1))
    T[:m, :N] = std.matrix
    T[:m, -1] = std.rhs
    phase1_costs = np.where(std.artificial, 1.0, 0.0)
    T[-1, :] = _reduced_cost_row(std.matrix, std.rhs, phase1_costs, std.basis)
    allowed = np.ones(N, dtype=bool)
    _pivot_loop(T, std.basis, allowed, tol, counter, allow_unbounded=False)
    phase1_value = -T[-1, -1]

    full = np.column_stack([std.matrix, std.rhs])  # pristine copy for final algebra
    if phase1_value > tol.feasibility:
        basis_matrix = std.matrix[:, std.basis]
        try:
            y1 = np.linalg.solve(basis_matrix.T, phase1_costs[std.basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdownError("singular phase-1 basis") from exc
        farkas = -std.sigma * y1
        return LpOutcome(status=LpStatus.INFEASIBLE, farkas_certificate=farkas)

    # Drive artificials out of the basis where a structural pivot exists; rows
    # where none exists are redundant and keep a zero-valued artificial.
    for i in range(m):
        if std.artificial[std.basis[i]]:
            structural = np.where(~std.artificial[:N] & (np.abs(T[i, :N]) > tol.pivot))[0]
            if structural.size:
                enter = int(structural[0])
                piv = T[i, enter]
                T[i, :] /= piv
                for r in range(T.shape[0]):
                    if r != i and T[r, enter] != 0.0:
                        T[r, :] -= T[r, enter] * T[i, :]
                std.basis[i] = enter
                counter[0] += 1

    T[-1, :] = _reduced_cost_row(T[:m, :N], T[:m, -1], std.costs, std.basis)
    allowed = ~std.artificial
    try:
        _pivot_loop(T, std.basis, allowed, tol, counter, allow_unbounded=True)
    except _Unbounded as ub:
        z = np.zeros(N)
        z[std.basis] = T[:m, -1]
        direction = np.zeros(N)
        direction[ub.col] = 1.0
        direction[std.basis] = -T[:m, ub.col]
        direction[std.artificial] = 0.0
        point = std.merge(z)
        ray = std.merge(direction)
        scale = np.max(np.abs(ray))
        if scale > 0:
            ray = ray / scale
        return LpOutcome(status=LpStatus.UNBOUNDED, primal_solution=point, ray=ray)

    basis_matrix = std.matrix[:, std.basis]
    try:
        if m:
            x_basis = np.linalg.solve(basis_matrix, std.rhs)
            y = np.linalg.solve(basis_matrix.T, std.costs[std.basis])
        else:
            x_basis = np.zeros(0)
            y = np.zeros(0)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdownError("singular optimal basis") from exc
    z = np.zeros(N)
    z[std.basis] = x_basis
    x = std.merge(z)
    duals = std.sigma * y
    value = float(lp.objective @ x)
    return LpOutcome(
        status=LpStatus.OPTIMAL,
        primal_solution=x,
        objective_value=value,
        dual_values=duals,
    )


def check_feasibility(
    matrix: np.ndarray,
    rhs: np.ndarray,
    row_kinds: tuple[str, ...],
    variable_bounds: tuple[str, ...],
    tol: ToleranceConfig = DEFAULT_TOL,
) -> FeasiblePoint | FarkasCertificate:
    """Decide feasibility of a linear system; Farkas vector when infeasible."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError("system matrix must be 2-D")
    lp = LpProblem(
        objective=np.zeros(matrix.shape[1]),
        constraint_matrix=matrix,
        rhs=rhs,
        row_kinds=row_kinds,
        variable_bounds=variable_bounds,
    )
    outcome = solve_lp(lp, tol)
    if outcome.status is LpStatus.OPTIMAL:
        return FeasiblePoint(point=outcome.primal_solution)
    if outcome.status is LpStatus.INFEASIBLE:
        return FarkasCertificate(y=outcome.farkas_certificate)
    raise NumericalBreakdownError("feasibility probe reported unbounded")  # c = 0: unreachable


def validate_outcome(lp: LpProblem, outcome: LpOutcome, tol: ToleranceConfig = DEFAULT_TOL) -> list[str]:
    """Replay an LpOutcome's evidence by substitution; returns found defects."""
    problems: list[str] = []
    A = lp.constraint_matrix
    b = lp.rhs
    le_rows = np.array([k == ROW_LE for k in lp.row_kinds], dtype=bool)
    nonneg = np.array([v == VAR_NONNEG for v in lp.variable_bounds], dtype=bool)
    check = tol.duality_gap

    def _feasible(x: np.ndarray, label: str) -> None:
        resid = A @ x - b
        if le_rows.any() and np.max(resid[le_rows], initial=-np.inf) > check:
            problems.append(f"{label}: <= row violated by {np.max(resid[le_rows]):.3e}")
        eq = ~le_rows
        if eq.any() and np.max(np.abs(resid[eq]), initial=0.0) > check:
            problems.append(f"{label}: = row violated by {np.max(np.abs(resid[eq])):.3e}")
        if nonneg.any() and np.min(x[nonneg], initial=np.inf) < -check:
            problems.append(f"{label}: sign bound violated by {np.min(x[nonneg]):.3e}")

    if outcome.status is LpStatus.OPTIMAL:
        x = outcome.primal_solution
        y = outcome.dual_values
        if x is None or y is None or outcome.objective_value is None:
            return [f"optimal outcome missing fields"]
        _feasible(x, "primal")
        gap = abs(float(lp.objective @ x) - float(y @ b))
        if gap > check:
            problems.append(f"duality gap {gap:.3e}")
        if le_rows.any() and np.max(y[le_rows], initial=-np.inf) > check:
            problems.append("dual sign on <= row violated")
        reduced = lp.objective - A.T @ y
        if nonneg.any() and np.min(reduced[nonneg], initial=np.inf) < -check:
            problems.append(f"dual feasibility (nonneg var) violated by {np.min(reduced[nonneg]):.3e}")
        free = ~nonneg
        if free.any() and np.max(np.abs(reduced[free]), initial=0.0) > check:
            problems.append(f"dual feasibility (free var) violated by {np.max(np.abs(reduced[free])):.3e}")
    elif outcome.status is LpStatus.INFEASIBLE:
        y = outcome.farkas_certificate
        if y is None:
            return ["infeasible outcome missing certificate"]
        if le_rows.any() and np.min(y[le_rows], initial=np.inf) < -check:
            problems.append("farkas sign on <= row violated")
        yA = y @ A
        if nonneg.any() and np.min(yA[nonneg], initial=np.inf) < -check:
            problems.append("farkas combination not sign-feasible on nonneg var")
        free = ~nonneg
        if free.any() and np.max(np.abs(yA[free]), initial=0.0) > check:
            problems.append("farkas combination nonzero on free var")
        if float(y @ b) >= -tol.feasibility:
            problems.append(f"farkas value {float(y @ b):.3e} not negative")
    elif outcome.status is LpStatus.UNBOUNDED:
        x = outcome.primal_solution
        r = outcome.ray
        if x is None or r is None:
            return ["unbounded outcome missing point or ray"]
        _feasible(x, "unbounded point")
        Ar = A @ r
        if le_rows.any() and np.max(Ar[le_rows], initial=-np.inf) > check:
            problems.append("ray violates <= row direction")
        eq = ~le_rows
        if eq.any() and np.max(np.abs(Ar[eq]), initial=0.0) > check:
            problems.append("ray violates = row direction")
        if nonneg.any() and np.min(r[nonneg], initial=np.inf) < -check:
            problems.append("ray leaves a nonneg bound")
        if float(lp.objective @ r) >= -tol.pivot:
            problems.append(f"ray descent rate {float(lp.objective @ r):.3e} not negative")
    return problems
