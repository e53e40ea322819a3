"""Weighted-sum scalarization with grid-certified global optimality.

The weighting problem collapses the objective vector to a single score
``w·f(x)`` for a weight vector in the unit simplex, and is solved here by
exhaustive evaluation over the box grid followed by a projected-gradient
polish of every argmin node. "Certified" always means *at the stated grid
resolution*: reports carry the grid step, and no claim is made about the
continuum between nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .expressions import eval_value
from .problems import InfeasiblePointError, Problem, evaluate, grid_points
from .simplex import DEFAULT_TOL, DimensionMismatchError, ToleranceConfig

_ARMIJO = 1e-4
_POLISH_MAX_ITERS = 500
_POLISH_GRAD_TOL = 1e-8
_CLUSTER_RADIUS = 1e-6


class EmptyFeasibleSetError(ValueError):
    """No grid node satisfies the constraints at the given resolution."""


@dataclass(frozen=True)
class WeightVector:
    """A point of the unit simplex: entries ≧ 0 summing to one."""

    lam: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        arr = np.array(self.lam)
        if arr.size == 0:
            raise ValueError("weight vector cannot be empty")
        if np.min(arr) < -1e-12:
            raise ValueError(f"negative weight {np.min(arr)!r}")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {arr.sum()!r}, expected 1")

    @classmethod
    def normalized(cls, values) -> "WeightVector":
        arr = np.asarray(values, dtype=float)
        total = arr.sum()
        if total <= 0 or np.min(arr) < 0:
            raise ValueError("weights must be nonnegative with positive sum")
        return cls(tuple(arr / total))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.lam)


def simplex_weights(n: int, step: float = 0.1) -> tuple[WeightVector, ...]:
    """All weight vectors on the simplex lattice with the given spacing."""
    if n < 1:
        raise ValueError("need at least one objective")
    levels = int(round(1.0 / step))
    if abs(levels * step - 1.0) > 1e-9 or levels < 1:
        raise ValueError("step must divide 1 evenly")
    out = []
    for slots in combinations_with_replacement(range(n), levels):
        counts = np.bincount(slots, minlength=n)
        out.append(WeightVector(tuple(counts / levels)))
    return tuple(out)


@dataclass(frozen=True)
class _GridEval:
    nodes: np.ndarray       # (N, s)
    values: np.ndarray      # (N, n)
    feasible: np.ndarray    # (N,) bool


@lru_cache(maxsize=64)
def _grid_eval(problem: Problem, grid_step: float, tol: ToleranceConfig) -> _GridEval:
    nodes = grid_points(problem, grid_step)
    count = nodes.shape[0]
    values = np.zeros((count, problem.n_objectives))
    feasible = np.ones(count, dtype=bool)
    obj_asts = problem.objective_asts
    con_asts = problem.constraint_asts
    for idx in range(count):
        x = nodes[idx]
        for j, ast in enumerate(con_asts):
            if eval_value(ast, x) > tol.feasibility:
                feasible[idx] = False
                break
        for i, ast in enumerate(obj_asts):
            values[idx, i] = eval_value(ast, x)
    return _GridEval(nodes=nodes, values=values, feasible=feasible)


def _feasible_grid(problem: Problem, grid_step: float, tol: ToleranceConfig):
    ge = _grid_eval(problem, float(grid_step), tol)
    if not np.any(ge.feasible):
        raise EmptyFeasibleSetError(
            f"no feasible node on the step-{grid_step:g} grid of {problem.name!r}"
        )
    return ge.nodes[ge.feasible], ge.values[ge.feasible]


def _weighted_value(problem: Problem, lam: np.ndarray, x: np.ndarray) -> float:
    values = [eval_value(ast, x) for ast in problem.objective_asts]
    return float(lam @ np.array(values))


def _polish(
    problem: Problem, lam: np.ndarray, start: np.ndarray, tol: ToleranceConfig
) -> np.ndarray:
    """Projected gradient descent on w·f from a feasible grid node.

    Trial points are clipped to the box, and a trial may never increase the
    worst constraint value beyond the current iterate's (floored at zero),
    so the polish cannot drift into the feasibility-tolerance band; the
    sharpening is best-effort and never claims more than the grid does.
    """
    lo, hi = problem.lower, problem.upper
    x = np.clip(start.astype(float), lo, hi)
    ep = evaluate(problem, x, tol)
    value = float(lam @ ep.objective_values)

    def worst(point_ep) -> float:
        if point_ep.constraint_values.size == 0:
            return 0.0
        return max(0.0, float(point_ep.constraint_values.max()))

    allowed = worst(ep)
    for _ in range(_POLISH_MAX_ITERS):
        grad = lam @ ep.objective_jacobian
        if np.linalg.norm(x - np.clip(x - grad, lo, hi)) <= _POLISH_GRAD_TOL:
            break
        step, accepted = 1.0, False
        while step > 1e-16:
            trial = np.clip(x - step * grad, lo, hi)
            trial_ep = evaluate(problem, trial, tol)
            if worst(trial_ep) <= allowed:
                trial_value = float(lam @ trial_ep.objective_values)
                if trial_value <= value + _ARMIJO * float(grad @ (trial - x)):
                    x, ep, value = trial, trial_ep, trial_value
                    allowed = worst(ep)
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break
    return x


def _dedupe(points: list[np.ndarray], radius: float) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for pt in points:
        if all(np.linalg.norm(pt - other) > radius for other in kept):
            kept.append(pt)
    return kept


@dataclass
class WeightingSolution:
    minimizers: list[np.ndarray]       # polished, deduplicated, grid order
    value: float
    certified: bool                    # always True: certification is grid-scoped
    grid_step: float
    grid_minimizers: np.ndarray        # argmin nodes before polishing, (k, s)


def solve_weighting(
    problem: Problem,
    w: WeightVector,
    grid_step: float,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> WeightingSolution:
    """Minimize w·f over the feasible grid, then polish each argmin node."""
    lam = w.array
    if lam.size != problem.n_objectives:
        raise DimensionMismatchError(
            f"weight has {lam.size} entries for {problem.n_objectives} objectives"
        )
    nodes, values = _feasible_grid(problem, grid_step, tol)
    weighted = values @ lam
    best = float(weighted.min())
    tie = weighted <= best + tol.value_tie
    grid_minimizers = nodes[tie]
    polished = [_polish(problem, lam, node, tol) for node in grid_minimizers]
    minimizers = _dedupe(polished, _CLUSTER_RADIUS)
    value = min(_weighted_value(problem, lam, x) for x in minimizers)
    return WeightingSolution(
        minimizers=minimizers,
        value=value,
        certified=True,
        grid_step=float(grid_step),
        grid_minimizers=grid_minimizers,
    )


class Globality(Enum):
    UNIQUE_GLOBAL = "unique_global"
    GLOBAL = "global"
    NOT_GLOBAL = "not_global"


@dataclass
class GlobalityVerdict:
    globality: Globality
    value: float                       # w·f at the candidate
    witness: np.ndarray | None         # better node (NotGlobal) or distant tying node (Global)
    witness_value: float | None

    @property
    def is_global(self) -> bool:
        return self.globality is not Globality.NOT_GLOBAL


def is_global_weighting_solution(
    problem: Problem,
    w: WeightVector,
    x,
    grid_step: float,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> GlobalityVerdict:
    """Grade a feasible candidate against every feasible grid node.

    NotGlobal carries the best strictly-better node; Global (without
    uniqueness) carries a value-tying node farther than the cluster radius.
    """
    lam = w.array
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ep = evaluate(problem, x, tol)
    if not ep.feasible:
        raise InfeasiblePointError(
            f"candidate violates constraints by {ep.constraint_values.max():.3e}"
        )
    candidate_value = float(lam @ ep.objective_values)
    nodes, values = _feasible_grid(problem, grid_step, tol)
    weighted = values @ lam
    best_idx = int(np.argmin(weighted))
    if weighted[best_idx] < candidate_value - tol.strict:
        return GlobalityVerdict(
            globality=Globality.NOT_GLOBAL,
            value=candidate_value,
            witness=nodes[best_idx],
            witness_value=float(weighted[best_idx]),
        )
    attaining = weighted <= candidate_value + tol.strict
    distances = np.linalg.norm(nodes[attaining] - x, axis=1)
    far = distances > _CLUSTER_RADIUS
    if np.any(far):
        where = np.flatnonzero(attaining)[far][0]
        return GlobalityVerdict(
            globality=Globality.GLOBAL,
            value=candidate_value,
            witness=nodes[where],
            witness_value=float(weighted[where]),
        )
    return GlobalityVerdict(
        globality=Globality.UNIQUE_GLOBAL,
        value=candidate_value,
        witness=None,
        witness_value=None,
    )


@lru_cache(maxsize=64)
def _weakly_efficient(
    problem: Problem, grid_step: float, tol: ToleranceConfig
) -> np.ndarray:
    nodes, values = _feasible_grid(problem, grid_step, tol)
    count = nodes.shape[0]
    keep = np.ones(count, dtype=bool)
    chunk = max(1, 2_000_000 // max(1, count))
    for lo_idx in range(0, count, chunk):
        block = values[lo_idx : lo_idx + chunk]           # (C, n)
        # dominated[c] = some node strictly below block[c] in every objective
        dominated = np.any(
            np.all(values[:, None, :] < block[None, :, :], axis=2), axis=0
        )
        keep[lo_idx : lo_idx + chunk] = ~dominated
    return nodes[keep]


def weakly_efficient_scan(
    problem: Problem, grid_step: float, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """Feasible grid nodes not strictly dominated by any feasible grid node."""
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    return _weakly_efficient(problem, float(grid_step), tol)
