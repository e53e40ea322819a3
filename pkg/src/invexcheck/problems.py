"""Multiobjective problem model: boxes, evaluation, vector orders, fixtures.

A problem minimizes a vector of objectives over a closed box, subject to
inequality constraints ``g_j(x) <= 0``. Everything downstream (stationarity
scans, weighting runs, invexity certifiers) consumes the `EvaluatedPoint`
bundle produced here, so this module is the single place where expressions
are parsed and differentiated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .expressions import Expr, eval_with_gradient, parse
from .simplex import DEFAULT_TOL, DimensionMismatchError, ToleranceConfig

#: Half-width of the tolerance band around box edges when checking membership,
#: and the inset used when drawing random samples from the box interior.
BOX_EDGE_SLACK = 1e-9


class OutOfBoxError(ValueError):
    """A point lies outside the problem's box (beyond the edge slack)."""


class InfeasiblePointError(ValueError):
    """An operation that requires ``g(x) <= 0`` received an infeasible point."""


class UnknownFixtureError(KeyError):
    """Requested fixture name is not registered."""


@dataclass(frozen=True)
class Problem:
    """Immutable problem description; expression fields hold source text."""

    name: str
    variables: tuple[str, ...]
    objectives: tuple[str, ...]
    constraints: tuple[str, ...]
    box: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(
            self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box)
        )
        if not self.variables:
            raise ValueError("problem needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be distinct")
        if not self.objectives:
            raise ValueError("problem needs at least one objective")
        if len(self.box) != len(self.variables):
            raise DimensionMismatchError(
                f"box has {len(self.box)} intervals for {len(self.variables)} variables"
            )
        for lo, hi in self.box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"box interval [{lo}, {hi}] is not a proper interval")
        # parse eagerly so construction fails fast on bad expressions
        self.objective_asts
        self.constraint_asts

    @cached_property
    def objective_asts(self) -> tuple[Expr, ...]:
        return tuple(parse(text, self.variables) for text in self.objectives)

    @cached_property
    def constraint_asts(self) -> tuple[Expr, ...]:
        return tuple(parse(text, self.variables) for text in self.constraints)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.box])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.box])


@dataclass
class EvaluatedPoint:
    """Values, gradients, and the active set of one problem at one point."""

    problem: Problem
    x: np.ndarray
    objective_values: np.ndarray      # shape (n,)
    objective_jacobian: np.ndarray    # shape (n, s), row i = gradient of objective i
    constraint_values: np.ndarray     # shape (m,)
    constraint_jacobian: np.ndarray   # shape (m, s)
    active_indices: tuple[int, ...]   # j with |g_j(x)| <= tol.active
    feasible: bool                    # all g_j(x) <= tol.feasibility

    @property
    def active_jacobian(self) -> np.ndarray:
        """Rows of the constraint jacobian for the active constraints."""
        if not self.active_indices:
            return np.zeros((0, self.x.size))
        return self.constraint_jacobian[list(self.active_indices)]


def evaluate(
    problem: Problem, x, tol: ToleranceConfig = DEFAULT_TOL
) -> EvaluatedPoint:
    """Evaluate all objectives and constraints with gradients at ``x``.

    Raises OutOfBoxError when ``x`` leaves the box by more than the edge
    slack, and propagates DomainError from expression evaluation.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (problem.dimension,):
        raise DimensionMismatchError(
            f"point has shape {x.shape}, expected ({problem.dimension},)"
        )
    for i, (lo, hi) in enumerate(problem.box):
        if x[i] < lo - BOX_EDGE_SLACK or x[i] > hi + BOX_EDGE_SLACK:
            raise OutOfBoxError(
                f"{problem.variables[i]} = {x[i]:.6g} outside [{lo:g}, {hi:g}]"
            )

    f = np.zeros(problem.n_objectives)
    jac_f = np.zeros((problem.n_objectives, problem.dimension))
    for i, ast in enumerate(problem.objective_asts):
        f[i], jac_f[i] = eval_with_gradient(ast, x)

    m = problem.n_constraints
    g = np.zeros(m)
    jac_g = np.zeros((m, problem.dimension))
    for j, ast in enumerate(problem.constraint_asts):
        g[j], jac_g[j] = eval_with_gradient(ast, x)

    active = tuple(j for j in range(m) if abs(g[j]) <= tol.active)
    feasible = bool(np.all(g <= tol.feasibility)) if m else True
    return EvaluatedPoint(
        problem=problem,
        x=x,
        objective_values=f,
        objective_jacobian=jac_f,
        constraint_values=g,
        constraint_jacobian=jac_g,
        active_indices=active,
        feasible=feasible,
    )


class VectorOrder(Enum):
    """Strongest classification of ``a`` against ``b`` under componentwise order."""

    STRICTLY_LESS = "strictly_less"    # a_i <  b_i for every i
    LESS_NOT_EQUAL = "less_not_equal"  # a_i <= b_i for every i and a != b
    LEQ_ALL = "leq_all"                # a_i <= b_i for every i (equality case)
    INCOMPARABLE = "incomparable"


def strictly_less(a, b) -> bool:
    a, b = _paired(a, b)
    return bool(np.all(a < b))


def leq_not_equal(a, b) -> bool:
    a, b = _paired(a, b)
    return bool(np.all(a <= b) and np.any(a < b))


def leq_all(a, b) -> bool:
    a, b = _paired(a, b)
    return bool(np.all(a <= b))


def compare(a, b) -> VectorOrder:
    """Classify a pair of equal-length vectors into its strongest order class."""
    a, b = _paired(a, b)
    if not np.all(a <= b):
        return VectorOrder.INCOMPARABLE
    if np.all(a < b):
        return VectorOrder.STRICTLY_LESS
    if np.any(a < b):
        return VectorOrder.LESS_NOT_EQUAL
    return VectorOrder.LEQ_ALL


def _paired(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot compare shapes {a.shape} and {b.shape}")
    return a, b


def axis_nodes(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid nodes along one axis; ``hi`` is appended if not hit."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    if abs(lo + (count - 1) * step - hi) <= 1e-9 * max(1.0, abs(hi)):
        return np.linspace(lo, hi, count)
    nodes = lo + step * np.arange(count)
    return np.append(nodes, hi)


def grid_points(problem: Problem, step: float) -> np.ndarray:
    """All box grid nodes as an array of shape (count, dimension).

    Nodes vary fastest in the last coordinate, so output order is
    lexicographic and deterministic.
    """
    axes = [axis_nodes(lo, hi, step) for lo, hi in problem.box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def random_points(problem: Problem, count: int, seed: int) -> np.ndarray:
    """Uniform samples from the box interior (inset by the edge slack)."""
    if count <= 0:
        raise ValueError("sample count must be positive")
    rng = np.random.default_rng(seed)
    lo = problem.lower + BOX_EDGE_SLACK
    hi = problem.upper - BOX_EDGE_SLACK
    return rng.uniform(lo, hi, size=(count, problem.dimension))


def _fixture_table() -> dict[str, Problem]:
    ramp_sq = "piecewise(x > 1: (x - 1)^2; x < -1: (x + 1)^2; 0)"
    ramp_qt = "piecewise(x > 1: (x - 1)^4; x < -1: (x + 1)^4; 0)"
    table = [
        Problem(
            name="paper-example-2.1",
            variables=("x",),
            objectives=(ramp_sq, ramp_qt),
            constraints=(),
            box=((-3.0, 3.0),),
        ),
        Problem(
            name="cube",
            variables=("x",),
            objectives=("x^3",),
            constraints=(),
            box=((-2.0, 2.0),),
        ),
        Problem(
            name="convex-pair",
            variables=("x",),
            objectives=("x^2", "(x - 1)^2"),
            constraints=(),
            box=((-2.0, 3.0),),
        ),
        Problem(
            name="kt-linear-quad",
            variables=("x",),
            objectives=("x", "x^2"),
            constraints=("-x",),
            box=((-2.0, 2.0),),
        ),
        Problem(
            name="two-var-convex",
            variables=("x1", "x2"),
            objectives=("x1^2 + x2^2", "(x1 - 1)^2 + x2^2"),
            constraints=("x1 + x2 - 2",),
            box=((-2.0, 2.0), (-2.0, 2.0)),
        ),
    ]
    return {p.name: p for p in table}


_FIXTURES = _fixture_table()


def fixture(name: str) -> Problem:
    """Look up a built-in problem by name; see `fixture_names`."""
    try:
        return _FIXTURES[name]
    except KeyError:
        raise UnknownFixtureError(
            f"unknown fixture {name!r}; known: {', '.join(fixture_names())}"
        ) from None


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_FIXTURES))


def without_constraints(problem: Problem) -> Problem:
    """The same problem with its constraints dropped (no-op when m = 0)."""
    if problem.constraints:
        return replace(problem, constraints=())
    return problem


def problem_from_dict(data: dict) -> Problem:
    """Build a Problem from the JSON problem-file object."""
    if not isinstance(data, dict):
        raise ValueError("problem file must contain a JSON object")
    required = ("name", "variables", "objectives", "box")
    for key in required:
        if key not in data:
            raise ValueError(f"problem file missing required key {key!r}")
    box = data["box"]
    if not isinstance(box, list) or any(
        not isinstance(iv, list) or len(iv) != 2 for iv in box
    ):
        raise ValueError('"box" must be a list of [lo, hi] pairs')
    return Problem(
        name=str(data["name"]),
        variables=tuple(str(v) for v in data["variables"]),
        objectives=tuple(str(e) for e in data["objectives"]),
        constraints=tuple(str(e) for e in data.get("constraints", [])),
        box=tuple((float(lo), float(hi)) for lo, hi in box),
    )


def load_problem(path: str) -> Problem:
    """Read a problem JSON file; fixture names are resolved by the CLI, not here."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return problem_from_dict(data)


def problem_to_dict(problem: Problem) -> dict:
    return {
        "name": problem.name,
        "variables": list(problem.variables),
        "objectives": list(problem.objectives),
        "constraints": list(problem.constraints),
        "box": [[lo, hi] for lo, hi in problem.box],
    }
