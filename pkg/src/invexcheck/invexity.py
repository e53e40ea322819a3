"""Pairwise invexity certifiers, domain sampling verdicts, and cross-checks.

For one ordered pair (x̄, x) each certifier decides a linear system in the
kernel vector η and returns exactly one of

* a **kernel witness** η — substituting it into the defining inequalities
  verifies the invexity relation for that pair, with a quantitative margin
  for the strict kinds; or
* a **dual certificate** (λ, μ) — nonnegative multipliers proving no kernel
  exists, which simultaneously exhibit the pair's base point as a stationary
  point that fails to be a global weighting minimizer.

The four kinds differ only in which rows enter the system: nonstrict kinds
ask for componentwise ``Jf(x̄)·η ≤ f(x) − f(x̄)`` (plus ``Jg_I(x̄)·η ≤ 0`` on
the active constraints for the KT kinds); strict kinds require strict
objective rows and are decided through the Gordan/Motzkin alternative on a
homogenized matrix, whose primal witness (ζ, ξ) with ξ < 0 rescales to the
kernel η = −ζ/ξ.

`certify_domain` sweeps a sampler's point set pairwise, and
`theorem_crosscheck` confronts the sampled verdicts with the stationarity
and weighting scans: stationary-points-are-global must agree with
all-pairs-kernel, and unique-globality must agree with the strict kinds.
A disagreement indicates an implementation bug, never new mathematics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .alternative import gordan, motzkin
from .problems import (
    EvaluatedPoint,
    InfeasiblePointError,
    Problem,
    evaluate,
    grid_points,
    random_points,
    without_constraints,
)
from .scalarization import (
    Globality,
    GlobalityVerdict,
    WeightVector,
    is_global_weighting_solution,
)
from .simplex import (
    DEFAULT_TOL,
    ROW_EQ,
    ROW_LE,
    VAR_FREE,
    VAR_NONNEG,
    FarkasCertificate,
    FeasiblePoint,
    LpProblem,
    LpStatus,
    NumericalBreakdownError,
    ToleranceConfig,
    check_feasibility,
    solve_lp,
)
from .stationarity import StationaryKind, StationaryPoint, scan_critical_points

#: Pairs closer than this are rejected by the strict certifiers.
DEGENERATE_PAIR_RADIUS = 1e-9

_KERNEL_SAMPLE_LIMIT = 100


class DegeneratePairError(ValueError):
    """A strict certifier needs two distinct points."""


class InvexityKind(Enum):
    INVEX = "invex"
    STRICT_INVEX = "strict-invex"
    KT_INVEX = "kt-invex"
    STRICT_KT_INVEX = "strict-kt-invex"

    @property
    def is_strict(self) -> bool:
        return self in (InvexityKind.STRICT_INVEX, InvexityKind.STRICT_KT_INVEX)

    @property
    def is_kt(self) -> bool:
        return self in (InvexityKind.KT_INVEX, InvexityKind.STRICT_KT_INVEX)


@dataclass
class KernelWitness:
    """A vector η making the invexity inequalities hold for one pair."""

    eta: np.ndarray
    margin: float  # worst objective-row slack; strictly positive for strict kinds


@dataclass
class DualCertificate:
    """Multipliers proving no kernel exists for one pair.

    λ is normalized to sum to one; μ (KT kinds) carries the active-set
    multipliers on the same scale. `violation` is λ·(f(x) − f(x̄)): strictly
    negative for the nonstrict kinds, nonpositive for the strict kinds.
    """

    lam: np.ndarray
    mu: np.ndarray | None
    violation: float


@dataclass
class PairVerdict:
    kind: InvexityKind
    xbar: np.ndarray
    x: np.ndarray
    kernel: KernelWitness | None
    certificate: DualCertificate | None

    @property
    def holds(self) -> bool:
        return self.kernel is not None


def _require_shared_problem(pbar: EvaluatedPoint, p: EvaluatedPoint) -> None:
    if pbar.problem != p.problem:
        raise ValueError("both points must come from the same problem")


def _base_rows(pbar: EvaluatedPoint, p: EvaluatedPoint, with_active: bool):
    """Objective rows Jf(x̄)·η ≤ Δf, optionally plus active rows Jg_I(x̄)·η ≤ 0."""
    jac = pbar.objective_jacobian
    delta = p.objective_values - pbar.objective_values
    if not with_active:
        return jac, delta
    jac_active = pbar.active_jacobian
    matrix = np.vstack([jac, jac_active])
    rhs = np.concatenate([delta, np.zeros(jac_active.shape[0])])
    return matrix, rhs


def _kernel_margin(pbar: EvaluatedPoint, p: EvaluatedPoint, eta: np.ndarray) -> float:
    slack = (p.objective_values - pbar.objective_values) - pbar.objective_jacobian @ eta
    return max(0.0, float(slack.min()))


def _candidate_ok(
    matrix: np.ndarray, rhs: np.ndarray, eta: np.ndarray
) -> bool:
    return bool(np.all(matrix @ eta <= rhs))


def _certificate_cleanup(
    pbar: EvaluatedPoint,
    delta: np.ndarray,
    with_active: bool,
    fallback: DualCertificate,
    tol: ToleranceConfig,
) -> DualCertificate:
    """Canonicalize a failure certificate by minimizing λ·Δf over all valid ones.

    The minimum is the most violated weighting gap the pair admits, making
    the reported certificate deterministic and maximally informative; if the
    cleanup LP stumbles numerically the Farkas-derived fallback is returned.
    """
    n, s = pbar.objective_jacobian.shape
    jac_active = pbar.active_jacobian if with_active else np.zeros((0, s))
    r = jac_active.shape[0]
    eq = np.zeros((s + 1, n + r))
    eq[:s, :n] = pbar.objective_jacobian.T
    eq[:s, n:] = jac_active.T
    eq[s, :n] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    lp = LpProblem(
        objective=np.concatenate([delta, np.zeros(r)]),
        constraint_matrix=eq,
        rhs=rhs,
        row_kinds=(ROW_EQ,) * (s + 1),
        variable_bounds=(VAR_NONNEG,) * (n + r),
    )
    outcome = solve_lp(lp, tol)
    if outcome.status is not LpStatus.OPTIMAL:
        return fallback
    lam = np.clip(outcome.primal_solution[:n], 0.0, None)
    mu = np.clip(outcome.primal_solution[n:], 0.0, None)
    total = lam.sum()
    if total <= tol.strict:
        return fallback
    lam /= total
    mu /= total
    return DualCertificate(
        lam=lam,
        mu=mu if with_active else None,
        violation=float(lam @ delta),
    )


def _weak_pair(
    pbar: EvaluatedPoint,
    p: EvaluatedPoint,
    kind: InvexityKind,
    tol: ToleranceConfig,
) -> PairVerdict:
    """Shared engine for the two nonstrict kinds."""
    _require_shared_problem(pbar, p)
    with_active = kind.is_kt
    if with_active:
        for ep, label in ((pbar, "base point"), (p, "comparison point")):
            if not ep.feasible:
                raise InfeasiblePointError(
                    f"{label} violates constraints by {ep.constraint_values.max():.3e}"
                )
    matrix, rhs = _base_rows(pbar, p, with_active)
    delta = p.objective_values - pbar.objective_values

    for eta in (np.zeros_like(pbar.x), p.x - pbar.x):
        if _candidate_ok(matrix, rhs, eta):
            return PairVerdict(
                kind=kind,
                xbar=pbar.x,
                x=p.x,
                kernel=KernelWitness(eta=eta, margin=_kernel_margin(pbar, p, eta)),
                certificate=None,
            )

    result = check_feasibility(
        matrix,
        rhs,
        row_kinds=(ROW_LE,) * matrix.shape[0],
        variable_bounds=(VAR_FREE,) * matrix.shape[1],
        tol=tol,
    )
    if isinstance(result, FeasiblePoint):
        eta = result.point
        return PairVerdict(
            kind=kind,
            xbar=pbar.x,
            x=p.x,
            kernel=KernelWitness(eta=eta, margin=_kernel_margin(pbar, p, eta)),
            certificate=None,
        )
    assert isinstance(result, FarkasCertificate)
    y = np.clip(result.y, 0.0, None)
    n = pbar.objective_jacobian.shape[0]
    lam_raw, mu_raw = y[:n], y[n:]
    total = lam_raw.sum()
    if total <= tol.strict:
        raise NumericalBreakdownError("infeasibility certificate has empty weight block")
    fallback = DualCertificate(
        lam=lam_raw / total,
        mu=(mu_raw / total) if with_active else None,
        violation=float((lam_raw / total) @ delta),
    )
    certificate = _certificate_cleanup(pbar, delta, with_active, fallback, tol)
    return PairVerdict(
        kind=kind, xbar=pbar.x, x=p.x, kernel=None, certificate=certificate
    )


def _strict_pair(
    pbar: EvaluatedPoint,
    p: EvaluatedPoint,
    kind: InvexityKind,
    tol: ToleranceConfig,
) -> PairVerdict:
    """Shared engine for the two strict kinds, via Gordan/Motzkin."""
    _require_shared_problem(pbar, p)
    gap = float(np.linalg.norm(p.x - pbar.x))
    if gap <= DEGENERATE_PAIR_RADIUS:
        raise DegeneratePairError(
            f"strict comparison needs distinct points (distance {gap:.3e})"
        )
    with_active = kind.is_kt
    if with_active:
        for ep, label in ((pbar, "base point"), (p, "comparison point")):
            if not ep.feasible:
                raise InfeasiblePointError(
                    f"{label} violates constraints by {ep.constraint_values.max():.3e}"
                )
    n, s = pbar.objective_jacobian.shape
    delta = p.objective_values - pbar.objective_values
    # homogenized strict block: a solution (ζ, ξ) has ξ < 0 by its first row
    strict_block = np.zeros((n + 1, s + 1))
    strict_block[0, s] = 1.0
    strict_block[1:, :s] = pbar.objective_jacobian
    strict_block[1:, s] = delta

    if with_active:
        jac_active = pbar.active_jacobian
        weak_block = np.hstack([jac_active, np.zeros((jac_active.shape[0], 1))])
        outcome = motzkin(strict_block, weak_block, tol)
        dual_lam_raw = outcome.dual_witness_y
        dual_mu_raw = outcome.dual_witness_z
    else:
        outcome = gordan(strict_block, tol)
        dual_lam_raw = outcome.dual_witness
        dual_mu_raw = None

    if outcome.primal_holds:
        zeta, xi = outcome.primal_witness[:s], float(outcome.primal_witness[s])
        # first strict row forces ξ ≤ −margin < 0
        eta = -zeta / xi
        margin = outcome.strict_margin / abs(xi)
        return PairVerdict(
            kind=kind,
            xbar=pbar.x,
            x=p.x,
            kernel=KernelWitness(eta=eta, margin=margin),
            certificate=None,
        )

    lam_raw = dual_lam_raw[1:]  # drop the homogenizing row's multiplier
    total = lam_raw.sum()
    if total <= tol.strict:
        raise NumericalBreakdownError("strict dual witness has empty weight block")
    lam = lam_raw / total
    mu = (dual_mu_raw / total) if with_active else None
    return PairVerdict(
        kind=kind,
        xbar=pbar.x,
        x=p.x,
        kernel=None,
        certificate=DualCertificate(lam=lam, mu=mu, violation=float(lam @ delta)),
    )


def invex_pair(
    pbar: EvaluatedPoint, p: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> PairVerdict:
    """Kernel or certificate for ``f(x) − f(x̄) ≧ Jf(x̄)·η``."""
    return _weak_pair(pbar, p, InvexityKind.INVEX, tol)


def kt_invex_pair(
    pbar: EvaluatedPoint, p: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> PairVerdict:
    """Invexity rows plus ``Jg_I(x̄)·η ≤ 0``; both points must be feasible."""
    return _weak_pair(pbar, p, InvexityKind.KT_INVEX, tol)


def strict_invex_pair(
    pbar: EvaluatedPoint, p: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> PairVerdict:
    """Strict componentwise version, decided by Gordan's alternative."""
    return _strict_pair(pbar, p, InvexityKind.STRICT_INVEX, tol)


def strict_kt_invex_pair(
    pbar: EvaluatedPoint, p: EvaluatedPoint, tol: ToleranceConfig = DEFAULT_TOL
) -> PairVerdict:
    """Strict objective rows plus weak active rows, via Motzkin's alternative."""
    return _strict_pair(pbar, p, InvexityKind.STRICT_KT_INVEX, tol)


_PAIR_CERTIFIERS = {
    InvexityKind.INVEX: invex_pair,
    InvexityKind.STRICT_INVEX: strict_invex_pair,
    InvexityKind.KT_INVEX: kt_invex_pair,
    InvexityKind.STRICT_KT_INVEX: strict_kt_invex_pair,
}


def pair_certifier(kind: InvexityKind):
    return _PAIR_CERTIFIERS[kind]


@dataclass(frozen=True)
class GridSampler:
    step: float

    def points(self, problem: Problem) -> np.ndarray:
        return grid_points(problem, self.step)

    def describe(self) -> str:
        return f"grid(step={self.step:g})"


@dataclass(frozen=True)
class RandomSampler:
    count: int
    seed: int

    def points(self, problem: Problem) -> np.ndarray:
        return random_points(problem, self.count, self.seed)

    def describe(self) -> str:
        return f"random(count={self.count}, seed={self.seed})"


@dataclass
class DomainVerdict:
    """Outcome of sweeping one invexity kind over all sampled ordered pairs.

    `all_pairs_kernel` claims nothing beyond the recorded sampler
    resolution; `failures` holds every certificate-bearing pair, while
    `kernels` is a bounded sample of the kernel-bearing ones.
    """

    problem_name: str
    kind: InvexityKind
    sampler: GridSampler | RandomSampler
    all_pairs_kernel: bool
    checked_pairs: int
    points_sampled: int
    failures: tuple[PairVerdict, ...]
    kernels: tuple[PairVerdict, ...]


@lru_cache(maxsize=64)
def _certify(
    problem: Problem,
    kind: InvexityKind,
    sampler: GridSampler | RandomSampler,
    tol: ToleranceConfig,
) -> DomainVerdict:
    points = sampler.points(problem)
    evaluated = [evaluate(problem, x, tol) for x in points]
    if kind.is_kt:
        evaluated = [ep for ep in evaluated if ep.feasible]
    if not evaluated:
        raise InfeasiblePointError(
            f"sampler produced no feasible point on {problem.name!r}"
        )
    certify = pair_certifier(kind)
    failures: list[PairVerdict] = []
    kernels: list[PairVerdict] = []
    checked = 0
    for pbar in evaluated:
        for p in evaluated:
            if kind.is_strict and (
                float(np.linalg.norm(p.x - pbar.x)) <= DEGENERATE_PAIR_RADIUS
            ):
                continue
            verdict = certify(pbar, p, tol)
            checked += 1
            if verdict.holds:
                if len(kernels) < _KERNEL_SAMPLE_LIMIT:
                    kernels.append(verdict)
            else:
                failures.append(verdict)
    return DomainVerdict(
        problem_name=problem.name,
        kind=kind,
        sampler=sampler,
        all_pairs_kernel=not failures,
        checked_pairs=checked,
        points_sampled=len(evaluated),
        failures=tuple(failures),
        kernels=tuple(kernels),
    )


def certify_domain(
    problem: Problem,
    kind: InvexityKind,
    sampler: GridSampler | RandomSampler,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> DomainVerdict:
    """Run one kind's pairwise certifier over every sampled ordered pair.

    KT kinds restrict to feasible sample points; strict kinds skip
    degenerate pairs. The non-KT kinds ignore constraints entirely, so the
    problem is normalized to its unconstrained form first (this also lets
    repeated runs share one cache entry).
    """
    if not kind.is_kt:
        problem = without_constraints(problem)
    return _certify(problem, kind, sampler, tol)


def validate_pair_verdict(
    problem: Problem, verdict: PairVerdict, tol: ToleranceConfig = DEFAULT_TOL
) -> list[str]:
    """Replay a verdict's kernel or certificate by direct substitution."""
    pbar = evaluate(problem, verdict.xbar, tol)
    p = evaluate(problem, verdict.x, tol)
    delta = p.objective_values - pbar.objective_values
    jac = pbar.objective_jacobian
    jac_active = pbar.active_jacobian
    problems: list[str] = []
    kind = verdict.kind

    if verdict.kernel is not None and verdict.certificate is not None:
        problems.append("verdict carries both a kernel and a certificate")
    if verdict.kernel is None and verdict.certificate is None:
        problems.append("verdict carries neither a kernel nor a certificate")

    if verdict.kernel is not None:
        eta, margin = verdict.kernel.eta, verdict.kernel.margin
        slack = delta - jac @ eta
        if kind.is_strict:
            if margin <= 0:
                problems.append(f"strict kernel margin {margin!r} not positive")
            if float(slack.min()) < margin - tol.strict:
                problems.append(
                    f"strict kernel slack {slack.min():.3e} below margin {margin:.3e}"
                )
        else:
            if float(slack.min()) < -tol.strict:
                problems.append(f"kernel row violated by {-float(slack.min()):.3e}")
            if margin < 0:
                problems.append("kernel margin negative")
        if kind.is_kt and jac_active.shape[0]:
            weak = jac_active @ eta
            if float(weak.max()) > tol.strict:
                problems.append(f"active row Jg·η = {weak.max():.3e} > 0")

    if verdict.certificate is not None:
        cert = verdict.certificate
        lam = np.asarray(cert.lam)
        if float(lam.min()) < -tol.strict:
            problems.append("certificate weight negative")
        if abs(float(lam.sum()) - 1.0) > tol.strict:
            problems.append("certificate weights not normalized")
        combo = lam @ jac
        if cert.mu is not None and jac_active.shape[0]:
            mu = np.asarray(cert.mu)
            if mu.size != jac_active.shape[0]:
                problems.append("certificate μ length mismatches active set")
            else:
                if float(mu.min()) < -tol.strict:
                    problems.append("certificate μ negative")
                combo = combo + mu @ jac_active
        resid = float(np.max(np.abs(combo))) if combo.size else 0.0
        if resid > tol.strict:
            problems.append(f"certificate stationarity residual {resid:.3e}")
        actual = float(lam @ delta)
        if abs(actual - cert.violation) > tol.strict:
            problems.append(
                f"stored violation {cert.violation:.3e} != recomputed {actual:.3e}"
            )
        if kind.is_strict:
            if actual > tol.strict:
                problems.append(f"strict certificate violation {actual:.3e} positive")
        else:
            if actual >= -tol.strict:
                problems.append(
                    f"certificate violation {actual:.3e} not strictly negative"
                )
    return problems


@dataclass
class StationaryGlobality:
    """One scanned stationary point graded against its own weight vector."""

    x: np.ndarray
    lam: np.ndarray
    verdict: GlobalityVerdict


@dataclass
class TheoremCheck:
    """One equivalence instance: stationary-side L versus kernel-side R."""

    kind: InvexityKind
    stationary_side: bool                 # L: all stationary points pass the grade
    kernel_side: bool                     # R: certify_domain found no failures
    stationary_count: int
    stationary_failures: tuple[StationaryGlobality, ...]
    kernel_failures: tuple[PairVerdict, ...]

    @property
    def agreement(self) -> bool:
        return self.stationary_side == self.kernel_side


@dataclass
class CrosscheckReport:
    problem_name: str
    grid_step: float
    pair_step: float
    checks: tuple[TheoremCheck, ...]

    @property
    def agreement(self) -> bool:
        return all(check.agreement for check in self.checks)

    def check_for(self, kind: InvexityKind) -> TheoremCheck:
        for check in self.checks:
            if check.kind is kind:
                return check
        raise KeyError(getattr(kind, "value", kind))


def _grade_stationary(
    problem: Problem,
    points: tuple[StationaryPoint, ...],
    grid_step: float,
    strict: bool,
    tol: ToleranceConfig,
) -> tuple[bool, tuple[StationaryGlobality, ...]]:
    """L side: every stationary point Global (strict: UniqueGlobal) for its λ."""
    failures = []
    for sp in points:
        lam = sp.multipliers.lam
        verdict = is_global_weighting_solution(
            problem, WeightVector(tuple(lam)), sp.x, grid_step, tol
        )
        ok = (
            verdict.globality is Globality.UNIQUE_GLOBAL
            if strict
            else verdict.is_global
        )
        if not ok:
            failures.append(StationaryGlobality(x=sp.x, lam=lam, verdict=verdict))
    return not failures, tuple(failures)


def theorem_crosscheck(
    problem: Problem,
    grid_step: float,
    pair_step: float = 0.25,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> CrosscheckReport:
    """Confront stationary/weighting scans with pairwise kernel verdicts.

    The unconstrained reading (vector critical points, invex kinds) drops
    the constraints entirely; the KT reading keeps them. For each of the
    four kinds the stationary side L and the kernel side R must agree —
    `CrosscheckReport.agreement` is the master flag CI keys off.
    """
    sampler = GridSampler(float(pair_step))
    unconstrained = without_constraints(problem)
    critical = scan_critical_points(
        unconstrained, grid_step, StationaryKind.VECTOR, tol
    )
    kt_points = scan_critical_points(problem, grid_step, StationaryKind.KT, tol)

    checks = []
    for kind, base, points in (
        (InvexityKind.INVEX, unconstrained, critical),
        (InvexityKind.STRICT_INVEX, unconstrained, critical),
        (InvexityKind.KT_INVEX, problem, kt_points),
        (InvexityKind.STRICT_KT_INVEX, problem, kt_points),
    ):
        l_side, l_failures = _grade_stationary(
            base, points, grid_step, kind.is_strict, tol
        )
        domain = certify_domain(base, kind, sampler, tol)
        checks.append(
            TheoremCheck(
                kind=kind,
                stationary_side=l_side,
                kernel_side=domain.all_pairs_kernel,
                stationary_count=len(points),
                stationary_failures=l_failures,
                kernel_failures=domain.failures,
            )
        )
    return CrosscheckReport(
        problem_name=problem.name,
        grid_step=float(grid_step),
        pair_step=float(pair_step),
        checks=tuple(checks),
    )
