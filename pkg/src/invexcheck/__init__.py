"""invexcheck: numerical certification of invexity and weighting optimality."""

from .alternative import (
    AlternativeBranch,
    GordanOutcome,
    MotzkinOutcome,
    gordan,
    motzkin,
    validate_gordan,
    validate_motzkin,
)
from .expressions import (
    DomainError,
    ExprSyntaxError,
    SmoothnessReport,
    UnknownFunctionError,
    UnknownVariableError,
    eval_value,
    eval_with_gradient,
    parse,
    to_text,
    validate_smoothness,
)
from .invexity import (
    CrosscheckReport,
    DegeneratePairError,
    DomainVerdict,
    DualCertificate,
    GridSampler,
    InvexityKind,
    KernelWitness,
    PairVerdict,
    RandomSampler,
    TheoremCheck,
    certify_domain,
    invex_pair,
    kt_invex_pair,
    pair_certifier,
    strict_invex_pair,
    strict_kt_invex_pair,
    theorem_crosscheck,
    validate_pair_verdict,
)
from .problems import (
    EvaluatedPoint,
    InfeasiblePointError,
    OutOfBoxError,
    Problem,
    UnknownFixtureError,
    VectorOrder,
    compare,
    evaluate,
    fixture,
    fixture_names,
    grid_points,
    leq_all,
    leq_not_equal,
    load_problem,
    problem_from_dict,
    problem_to_dict,
    random_points,
    strictly_less,
    without_constraints,
)
from .report import (
    build_report,
    canonical_json,
    pair_verdict_to_dict,
    strip_timings,
    verify_report,
)
from .scalarization import (
    EmptyFeasibleSetError,
    Globality,
    GlobalityVerdict,
    WeightingSolution,
    WeightVector,
    is_global_weighting_solution,
    simplex_weights,
    solve_weighting,
    weakly_efficient_scan,
)
from .simplex import (
    DEFAULT_TOL,
    DimensionMismatchError,
    FarkasCertificate,
    FeasiblePoint,
    LpOutcome,
    LpProblem,
    LpStatus,
    NumericalBreakdownError,
    ToleranceConfig,
    check_feasibility,
    solve_lp,
    validate_outcome,
)
from .stationarity import (
    CriticalMultipliers,
    KtMultipliers,
    StationaryKind,
    StationaryPoint,
    critical_multipliers,
    kt_multipliers,
    scan_critical_points,
)

__version__ = "0.1.0"

__all__ = [
    "AlternativeBranch",
    "CriticalMultipliers",
    "CrosscheckReport",
    "DEFAULT_TOL",
    "DegeneratePairError",
    "DimensionMismatchError",
    "DomainError",
    "DomainVerdict",
    "DualCertificate",
    "EmptyFeasibleSetError",
    "EvaluatedPoint",
    "ExprSyntaxError",
    "FarkasCertificate",
    "FeasiblePoint",
    "Globality",
    "GlobalityVerdict",
    "GordanOutcome",
    "GridSampler",
    "InfeasiblePointError",
    "InvexityKind",
    "KernelWitness",
    "KtMultipliers",
    "LpOutcome",
    "LpProblem",
    "LpStatus",
    "MotzkinOutcome",
    "NumericalBreakdownError",
    "OutOfBoxError",
    "PairVerdict",
    "Problem",
    "RandomSampler",
    "SmoothnessReport",
    "StationaryKind",
    "StationaryPoint",
    "TheoremCheck",
    "ToleranceConfig",
    "UnknownFixtureError",
    "UnknownFunctionError",
    "UnknownVariableError",
    "VectorOrder",
    "WeightVector",
    "WeightingSolution",
    "build_report",
    "canonical_json",
    "certify_domain",
    "check_feasibility",
    "compare",
    "critical_multipliers",
    "eval_value",
    "eval_with_gradient",
    "evaluate",
    "fixture",
    "fixture_names",
    "gordan",
    "grid_points",
    "invex_pair",
    "is_global_weighting_solution",
    "kt_invex_pair",
    "kt_multipliers",
    "leq_all",
    "leq_not_equal",
    "load_problem",
    "motzkin",
    "pair_certifier",
    "pair_verdict_to_dict",
    "parse",
    "problem_from_dict",
    "problem_to_dict",
    "random_points",
    "scan_critical_points",
    "simplex_weights",
    "solve_lp",
    "solve_weighting",
    "strict_invex_pair",
    "strict_kt_invex_pair",
    "strictly_less",
    "strip_timings",
    "theorem_crosscheck",
    "to_text",
    "validate_gordan",
    "validate_motzkin",
    "validate_outcome",
    "validate_pair_verdict",
    "validate_smoothness",
    "verify_report",
    "weakly_efficient_scan",
    "without_constraints",
    "__version__",
]
