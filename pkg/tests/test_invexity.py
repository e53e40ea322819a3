"""Pairwise invexity certificates, domain sweeps, theorem cross-checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invexcheck.invexity import (
    DegeneratePairError,
    GridSampler,
    InvexityKind,
    RandomSampler,
    certify_domain,
    invex_pair,
    kt_invex_pair,
    pair_certifier,
    strict_invex_pair,
    strict_kt_invex_pair,
    theorem_crosscheck,
    validate_pair_verdict,
)
from invexcheck.problems import (
    InfeasiblePointError,
    Problem,
    evaluate,
    fixture,
)

# objective pulls right at the boundary x = 1 of the disconnected feasible
# set {|x| >= 1}, while lower values live on the far component: the KT
# certificate at (1, -1) must use the constraint multiplier
SPLIT_INTERVAL = Problem(
    name="split-interval",
    variables=("x",),
    objectives=("x",),
    constraints=("1 - x^2",),
    box=((-3.0, 3.0),),
)


def pair(name, xbar, x, kind):
    p = SPLIT_INTERVAL if name == "split-interval" else fixture(name)
    return pair_certifier(kind)(
        evaluate(p, np.atleast_1d(xbar)), evaluate(p, np.atleast_1d(x))
    )


def test_kernel_found_for_convex_pair():
    verdict = pair("convex-pair", 1.0, 0.0, InvexityKind.INVEX)
    assert verdict.holds
    assert verdict.certificate is None
    assert verdict.kernel.eta == pytest.approx([-1.0])
    assert verdict.kernel.margin == pytest.approx(1.0)
    assert validate_pair_verdict(fixture("convex-pair"), verdict) == []


def test_certificate_at_saddle_of_cube():
    verdict = pair("cube", 0.0, -1.0, InvexityKind.INVEX)
    assert not verdict.holds
    assert verdict.kernel is None
    cert = verdict.certificate
    assert cert.lam == pytest.approx([1.0])
    assert cert.mu is None
    assert cert.violation == pytest.approx(-1.0)
    assert validate_pair_verdict(fixture("cube"), verdict) == []


def test_same_point_nonstrict_pair_certifies_trivially():
    verdict = pair("cube", 1.0, 1.0, InvexityKind.INVEX)
    assert verdict.holds
    assert verdict.kernel.eta == pytest.approx([0.0])


def test_strict_pair_rejects_coincident_points():
    with pytest.raises(DegeneratePairError):
        pair("paper-example-2.1", 0.0, 0.0, InvexityKind.STRICT_INVEX)
    with pytest.raises(DegeneratePairError):
        pair("two-var-convex", (0.0, 0.0), (0.0, 0.0), InvexityKind.STRICT_KT_INVEX)


def test_strict_certificate_on_flat_stretch():
    # both objectives are flat between the critical points, so no eta can be
    # strictly below zero change; the refuting weights ride the flat rows
    verdict = pair("paper-example-2.1", 0.0, 0.5, InvexityKind.STRICT_INVEX)
    assert not verdict.holds
    cert = verdict.certificate
    assert cert.lam.min() >= -1e-12
    assert cert.lam.sum() == pytest.approx(1.0)
    assert cert.violation == pytest.approx(0.0, abs=1e-12)
    assert validate_pair_verdict(fixture("paper-example-2.1"), verdict) == []


def test_strict_kernel_with_margin():
    verdict = pair("paper-example-2.1", 2.0, 0.5, InvexityKind.STRICT_INVEX)
    assert verdict.holds
    assert verdict.kernel.margin > 0
    assert validate_pair_verdict(fixture("paper-example-2.1"), verdict) == []

    verdict = pair("two-var-convex", (0.0, 0.0), (1.0, 0.0), InvexityKind.STRICT_KT_INVEX)
    assert verdict.holds
    assert verdict.kernel.eta == pytest.approx([1.0, 0.0])
    assert validate_pair_verdict(fixture("two-var-convex"), verdict) == []


def test_kt_pair_uses_active_rows():
    verdict = pair("kt-linear-quad", 0.0, 1.0, InvexityKind.KT_INVEX)
    assert verdict.holds
    assert validate_pair_verdict(fixture("kt-linear-quad"), verdict) == []


def test_kt_pair_requires_feasible_points():
    with pytest.raises(InfeasiblePointError):
        pair("kt-linear-quad", 0.0, -1.0, InvexityKind.KT_INVEX)
    with pytest.raises(InfeasiblePointError):
        pair("kt-linear-quad", -1.0, 0.0, InvexityKind.KT_INVEX)


def test_kt_certificate_carries_constraint_multiplier():
    # objective gradient points into the active constraint, and the other
    # component of the feasible set holds strictly better values
    verdict = pair("split-interval", 1.0, -1.0, InvexityKind.KT_INVEX)
    assert not verdict.holds
    cert = verdict.certificate
    assert cert.lam == pytest.approx([1.0])
    assert cert.mu == pytest.approx([0.5])
    assert cert.violation == pytest.approx(-2.0)
    assert validate_pair_verdict(SPLIT_INTERVAL, verdict) == []


def test_pair_rejects_points_from_different_problems():
    a = evaluate(fixture("cube"), [0.0])
    b = evaluate(fixture("convex-pair"), [0.0])
    with pytest.raises(ValueError):
        invex_pair(a, b)


def test_validate_pair_verdict_catches_tampering():
    verdict = pair("convex-pair", 1.0, 0.0, InvexityKind.INVEX)
    verdict.kernel.eta[0] = 5.0
    assert validate_pair_verdict(fixture("convex-pair"), verdict) != []

    verdict = pair("cube", 0.0, -1.0, InvexityKind.INVEX)
    verdict.certificate.lam[0] = 0.5
    assert validate_pair_verdict(fixture("cube"), verdict) != []


def test_domain_sweep_counts_cube():
    dv = certify_domain(fixture("cube"), InvexityKind.INVEX, GridSampler(0.25))
    assert not dv.all_pairs_kernel
    assert dv.points_sampled == 17
    # nonstrict sweeps include the diagonal (eta = 0 certifies x = xbar)
    assert dv.checked_pairs == 17 * 17
    assert len(dv.failures) == 8
    assert all(f.xbar == pytest.approx([0.0]) for f in dv.failures)
    assert all(f.x[0] < 0 for f in dv.failures)


def test_domain_sweep_counts_flat_stretch_strict():
    dv = certify_domain(
        fixture("paper-example-2.1"), InvexityKind.STRICT_INVEX, GridSampler(0.25)
    )
    assert not dv.all_pairs_kernel
    assert dv.points_sampled == 25
    assert dv.checked_pairs == 25 * 24
    assert len(dv.failures) == 72  # 9 flat nodes x 8 flat partners


def test_domain_sweep_kernel_sample_is_bounded():
    dv = certify_domain(
        fixture("paper-example-2.1"), InvexityKind.INVEX, GridSampler(0.25)
    )
    assert dv.all_pairs_kernel
    assert dv.failures == ()
    assert len(dv.kernels) == 100  # capped sample of the 600 passing pairs


def test_domain_sweep_restricts_kt_kinds_to_feasible_points():
    dv = certify_domain(
        fixture("kt-linear-quad"), InvexityKind.KT_INVEX, GridSampler(0.25)
    )
    assert dv.all_pairs_kernel
    assert dv.points_sampled == 9  # 17 grid nodes, 9 with x >= 0
    assert dv.checked_pairs == 9 * 9


def test_domain_sweep_is_cached():
    a = certify_domain(fixture("cube"), InvexityKind.INVEX, GridSampler(0.25))
    b = certify_domain(fixture("cube"), InvexityKind.INVEX, GridSampler(0.25))
    assert a is b


def test_random_sampler_is_deterministic():
    dv1 = certify_domain(
        fixture("convex-pair"), InvexityKind.INVEX, RandomSampler(30, seed=3)
    )
    dv2 = certify_domain(
        fixture("convex-pair"), InvexityKind.INVEX, RandomSampler(30, seed=3)
    )
    assert dv1 is dv2
    assert dv1.all_pairs_kernel
    assert dv1.points_sampled == 30


def test_crosscheck_convex_problem_agrees_positively():
    report = theorem_crosscheck(fixture("convex-pair"), 0.1)
    assert report.agreement
    for kind in InvexityKind:
        check = report.check_for(kind)
        assert check.agreement
        assert check.stationary_side and check.kernel_side
        assert check.stationary_count > 0


def test_crosscheck_cube_agrees_negatively():
    report = theorem_crosscheck(fixture("cube"), 0.05)
    assert report.agreement
    check = report.check_for(InvexityKind.INVEX)
    assert not check.stationary_side
    assert not check.kernel_side
    assert len(check.stationary_failures) == 1
    failure = check.stationary_failures[0]
    assert failure.x == pytest.approx([0.0])
    assert failure.lam == pytest.approx([1.0])
    assert failure.verdict.witness_value < failure.verdict.value
    assert check.kernel_failures != ()


def test_crosscheck_unknown_kind_lookup():
    report = theorem_crosscheck(fixture("cube"), 0.25)
    with pytest.raises(KeyError):
        report.check_for("nonsense")


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0),
)
def test_convex_quadratics_always_yield_kernels(a, b, xbar, x):
    problem = Problem(
        name="random-quadratic",
        variables=("x",),
        objectives=(f"{a:.8f} * x^2 + {b:.8f} * x",),
        constraints=(),
        box=((-2.0, 2.0),),
    )
    verdict = invex_pair(evaluate(problem, [xbar]), evaluate(problem, [x]))
    assert verdict.holds
    assert validate_pair_verdict(problem, verdict) == []


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=2.0),
    st.floats(min_value=-1.5, max_value=1.5),
    st.floats(min_value=-1.5, max_value=1.5),
)
def test_strict_kernels_replay_for_strictly_convex_objectives(a, xbar, x):
    if abs(x - xbar) < 1e-6:
        return
    problem = Problem(
        name="random-strict-quadratic",
        variables=("x",),
        objectives=(f"{a:.8f} * x^2", f"{a:.8f} * (x - 1)^2"),
        constraints=(),
        box=((-2.0, 2.0),),
    )
    verdict = strict_invex_pair(evaluate(problem, [xbar]), evaluate(problem, [x]))
    assert verdict.holds
    assert verdict.kernel.margin > 0
    assert validate_pair_verdict(problem, verdict) == []
