"""Expression grammar, evaluation, dual-number gradients."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invexcheck.expressions import (
    DomainError,
    ExprSyntaxError,
    UnknownFunctionError,
    UnknownVariableError,
    eval_value,
    eval_with_gradient,
    parse,
    to_text,
    validate_smoothness,
)

X = ("x",)
XY = ("x", "y")


def ev(text, *args, variables=X):
    return eval_value(parse(text, variables), list(args))


def grad(text, *args, variables=X):
    return eval_with_gradient(parse(text, variables), list(args))[1]


def test_arithmetic_precedence():
    assert ev("2 + 3 * x", 4.0) == 14.0
    assert ev("(2 + 3) * x", 4.0) == 20.0
    assert ev("10 - 4 - 3", 0.0) == 3.0  # left associative
    assert ev("12 / 4 / 3", 1.0) == 1.0


def test_unary_minus_nests_inside_power_base():
    # the grammar reads '-' as part of the atom, so -x^2 squares (-x)
    assert ev("-x^2", 2.0) == 4.0
    assert ev("-(x^2)", 2.0) == -4.0


def test_power_takes_a_single_integer_exponent():
    assert ev("(x^2)^3", 2.0) == 64.0
    assert ev("x^-1", 2.0) == 0.5
    with pytest.raises(ExprSyntaxError):
        parse("x^2^3", X)
    with pytest.raises(ExprSyntaxError):
        parse("x^y", XY)


def test_function_calls():
    assert ev("exp(0)", 1.0) == 1.0
    assert ev("ln(exp(1))", 0.0) == pytest.approx(1.0)
    assert ev("sin(0) + cos(0)", 0.0) == pytest.approx(1.0)
    assert ev("abs(0 - x)", 3.5) == 3.5


def test_multivariable():
    assert ev("x * y + y^2", 2.0, 3.0, variables=XY) == 15.0


PIECEWISE = "piecewise(x > 1: (x - 1)^2; x < -1: (x + 1)^2; 0)"


@pytest.mark.parametrize(
    "x,expected",
    [(2.0, 1.0), (-2.0, 1.0), (0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (1.5, 0.25)],
)
def test_piecewise_branches(x, expected):
    assert ev(PIECEWISE, x) == expected


def test_piecewise_gradient_at_branch_points():
    # quadratic pieces meet the zero plateau with zero slope: C^1 everywhere
    assert grad(PIECEWISE, 2.0)[0] == pytest.approx(2.0)
    assert grad(PIECEWISE, -2.0)[0] == pytest.approx(-2.0)
    assert grad(PIECEWISE, 0.0)[0] == 0.0


def test_gradient_hand_cases():
    assert grad("x^3", 2.0)[0] == pytest.approx(12.0)
    g = grad("x * y + y^2", 2.0, 3.0, variables=XY)
    assert g == pytest.approx([3.0, 8.0])
    x = 0.3
    expected = math.cos(x) * math.exp(x) + math.sin(x) * math.exp(x)
    assert grad("sin(x) * exp(x)", x)[0] == pytest.approx(expected)


def test_abs_gradient_away_from_kink():
    assert grad("abs(x)", 2.0)[0] == 1.0
    assert grad("abs(x)", -2.0)[0] == -1.0


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("2 + * 3", X)
    assert exc.value.offset == 4
    with pytest.raises(ExprSyntaxError) as exc:
        parse("2 +", X)
    assert exc.value.offset == 3


def test_trailing_garbage_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("x + 1 )", X)


def test_unknown_variable_and_function():
    with pytest.raises(UnknownVariableError):
        parse("y + 1", X)
    with pytest.raises(UnknownFunctionError):
        parse("foo(x)", X)


def test_domain_errors():
    with pytest.raises(DomainError):
        ev("ln(x)", -1.0)
    with pytest.raises(DomainError):
        ev("x / (x - x)", 1.0)


def test_round_trip_hand_cases():
    for text in (
        "2 + 3 * x",
        "-x^2 + x / 4",
        "(x^2)^3",
        "exp(ln(x)) * sin(x - 1)",
        PIECEWISE,
        "abs(x) - (x - 2) * (x + 2)",
    ):
        expr = parse(text, X)
        again = parse(to_text(expr), X)
        for t in (-2.0, -0.5, 2.0, 3.0):
            try:
                lhs = eval_value(expr, [t])
            except DomainError:
                continue
            assert eval_value(again, [t]) == lhs


# -- random expressions ------------------------------------------------------

_leaf = st.one_of(
    st.sampled_from(["x", "y"]),
    st.integers(min_value=0, max_value=9).map(str),
    st.floats(min_value=0.25, max_value=4.0).map(lambda v: f"{v:.3f}"),
)


def _combine(children):
    op = st.sampled_from([" + ", " - ", " * "])
    return st.one_of(
        st.tuples(op, children, children).map(lambda t: f"({t[1]}{t[0]}{t[2]})"),
        children.map(lambda c: f"(-{c})"),
        children.map(lambda c: f"sin({c})"),
        children.map(lambda c: f"abs({c})"),
        st.tuples(children, st.integers(min_value=1, max_value=3)).map(
            lambda t: f"({t[0]})^{t[1]}"
        ),
    )


expression_texts = st.recursive(_leaf, _combine, max_leaves=12)


@settings(max_examples=150, deadline=None)
@given(expression_texts, st.floats(-3, 3), st.floats(-3, 3))
def test_round_trip_preserves_value(text, xv, yv):
    expr = parse(text, XY)
    reparsed = parse(to_text(expr), XY)
    value = eval_value(expr, [xv, yv])
    assert eval_value(reparsed, [xv, yv]) == value


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-4, 4), min_size=4, max_size=4),
    st.floats(-2.5, 2.5),
)
def test_polynomial_gradient_matches_finite_differences(coeffs, xv):
    text = " + ".join(f"({c:.6f}) * x^{k}" for k, c in enumerate(coeffs))
    expr = parse(text, X)
    h = 1e-6
    fd = (eval_value(expr, [xv + h]) - eval_value(expr, [xv - h])) / (2 * h)
    _, g = eval_with_gradient(expr, [xv])
    assert abs(g[0] - fd) <= 1e-6 * max(1.0, abs(fd))


def test_smoothness_accepts_c1_piecewise():
    report = validate_smoothness(parse(PIECEWISE, X), [(-3.0, 3.0)], samples=50)
    assert report.ok, report.violations


def test_smoothness_flags_abs_kink():
    report = validate_smoothness(parse("abs(x)", X), [(-1.0, 1.0)], samples=20)
    assert not report.ok
    assert any("seam" in v.note for v in report.violations)
