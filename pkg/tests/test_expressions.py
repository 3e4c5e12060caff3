"""Expression parsing, compilation, and affine analysis."""

import math

import pytest

from hybridcontracts.expressions import (
    EvalDomainError,
    ExpressionError,
    affine_coefficients,
    compile_expression,
    eval_expression,
    expression_variables,
    parse_expression,
)


def evl(text, **bindings):
    return eval_expression(parse_expression(text, bindings.keys()), bindings)


def test_arithmetic_and_precedence():
    assert evl("1 + 2 * 3") == 7.0
    assert evl("(1 + 2) * 3") == 9.0
    assert evl("2 - 3 - 4") == -5.0  # left associative
    assert evl("8 / 4 / 2") == 1.0
    assert evl("-2 * 3") == -6.0
    assert evl("--2") == 2.0
    assert evl("2 * -3") == -6.0


def test_variables():
    assert evl("x1 + 2 * w1", x1=1.0, w1=0.25) == 1.5
    assert evl("t - j", t=3.0, j=1.0) == 2.0


def test_functions():
    assert evl("sqrt(4)") == 2.0
    assert evl("cbrt(27)") == pytest.approx(3.0)
    assert evl("cbrt(-8)") == pytest.approx(-2.0)  # real root for negatives
    assert evl("pow(2, 10)") == 1024.0
    assert evl("exp(0)") == 1.0
    assert evl("abs(-3)") == 3.0
    assert evl("min(3, 1, 2)") == 1.0
    assert evl("max(0, t - 2)", t=1.0) == 0.0


def test_scientific_notation():
    assert evl("1e3 + 2.5E-2") == 1000.025
    assert evl(".5 * 4") == 2.0


def test_parse_errors():
    with pytest.raises(ExpressionError):
        parse_expression("1 +", ())
    with pytest.raises(ExpressionError):
        parse_expression("(1", ())
    with pytest.raises(ExpressionError):
        parse_expression("1 2", ())
    with pytest.raises(ExpressionError):
        parse_expression("x1 # comment", ("x1",))


def test_unknown_variable_reported_with_declared_list():
    with pytest.raises(ExpressionError, match="x2"):
        parse_expression("x2", ("x1", "w1"))


def test_unknown_function_and_arity():
    with pytest.raises(ExpressionError):
        parse_expression("sin(1)", ())
    with pytest.raises(ExpressionError):
        parse_expression("sqrt(1, 2)", ())
    with pytest.raises(ExpressionError):
        parse_expression("pow(2)", ())


def test_function_names_are_not_variables():
    # `sqrt` only acts as a function; a bare `sqrt` is an unknown variable
    with pytest.raises(ExpressionError):
        parse_expression("sqrt + 1", ())


def test_expression_variables():
    ast = parse_expression("x1 + max(w1, x2 * 2)", ("x1", "x2", "w1"))
    assert expression_variables(ast) == {"x1", "x2", "w1"}
    assert expression_variables(parse_expression("3 + 4", ())) == set()


def test_compiled_positional_order():
    ast = parse_expression("x1 - w1", ("x1", "w1"))
    f = compile_expression(ast, ("x1", "w1"))
    assert f(5.0, 2.0) == 3.0
    g = compile_expression(ast, ("w1", "x1"))
    assert g(2.0, 5.0) == 3.0


def test_eval_domain_errors():
    with pytest.raises(EvalDomainError):
        evl("sqrt(-1)")
    with pytest.raises(EvalDomainError):
        evl("1 / 0")
    with pytest.raises(EvalDomainError):
        evl("exp(10000)")  # overflow -> non-finite guard
    with pytest.raises(EvalDomainError):
        eval_expression(parse_expression("x1", ("x1",)), {})


def test_affine_detection():
    ast = parse_expression("-2 * x1 - 2 * w1", ("x1", "w1"))
    assert affine_coefficients(ast, ("x1", "w1")) == (0.0, {"x1": -2.0, "w1": -2.0})

    ast = parse_expression("0.5 * w1 + 3", ("x1", "w1"))
    const, coeffs = affine_coefficients(ast, ("x1", "w1"))
    assert const == 3.0
    assert coeffs == {"x1": 0.0, "w1": 0.5}


def test_affine_constant_folding():
    ast = parse_expression("x1 / 2 + sqrt(4)", ("x1",))
    assert affine_coefficients(ast, ("x1",)) == (2.0, {"x1": 0.5})


def test_affine_rejects_nonlinear():
    for text in ("x1 * x1", "sqrt(x1)", "1 / x1", "pow(x1, 2)", "abs(x1)"):
        ast = parse_expression(text, ("x1",))
        assert affine_coefficients(ast, ("x1",)) is None


def test_affine_matches_compiled_evaluation():
    text = "3 * x1 - w1 / 4 + 1 - -x1"
    ast = parse_expression(text, ("x1", "w1"))
    const, coeffs = affine_coefficients(ast, ("x1", "w1"))
    f = compile_expression(ast, ("x1", "w1"))
    for x, w in ((0.0, 0.0), (1.0, 2.0), (-3.5, 0.25)):
        assert f(x, w) == pytest.approx(const + coeffs["x1"] * x + coeffs["w1"] * w)
