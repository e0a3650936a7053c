import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slq.errors import DomainError, ExprSyntaxError, UnknownIdentifierError
from slq.expr import BinOp, Var, evaluate_checked, parse_expression


@pytest.mark.parametrize(
    "src, x, expected",
    [
        ("x", 3.0, 3.0),
        ("1+x^2", 2.0, 5.0),
        ("sqrt(abs(x))*sin(pi*x)", 1.0, 0.0),
        ("2^3^2", 0.0, 512.0),
        ("-x^2", 3.0, -9.0),
        ("(1 - x) / 4 * 2", 3.0, -1.0),
        ("exp(log(x))", 2.5, 2.5),
        ("1.5e-1 * cos(0)", 0.0, 0.15),
    ],
)
def test_evaluate(src, x, expected):
    assert parse_expression(src)(x) == pytest.approx(expected, abs=1e-15)


def test_ast_shape():
    e = parse_expression("x")
    assert isinstance(e, Var)
    e = parse_expression("1 + 2 * x")
    assert isinstance(e, BinOp) and e.op == "+"


def test_vectorised():
    e = parse_expression("x^2 + 1")
    np.testing.assert_allclose(e(np.array([0.0, 1.0, 2.0])), [1.0, 2.0, 5.0])
    assert isinstance(e(2.0), float)


@pytest.mark.parametrize(
    "src, offset",
    [("1 +", 3), ("(x", 2), ("x $ 1", 2), ("2 ** x", 3), ("", 0), ("sin x", 4)],
)
def test_syntax_error_offset(src, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression(src)
    assert info.value.offset == offset


def test_offset_is_in_bytes():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("x + é")
    assert info.value.offset == 4
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("1 + é + é")
    assert info.value.offset == 4


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse_expression("tan(x)")
    with pytest.raises(UnknownIdentifierError):
        parse_expression("y + 1")


def test_domain_error():
    with pytest.raises(DomainError):
        evaluate_checked(parse_expression("log(x)"), -1.0, segment=2)


# random expression trees for the round-trip property
_leaf = st.one_of(
    st.just("x"),
    st.just("pi"),
    st.floats(0.1, 9.0, allow_nan=False).map(lambda v: repr(round(v, 3))),
)


def _node(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*"), children).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
        st.tuples(children, children).map(lambda t: f"({t[0]}) / (2 + abs({t[1]}))"),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda s: f"-({s})"),
        children.map(lambda s: f"exp(-abs({s}))"),
        children.map(lambda s: f"sqrt(1 + ({s})^2)"),
    )


expressions = st.recursive(_leaf, _node, max_leaves=8)


@settings(max_examples=60, deadline=None)
@given(expressions)
def test_round_trip_property(src):
    e = parse_expression(src)
    back = parse_expression(str(e))
    xs = np.linspace(-3, 3, 100)
    a, b = e(xs), back(xs)
    np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-300)
    assert str(back) == str(e)


def test_printing_keeps_associativity():
    for src in ("1 - (2 - x)", "(2 ^ 3) ^ 2", "2 / (x * 3)", "-(x - 1)"):
        e = parse_expression(src)
        assert parse_expression(str(e))(1.7) == pytest.approx(e(1.7), rel=1e-15)
        assert math.isfinite(e(1.7))
