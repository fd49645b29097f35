import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from statlift.expr import ParseError, SmoothMap, parse, to_text
from statlift.series import DomainError

NAMES = ("x", "y")


def exprs():
    leaf = st.one_of(
        st.sampled_from(["x", "y", "pi"]),
        st.floats(0, 50, allow_nan=False).map(lambda v: repr(round(v, 3))),
    )

    def extend(inner):
        return st.one_of(
            st.tuples(inner, st.sampled_from("+-*/^"), inner).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
            st.tuples(st.sampled_from(["exp", "log", "sqrt", "-"]), inner).map(lambda t: f"{t[0]}({t[1]})"),
        )

    return st.recursive(leaf, extend, max_leaves=6)


@given(exprs())
def test_to_text_round_trips(text):
    tree = parse(text, NAMES)
    printed = to_text(tree)
    assert parse(printed, NAMES) == tree
    assert to_text(parse(printed, NAMES)) == printed


def test_precedence_and_associativity():
    f = SmoothMap.parse("-x^2 + 2^-1 * y^3^0.5", NAMES)
    assert f(3.0, 4.0) == pytest.approx(-9 + 0.5 * 4 ** (3**0.5))
    assert SmoothMap.parse("x - y - 1", NAMES)(5, 1) == 3
    assert SmoothMap.parse("x / y / 2", NAMES)(8, 2) == 2
    assert to_text(parse("(x - (y - 1))", NAMES)) == "x - (y - 1)"
    assert SmoothMap.parse("pi", NAMES)(0, 0) == math.pi


def test_arrays_broadcast():
    f = SmoothMap.parse("x * exp(y)", NAMES)
    np.testing.assert_allclose(f(np.array([1.0, 2.0]), 0.0), [1.0, 2.0])


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("x +", 1, 4),
        ("x + * y", 1, 5),
        ("sin(x)", 1, 1),
        ("x + z", 1, 5),
        ("(x + y", 1, 7),
        ("x $ y", 1, 3),
        ("exp", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as err:
        SmoothMap.parse(text, NAMES)
    assert (err.value.line, err.value.col) == (line, col)


def test_parse_error_position_offsets():
    with pytest.raises(ParseError) as err:
        SmoothMap.parse("x + + ", NAMES, line=7, col=10)
    assert err.value.line == 7 and err.value.col >= 10


def test_domain_errors():
    with pytest.raises(DomainError):
        SmoothMap.parse("log(x)", NAMES)(0.0, 1.0)
    with pytest.raises(DomainError):
        SmoothMap.parse("sqrt(x)", NAMES)(-1.0, 1.0)
    with pytest.raises(DomainError):
        SmoothMap.parse("x^0.5", NAMES)(-4.0, 1.0)
    with pytest.raises(DomainError):
        SmoothMap.parse("x^y", NAMES)(-2.0, 0.5)
    with pytest.raises(DomainError):
        SmoothMap.parse("1/x", NAMES)(0.0, 1.0)
    assert SmoothMap.parse("x^3", NAMES)(-2.0, 0.0) == -8.0
    assert SmoothMap.parse("x^y", NAMES)(-2.0, 3.0) == -8.0


def test_arity_is_checked():
    f = SmoothMap.parse("x + y", NAMES)
    assert f.arity == 2
    with pytest.raises((TypeError, ValueError)):
        f(1.0)
    with pytest.raises(ValueError):
        SmoothMap.parse("x", ("x", "x"))
