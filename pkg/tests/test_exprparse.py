from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import polys
from ncorder.exprparse import (
    Commutator,
    Environment,
    Exp,
    Num,
    ParseError,
    Product,
    Sum,
    Sym,
    evaluate_expr,
    parse,
    tokenize,
)
from ncorder.ncalg import NCPoly, commutator, format_poly, gen


def ev(src, env=None):
    return evaluate_expr(src, env)


X, Y = NCPoly.symbol("X"), NCPoly.symbol("Y")


def test_tokens_carry_positions():
    toks = tokenize("X +\n  D(Y -> X)")
    assert [(t.kind, t.text, t.line, t.col) for t in toks[:4]] == [
        ("NAME", "X", 1, 1),
        ("OP", "+", 1, 3),
        ("KEYWORD", "D", 2, 3),
        ("OP", "(", 2, 4),
    ]
    assert toks[-1].kind == "EOF"


def test_precedence():
    assert parse("X + Y*X") == Sum(Sym("X"), Product(Sym("Y"), Sym("X")), 1)
    assert ev("2*X - -Y*X") == 2 * X + Y * X
    assert ev("1 - X - Y") == 1 - X - Y


def test_rationals_and_time_labels():
    assert parse("3/4") == Num(Fraction(3, 4))
    assert ev("1/2*A@3") == NCPoly.word((gen("A", time=3),)) / 2


def test_commutator_and_exp():
    assert isinstance(parse("[X, Y]"), Commutator)
    assert ev("[X, [X, Y]]") == commutator(X, commutator(X, Y))
    assert parse("exp(X; 2)") == Exp(Sym("X"), 2)
    assert ev("exp(X + Y; 2)") == 1 + X + Y + (X + Y) * (X + Y) / 2


def test_orderings():
    assert ev("T[x1*x3*x2]") == NCPoly.word((gen("x3"), gen("x2"), gen("x1")))
    assert ev("N[Y*X*Y]") == X * Y * Y
    env = Environment()
    env.declare("P", "perm:2,1")
    assert ev("P[x1*x2]", env) == NCPoly.word((gen("x2"), gen("x1")))


def test_derivative():
    assert ev("D([X,Y] -> X)(X*X)") == commutator(X, Y) * X + X * commutator(X, Y)
    assert ev("D(1 -> Y)(X + Y)") == NCPoly.one()


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("X +", 1, 4),
        ("(X", 1, 3),
        ("X $ Y", 1, 3),
        ("exp(X)", 1, 6),
        ("1/0", 1, 3),
        ("Q[X]", 1, 1),
        ("X\n  * ]", 2, 5),
        ("[X Y]", 1, 4),
        ("D(X Y)(X)", 1, 5),
    ],
)
def test_errors_are_located(src, line, col):
    with pytest.raises(ParseError) as info:
        ev(src)
    assert (info.value.line, info.value.col) == (line, col)


def test_bound_symbols():
    env = Environment(symbols={"X"})
    assert ev("X*X", env) == X * X
    with pytest.raises(ValueError):
        ev("X*Y", env)


@settings(max_examples=80, deadline=None)
@given(polys())
def test_format_roundtrip(p):
    assert ev(format_poly(p)) == p


def test_deterministic():
    src = "1/3*[A, B*C] - T[x2*x1]"
    assert parse(src) == parse(src)
    assert format_poly(ev(src)) == format_poly(ev(src))
