from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hahn2d.expr import (BinOp, BoolConst, BoolOp, Compare, EvaluationError, ExprSyntaxError, Neg,
                         Num, Piecewise, Var, evaluate, evaluate_array, parse, pretty, variables_of)

leaves = st.one_of(st.builds(Num, st.integers(0, 20)), st.sampled_from([Var("k"), Var("l")]))


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/"]), children, children),
        st.builds(lambda b, e: BinOp("^", b, Num(e)), children, st.integers(0, 3)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)
compares = st.builds(Compare, st.sampled_from(["==", "<=", "<", ">=", ">"]), trees, trees)
conds = st.recursive(compares, lambda c: st.builds(BoolOp, st.sampled_from(["and", "or"]), c, c),
                     max_leaves=3)
piecewise = st.builds(lambda ps, d: Piecewise(tuple(ps) + ((BoolConst(True), d),)),
                      st.lists(st.tuples(conds, trees), max_size=3), trees)


@given(trees)
def test_pretty_parse_round_trip(tree):
    assert parse(pretty(tree)) == tree


@given(piecewise)
def test_piecewise_round_trip(tree):
    assert parse(pretty(tree)) == tree


@given(trees, st.integers(1, 6), st.integers(1, 6))
def test_vectorised_agrees_with_exact(tree, k, l):
    try:
        exact = evaluate(tree, {"k": k, "l": l})
    except EvaluationError:
        return
    try:
        approx = evaluate_array(tree, {"k": np.array([k]), "l": np.array([l])})[0]
    except EvaluationError:
        pytest.fail("vectorised evaluation rejected an index that evaluates exactly")
    if abs(float(exact)) < 1e12:
        assert approx == pytest.approx(float(exact), rel=1e-9, abs=1e-9)


def test_precedence():
    assert evaluate(parse("2+3*4"), {"k": 1, "l": 1}) == 14
    assert evaluate(parse("-2^2"), {"k": 1, "l": 1}) == -4
    assert evaluate(parse("2^3^2"), {"k": 1, "l": 1}) == 512
    assert evaluate(parse("1/(k*l)"), {"k": 2, "l": 3}) == Fraction(1, 6)


def test_piecewise_first_match_wins():
    tree = parse("piece(k==1, 1/l) piece(k<=2, 5) piece(true, 0)")
    assert evaluate(tree, {"k": 1, "l": 4}) == Fraction(1, 4)
    assert evaluate(tree, {"k": 2, "l": 4}) == 5
    assert evaluate(tree, {"k": 3, "l": 4}) == 0


def test_parenthesised_conditions():
    tree = parse("piece((k==1 or l==1) and k<3, 1) piece(true, 0)")
    assert evaluate(tree, {"k": 1, "l": 9}) == 1
    assert evaluate(tree, {"k": 4, "l": 1}) == 0


def test_missing_default_piece():
    with pytest.raises(ExprSyntaxError, match="default"):
        parse("piece(k==1, 1)")


@pytest.mark.parametrize("text,pos", [("1/(k*l", 6), ("k+", 2), ("k l", 2), ("", 0)])
def test_syntax_error_position(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.pos == pos


def test_unknown_variable():
    with pytest.raises(ExprSyntaxError, match="unknown variable"):
        parse("k*z")
    assert variables_of(parse("m*k+n", ("m", "n", "k", "l"))) == {"m", "n", "k"}


def test_evaluation_errors_carry_index():
    with pytest.raises(EvaluationError) as info:
        evaluate(parse("1/(k-l)"), {"k": 3, "l": 3})
    assert info.value.index == (3, 3)
    with pytest.raises(EvaluationError) as info:
        evaluate_array(parse("1/(k-l)"), {"k": np.arange(1, 4)[:, None], "l": np.arange(1, 4)[None, :]})
    assert info.value.index == (1, 1)
    with pytest.raises(EvaluationError, match="exponent"):
        evaluate(parse("2^(0-k)"), {"k": 1, "l": 1})
