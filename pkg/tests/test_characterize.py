import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahn2d import (ClassId, ExprMatrix, FiniteMatrix, LimitSpec, Window, apply,
                    check_condition_3_3, check_condition_3_4, check_condition_3_5, classify,
                    e_block, hahn_matrix_norm, hahn_norm, make_E, make_T, matrix_norm_report)
from hahn2d.characterize import CLASS_TAGS, check_F_reduction

from conftest import fractions


@st.composite
def finite_matrices(draw, side=3):
    shape = [draw(st.integers(1, side)) for _ in range(4)]
    vals = draw(st.lists(fractions, min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    return FiniteMatrix(np.array(vals, dtype=object).reshape(shape))


def _single():
    g = np.zeros((1, 1, 1, 1), dtype=object)
    g[0, 0, 0, 0] = 1
    return FiniteMatrix(g)


def _zero():
    return FiniteMatrix(np.zeros((1, 1, 1, 1), dtype=object))


def test_class_ids():
    assert ClassId.parse("H→Mu").tag == "H->Mu"
    assert ClassId.parse("Hθ→CSθ0", "r") == ClassId("H->CS0", "r")
    assert ClassId.parse("Cθ0 → H").tag == "C0->H"
    with pytest.raises(ValueError):
        ClassId("H->Lq")
    with pytest.raises(ValueError):
        ClassId("H->H", "q")


def test_condition_examples_on_T():
    v = check_condition_3_3(make_T())
    assert v.holds and v.value == 1
    assert check_condition_3_4(make_T()).holds
    assert check_condition_3_5(make_T()).fails


def test_condition_examples_on_finite():
    A = FiniteMatrix([[[[1, -2], [0, 3]]], [[[Fraction(1, 2), 0], [0, 0]]]])
    a, b, c = check_condition_3_3(A), check_condition_3_5(A), check_condition_3_4(A)
    assert a.holds and a.exact and a.value == 3
    assert b.holds and b.value == 3
    assert c.holds


def test_unbounded_entry_fails_with_witness():
    v = check_condition_3_3(ExprMatrix("piece(k==1 and l==1, m) piece(true, 0)"))
    assert v.fails
    m, n, k, l = v.witness
    assert (k, l) == (1, 1) and m > 1


@pytest.mark.parametrize("tag", CLASS_TAGS)
def test_zero_matrix_in_every_class(tag):
    assert classify(_zero(), tag).overall.holds


@pytest.mark.parametrize("tag", CLASS_TAGS)
def test_finite_matrix_classes_are_decided(tag):
    A = FiniteMatrix([[[[1, 2], [3, 4]]]])
    rep = classify(A, tag)
    assert not rep.overall.inconclusive
    assert all(not v.inconclusive for _, v in rep.conditions)


def test_T_against_mu_uses_transformed_matrix():
    rep = classify(make_T(), "H->Mu")
    assert rep.overall.holds
    v = rep.condition("sup-entries[E]")
    assert [w for w, _ in v.diagnostics] == ["2x2", "4x4", "8x8", "16x16", "32x32"]


def test_T_is_not_hahn_to_hahn():
    rep = classify(make_T(), "H->H")
    assert rep.condition("entries-null").holds
    assert rep.overall.fails


def test_overall_is_conjunction():
    for tag in ("H->Cbp", "H->CS", "Mu->H"):
        rep = classify(make_T(), tag)
        outs = [v.outcome for _, v in rep.conditions]
        if rep.overall.holds:
            assert all(v.holds for _, v in rep.conditions)
        elif rep.overall.fails:
            assert any(v.fails for _, v in rep.conditions)
        else:
            assert not any(v.fails for _, v in rep.conditions) and outs


@settings(max_examples=25, deadline=None)
@given(finite_matrices())
def test_mu_class_matches_bounded_entries_of_E(A):
    rep = classify(A, "H->Mu")
    direct = check_condition_3_3(make_E(A))
    assert rep.condition("sup-entries[E]").outcome == direct.outcome
    assert rep.condition("sup-entries[E]").value == direct.value
    if rep.condition("rows-in-beta-dual").holds:
        assert rep.overall.holds == direct.holds


@settings(max_examples=25, deadline=None)
@given(finite_matrices())
def test_finite_matrix_is_hahn_to_hahn_with_bruteforce_norm(A):
    rep = classify(A, "H->H")
    assert rep.overall.holds
    M, N, K, L = A.support
    side = 2 * max(max(A.support), 1)
    probe = Window(side, side)
    brute = max(hahn_norm(apply(A, e_block(k, l) * Fraction(1, k * l))).value
                for k in range(1, side + 1) for l in range(1, side + 1))
    assert hahn_matrix_norm(A, probe) == brute
    assert rep.norms["hahn_matrix_norm"] == brute


@settings(max_examples=25, deadline=None)
@given(finite_matrices())
def test_discrepancy_flag_matches_offdiagonal_contribution(A):
    side = 2 * max(max(A.support), 1)
    rep = matrix_norm_report(A, Window(side, side))
    assert rep["discrepancy"] == rep["contributing_offdiag"]
    assert rep["weighted"] >= rep["unweighted"]


def test_single_entry_norm():
    assert hahn_matrix_norm(_single(), Window(2, 2)) == 1
    assert hahn_matrix_norm(_zero(), Window(2, 2)) == 0
    with pytest.raises(ValueError):
        hahn_matrix_norm(FiniteMatrix(np.ones((3, 3, 3, 3), dtype=object)), Window(2, 2))


SUP_MATRICES = [make_T(), ExprMatrix("piece(k==1 and l==1, m) piece(true, 0)"),
                ExprMatrix("1/(m*n*k*l)"), ExprMatrix("piece(k<=m and l<=n, 1) piece(true, 0)")]


@pytest.mark.parametrize("A", SUP_MATRICES, ids=lambda A: A.label)
@pytest.mark.parametrize("tag", ["Lu->Mu", "Lu->Lu", "H->BV", "H->BS", "Lu->H", "C->H"])
def test_window_sups_are_monotone(A, tag):
    rep = classify(A, tag)
    for name, v in rep.conditions:
        vals = [s for w, s in v.diagnostics if isinstance(w, str) and "x" in w]
        if name.startswith("sup") or name.endswith("norm"):
            assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:])), (name, vals)


def test_F_reduction_on_finite():
    assert check_F_reduction(_single()).holds
