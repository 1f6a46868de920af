import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahn2d import (FLOAT, ExprMatrix, ExprSequence, FiniteMatrix, FiniteSequence, ModeError,
                    SpaceId, abel_double_summation, apply, e, e_block, e_unit, hahn_coefficients,
                    make_B, make_D, make_E, make_F, make_T, member, partial_sum, zero)

from conftest import finite_grids, fractions


@st.composite
def finite_matrices(draw, side=3):
    shape = [draw(st.integers(1, side)) for _ in range(4)]
    vals = draw(st.lists(fractions, min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    return FiniteMatrix(np.array(vals, dtype=object).reshape(shape))


def _sum(vals):
    return sum(vals, Fraction(0))


def test_T_entries():
    T = make_T()
    assert T.entry(2, 3, 1, 1) == Fraction(1, 6)
    assert T.entry(2, 3, 3, 1) == 0
    assert T.row(4, 1).eval(4, 1) == Fraction(1, 4)


def test_apply_T_examples():
    Te = apply(make_T(), e())
    assert all(Te.eval(m, n) == 1 for m in range(1, 33) for n in range(1, 33))
    Tu = apply(make_T(), e_unit(1, 1))
    assert all(Tu.eval(m, n) == Fraction(1, m * n) for m in range(1, 6) for n in range(1, 6))
    assert Tu.verdict(3, 2).holds


@settings(max_examples=30)
@given(finite_grids())
def test_apply_T_gives_corner_averages(x):
    Tx = apply(make_T(), x)
    for m, n in itertools.product(range(1, 7), repeat=2):
        assert Tx.eval(m, n) == Fraction(partial_sum(x, m, n)) / (m * n)


def test_apply_identity_like_matrix():
    ident = ExprMatrix("piece(k==m and l==n, 1) piece(true, 0)")
    x = FiniteSequence([[1, Fraction(2, 3)], [-4, 5]])
    Gx = apply(ident, x)
    assert all(Gx.eval(m, n) == x.eval(m, n) for m in range(1, 5) for n in range(1, 5))
    grid = np.zeros((2, 2, 2, 2), dtype=object)
    for m, n in itertools.product(range(2), repeat=2):
        grid[m, n, m, n] = 1
    assert apply(FiniteMatrix(grid), x) == x


def test_apply_rejects_mode_mix():
    with pytest.raises(ModeError):
        apply(make_T(), e(FLOAT))


def test_P_membership_matches_T_transform():
    for x in (FiniteSequence([[1, -1], [2, 0]]), e_unit(2, 2), zero()):
        p = member(x, SpaceId("P", "bp"))
        cs = member(apply(make_T(), x), SpaceId("CS", "bp"))
        assert p.outcome == cs.outcome


def test_D_examples():
    D = make_D(e_unit(1, 1))
    assert D.entry(1, 1, 2, 3) == Fraction(1, 6)
    assert D.entry(2, 1, 2, 3) == 0
    assert all(make_D(zero()).entry(*i) == 0 for i in itertools.product(range(1, 3), repeat=4))


@settings(max_examples=30)
@given(finite_grids(4, 4), finite_grids(4, 4))
def test_D_identity(a, x):
    D, y = make_D(a), hahn_coefficients(x)
    for m, n in itertools.product(range(1, 6), repeat=2):
        dy = _sum(D.entry(m, n, k, l) * y.eval(k, l) for k in range(m, 6) for l in range(n, 6))
        assert dy == a.eval(m, n) * x.eval(m, n)


def test_B_examples():
    B = make_B(e())
    assert B.entry(3, 3, 2, 3) == 1
    assert B.entry(3, 3, 4, 1) == 0
    assert make_B(zero()).entry(2, 2, 1, 1) == 0


@settings(max_examples=30)
@given(finite_grids(4, 4), finite_grids(4, 4))
def test_B_entries_and_identity_outside_support(a, x):
    B, y = make_B(a), hahn_coefficients(x)
    r, c = x.support
    for m, n in itertools.product(range(max(r, 1), 6), range(max(c, 1), 6)):
        for k, l in itertools.product(range(1, m + 1), range(1, n + 1)):
            corner = _sum(a.eval(i, j) for i in range(1, k + 1) for j in range(1, l + 1))
            assert B.entry(m, n, k, l) == corner / (k * l)
        direct = _sum(a.eval(k, l) * x.eval(k, l) for k in range(1, m + 1) for l in range(1, n + 1))
        by = _sum(B.entry(m, n, k, l) * y.eval(k, l) for k in range(1, m + 1) for l in range(1, n + 1))
        assert by == direct


def test_E_examples():
    E = make_E(make_T())
    for m, n, k, l in itertools.product(range(1, 5), repeat=4):
        expected = Fraction(1, m * n) if k <= m and l <= n else 0
        assert E.entry(m, n, k, l) == expected
    assert make_E(FiniteMatrix(np.zeros((1, 1, 1, 1), dtype=object))).entry(1, 1, 1, 1) == 0


@settings(max_examples=25)
@given(finite_matrices(), finite_grids(3, 3))
def test_E_identity_where_boundary_vanishes(A, x):
    E, y = make_E(A), hahn_coefficients(x)
    r, c = x.support
    for m, n in itertools.product(range(max(r, 1), 5), range(max(c, 1), 5)):
        direct = _sum(A.entry(m, n, k, l) * x.eval(k, l)
                      for k in range(1, m + 1) for l in range(1, n + 1))
        ey = _sum(E.entry(m, n, k, l) * y.eval(k, l)
                  for k in range(1, m + 1) for l in range(1, n + 1))
        assert ey == direct


def test_F_examples():
    assert all(make_F(ExprMatrix("k*l")).entry(*i) == 0
               for i in itertools.product(range(1, 4), repeat=4))
    single = np.zeros((1, 1, 1, 1), dtype=object)
    single[0, 0, 0, 0] = 1
    assert make_F(FiniteMatrix(single)).entry(1, 1, 1, 1) == 1


@settings(max_examples=25)
@given(finite_matrices(), finite_grids(3, 3))
def test_F_identity(A, x):
    F = make_F(A)
    Ax, Fx = apply(A, x), apply(F, x)
    for m, n in itertools.product(range(1, 5), repeat=2):
        d = Ax.eval(m, n) - Ax.eval(m + 1, n) - Ax.eval(m, n + 1) + Ax.eval(m + 1, n + 1)
        assert Fx.eval(m, n) == m * n * d


def test_abel_examples():
    a = FiniteSequence([[1, 2, 3], [Fraction(1, 2), 0, -1]])
    assert abel_double_summation(a, e_block(2, 3), 2, 3) == partial_sum(a, 2, 3)
    assert abel_double_summation(zero(), e(), 3, 3) == 0


@settings(max_examples=40)
@given(finite_grids(4, 4), finite_grids(4, 4), st.integers(1, 5), st.integers(1, 5))
def test_abel_matches_direct_sum(a, x, m, n):
    direct = _sum(a.eval(k, l) * x.eval(k, l) for k in range(1, m + 1) for l in range(1, n + 1))
    assert abel_double_summation(a, x, m, n) == direct


def test_row_sequence_and_float_grid():
    A = ExprMatrix("1/(m*n*k*l)")
    assert A.row(2, 3).eval(1, 1) == Fraction(1, 6)
    g = A.float_grid(2, 2, 3, 3)
    assert g[1, 1, 2, 2] == pytest.approx(1 / 36)
    assert np.allclose(A.values(2, 2, 3, 3).astype(float), g)
