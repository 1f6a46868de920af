from fractions import Fraction

import pytest
from hypothesis import strategies as st

from hahn2d import FiniteSequence

fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9))


@st.composite
def finite_grids(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return FiniteSequence([[draw(fractions) for _ in range(c)] for _ in range(r)])


def grid_of(x, rows, cols):
    return [[x.eval(k, l) for l in range(1, cols + 1)] for k in range(1, rows + 1)]


@pytest.fixture
def rowinv():
    from hahn2d import ExprSequence
    return ExprSequence("piece(k==1, 1/l) piece(true, 0)")
