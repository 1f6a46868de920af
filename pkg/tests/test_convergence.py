import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from hahn2d import (FLOAT, ExprSequence, FiniteSequence, LimitSpec, Window, bp_limit,
                    bounded_partial_sums, conjunction, e, e_unit, pringsheim_limit, r_limit,
                    series_theta_sum, sup_norm, theta_limit, Holds, Fails, Inconclusive)
from hahn2d.convergence import neville_at_zero

from conftest import finite_grids

ROW_ONES = "piece(k==1, 1) piece(true, 0)"


def test_limitspec_validation():
    with pytest.raises(ValueError):
        LimitSpec(windows=())
    with pytest.raises(ValueError):
        LimitSpec(mode="q")
    with pytest.raises(ValueError):
        LimitSpec(windows=((4, 4), (4, 8)))
    spec = LimitSpec.ending_at(Window(64, 64), count=3)
    assert spec.windows == (Window(16, 16), Window(32, 32), Window(64, 64))


def test_pringsheim_examples():
    assert pringsheim_limit(e()).value == 1
    v = pringsheim_limit(FiniteSequence([[3, -1], [0, 5]]))
    assert v.holds and v.value == 0 and v.exact
    assert pringsheim_limit(ExprSequence(ROW_ONES)).value == 0


def test_pringsheim_rejects_divergence():
    assert pringsheim_limit(ExprSequence("k+l")).fails
    assert pringsheim_limit(ExprSequence("(0-1)^(k+l)")).fails


def test_bp_examples():
    assert bp_limit(e()).value == 1
    v = bp_limit(ExprSequence("piece(l==1, k) piece(true, 0)"))
    assert v.fails and v.witness[1] == 1
    assert bp_limit(e_unit(4, 4)).value == 0


def test_r_examples():
    assert r_limit(e()).value == 1
    assert r_limit(e_unit(2, 7)).value == 0
    v = r_limit(ExprSequence("piece(k==1, (0-1)^l) piece(true, 0)"))
    assert v.fails
    assert v.witness == ("row", 1)


def test_sup_norm_examples():
    assert sup_norm(e()).value == 1
    assert sup_norm(FiniteSequence([[3, -7], [2, 0]])).value == 7
    assert sup_norm(ExprSequence("k")).fails


def test_series_examples():
    assert series_theta_sum(e_unit(2, 3)).value == 1
    tele = ExprSequence("piece(k==1, 1/(l*(l+1))) piece(true, 0)")
    assert series_theta_sum(tele).value == 1
    diag = ExprSequence("piece(k==l, 1/(k*l)) piece(true, 0)", FLOAT)
    spec = LimitSpec(windows=tuple((625 * 2 ** i, 625 * 2 ** i) for i in range(5)), tol=1e-6)
    v = series_theta_sum(diag, spec)
    assert v.holds and v.value == pytest.approx(math.pi ** 2 / 6, abs=1e-4)


def test_series_of_ones_diverges():
    assert series_theta_sum(e()).fails
    assert bounded_partial_sums(e()).fails


def test_theta_dispatch():
    x = ExprSequence("piece(k==1, (0-1)^l) piece(true, 0)")
    assert theta_limit(x, LimitSpec(mode="p")).holds
    assert theta_limit(x, LimitSpec(mode="r")).fails


def test_neville_recovers_linear_limit():
    h = [1 / 16, 1 / 32, 1 / 64]
    assert neville_at_zero(h, [2 + 3 * t for t in h]) == pytest.approx(2)


def test_conjunction_is_kleene():
    h, f, i = Holds(1), Fails((1, 1)), Inconclusive()
    assert conjunction([h, h]).holds
    assert conjunction([h, i]).inconclusive
    assert conjunction([i, f, h]).fails


CORPUS = [
    e(), e_unit(3, 1), ExprSequence(ROW_ONES), ExprSequence("1/(k*l)"),
    ExprSequence("piece(k==1, (0-1)^l) piece(true, 0)"),
    ExprSequence("piece(l==1, k) piece(true, 0)"), ExprSequence("k+l"),
    ExprSequence("1 + 1/(k+l)"), ExprSequence("(0-1)^(k+l)"),
]


@pytest.mark.parametrize("x", CORPUS, ids=lambda x: getattr(x, "text", repr(x)))
def test_mode_monotonicity(x):
    r = r_limit(x)
    bp = bp_limit(x)
    p = pringsheim_limit(x)
    if r.holds:
        assert bp.holds and bp.value == r.value
    if bp.holds:
        assert p.holds and p.value == bp.value


@settings(max_examples=40)
@given(finite_grids())
def test_finite_input_is_decided_exactly(x):
    for fn in (pringsheim_limit, bp_limit, r_limit, sup_norm, series_theta_sum,
               bounded_partial_sums):
        v = fn(x)
        assert not v.inconclusive
        assert v.exact
    assert series_theta_sum(x).value == sum(x.eval(k, l) for k in range(1, 6) for l in range(1, 6))
    assert sup_norm(x).value == max(abs(x.eval(k, l)) for k in range(1, 6) for l in range(1, 6))


@settings(max_examples=20)
@given(finite_grids())
def test_verdicts_are_deterministic(x):
    assert str(bp_limit(x)) == str(bp_limit(x))
    assert series_theta_sum(x).value == series_theta_sum(FiniteSequence(x.grid)).value


def test_rational_recognition_on_closed_forms():
    v = series_theta_sum(ExprSequence("piece(k<=2, 1/(l*(l+1))) piece(true, 0)"))
    assert v.value == 2 and isinstance(v.value, (int, Fraction))
