import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from hahn2d import FLOAT, ExprSequence, FiniteSequence, Window
from hahn2d import _kernels
from hahn2d.convergence import window_frontiers, window_lines, window_sums, window_sups

BACKENDS = _kernels.backend_names()
WINDOWS = (Window(8, 8), Window(16, 16), Window(40, 33), Window(64, 64))
SEQS = [ExprSequence("1/(k*l)^2", FLOAT), ExprSequence("(0-1)^(k+l)*k/(k+l)", FLOAT),
        ExprSequence("piece(k==1, 1/l) piece(true, 0)", FLOAT)]


def _random_grid(seed):
    rng = np.random.default_rng(seed)
    return FiniteSequence(rng.normal(size=(50, 37)).tolist(), FLOAT)


CASES = SEQS + [_random_grid(s) for s in range(3)]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="numba not installed")
@pytest.mark.parametrize("x", CASES, ids=lambda x: x.label[:30])
def test_backends_agree(x):
    for stat in ("hahn", "bv", "lq"):
        a = window_sums(x, WINDOWS, stat, q=2.0, backend="numba")
        b = window_sums(x, WINDOWS, stat, q=2.0, backend="numpy")
        np.testing.assert_allclose(a, b, rtol=1e-12)
    for got, want in zip(window_sups(x, WINDOWS, backend="numba"),
                         window_sups(x, WINDOWS, backend="numpy")):
        np.testing.assert_array_equal(got, want)
    for got, want in zip(window_frontiers(x, WINDOWS, backend="numba"),
                         window_frontiers(x, WINDOWS, backend="numpy")):
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)
    for got, want in zip(window_lines(x, WINDOWS, backend="numba"),
                         window_lines(x, WINDOWS, backend="numpy")):
        np.testing.assert_allclose(got, want, rtol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_window_sums_match_direct_sums(backend):
    x = _random_grid(7)
    g = np.asarray(x.values(65, 65), dtype=float)
    d = np.abs(g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:] + g[1:, 1:])
    kl = np.outer(np.arange(1, 65), np.arange(1, 65))
    sums = window_sums(x, WINDOWS, "hahn", backend=backend)
    for w, s in zip(WINDOWS, sums):
        assert s == pytest.approx((kl * d)[:w.rows, :w.cols].sum(), rel=1e-12)
    sups, ak, al = window_sups(x, WINDOWS, backend=backend)
    for w, s, k, l in zip(WINDOWS, sups, ak, al):
        block = np.abs(g[:w.rows, :w.cols])
        assert s == block.max() and abs(g[k - 1, l - 1]) == s


def test_env_flag_selects_numpy():
    code = "from hahn2d import _kernels; print(_kernels.USE_NUMBA)"
    env = dict(os.environ, HAHN2D_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"


def test_fallback_gives_same_verdicts():
    code = ("from hahn2d import *; from hahn2d.corpus import *; "
            "print(hahn_norm(ExprSequence('piece(k==1, 1) piece(true, 0)')).verdict, "
            "bp_limit(ExprSequence('1 + 1/(k+l)', FLOAT)).value)")
    env = dict(os.environ, HAHN2D_DISABLE_NUMBA="1")
    slow = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    fast = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert slow.returncode == 0, slow.stderr
    (v1, x1), (v2, x2) = (r.stdout.split() for r in (slow, fast))
    assert v1 == v2
    assert float(x1) == pytest.approx(float(x2), abs=1e-9)
