"""Double sequences x = (x_kl), k, l >= 1, and their elementary transforms.

A sequence is evaluable at any index pair.  Three kinds exist:

* :class:`FiniteSequence` -- a grid of scalars with origin (1, 1), zero outside;
* :class:`ExprSequence` -- a closed form in the piecewise mini-language;
* special tags ``e``, ``e_row``, ``e_col``, ``e_unit``, ``e_block``.

Transforms of finitely supported input are computed eagerly and stay finite;
transforms of anything else are lazy.  Every sequence also offers
``float_rows``, a vectorised float64 view used by the window scans.

Scalars are either exact (``int``/``Fraction``; mode ``"rational"``) or
``float`` (mode ``"float"``).  Combining the two modes raises
:class:`ModeError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from . import expr as _expr
from .expr import EvaluationError

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

__all__ = [
    "RATIONAL", "FLOAT", "ModeError", "WindowError", "EvaluationError", "Window",
    "DoubleSequence", "FiniteSequence", "ExprSequence", "LazySequence",
    "to_scalar", "common_mode", "exact_sum",
    "e", "e_row", "e_col", "e_unit", "e_block", "zero", "special",
    "delta11", "delta10", "delta01", "section", "partial_sum", "residual",
    "integrate", "differentiate", "hahn_coefficients", "absolute", "partial_sums",
    "corner_averages", "CumulativeView", "scale",
]


class ModeError(ValueError):
    """Rational and float scalars were mixed in one computation."""


class WindowError(ValueError):
    """A window is too small for an exact operation."""


@dataclass(frozen=True)
class Window:
    """Index rectangle [1..rows] x [1..cols]."""

    rows: int
    cols: int

    def __post_init__(self):
        for v in (self.rows, self.cols):
            if not isinstance(v, Integral) or v < 1:
                raise ValueError(f"window dimensions must be positive integers, got {v!r}")

    @classmethod
    def parse(cls, text):
        try:
            r, c = text.lower().split("x")
            return cls(int(r), int(c))
        except (ValueError, AttributeError):
            raise ValueError(f"window must look like MxN, got {text!r}") from None

    def covers(self, rows, cols):
        return self.rows >= rows and self.cols >= cols

    def __str__(self):
        return f"{self.rows}x{self.cols}"


# --- scalars ----------------------------------------------------------------

def to_scalar(value, mode):
    """Coerce `value` into the scalar type of `mode`."""
    if mode == FLOAT:
        if isinstance(value, str):
            value = Fraction(value)
        return float(value)
    if mode != RATIONAL:
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, Rational):
        f = Fraction(value)
        return int(f) if f.denominator == 1 else f
    if isinstance(value, str):
        f = Fraction(value.strip())
        return int(f) if f.denominator == 1 else f
    raise ModeError(f"{type(value).__name__} value {value!r} in rational mode")


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v.numerator)
    return v


def exact_div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero")
    if isinstance(a, int) and isinstance(b, int):
        return a // b if a % b == 0 else Fraction(a, b)
    return _norm(Fraction(a) / b)


_qdiv = np.frompyfunc(exact_div, 2, 1)
_qnorm = np.frompyfunc(_norm, 1, 1)


def exact_sum(values):
    total = 0
    for v in values:
        total += v
    return _norm(total)


def common_mode(*objs):
    modes = {o.mode for o in objs}
    if len(modes) != 1:
        raise ModeError(f"cannot mix modes {sorted(modes)}")
    return modes.pop()


def _index(i):
    if not isinstance(i, Integral) or i < 1:
        raise ValueError(f"indices start at 1, got {i!r}")
    return int(i)


def _zero(mode):
    return 0 if mode == RATIONAL else 0.0


def _kl_weights(rows, cols, r0=0, mode=FLOAT):
    ks = np.arange(r0 + 1, r0 + rows + 1)
    ls = np.arange(1, cols + 1)
    if mode == RATIONAL:
        return np.outer(ks.astype(object), ls.astype(object))
    return np.outer(ks.astype(np.float64), ls.astype(np.float64))


# --- base class -----------------------------------------------------------

class DoubleSequence:
    """Evaluable map (k, l) -> scalar on k, l >= 1."""

    mode = RATIONAL
    support = None  # (rows, cols) bounding the nonzero entries, None if not finite
    label = "x"

    @property
    def is_finite(self):
        return self.support is not None

    def eval(self, k, l):
        return self._entry(_index(k), _index(l))

    __call__ = eval

    def _entry(self, k, l):
        raise NotImplementedError

    def values(self, rows, cols):
        """Grid of x_kl for k <= rows, l <= cols in the sequence's own mode."""
        dtype = object if self.mode == RATIONAL else np.float64
        out = np.empty((rows, cols), dtype=dtype)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = self._entry(i + 1, j + 1)
        return out

    def float_rows(self, r0, r1, ncols):
        """float64 grid of x_kl for r0 < k <= r1 and 1 <= l <= ncols."""
        out = np.empty((r1 - r0, ncols))
        for i in range(r1 - r0):
            for j in range(ncols):
                out[i, j] = float(self._entry(r0 + i + 1, j + 1))
        return out

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        return _combine(self, other, "+")

    def __sub__(self, other):
        return _combine(self, other, "-")

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, c):
        if isinstance(c, DoubleSequence):
            return NotImplemented
        return scale(self, c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, DoubleSequence):
            return NotImplemented
        c = to_scalar(c, self.mode)
        inv = exact_div(1, c) if self.mode == RATIONAL else 1.0 / c
        return scale(self, inv)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label} ({self.mode})>"


# --- concrete kinds ---------------------------------------------------------

class FiniteSequence(DoubleSequence):
    """Finitely supported sequence given by a grid with origin (1, 1)."""

    def __init__(self, data, mode=RATIONAL, tag=None, label=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        raw = np.array(data, dtype=object)
        if raw.ndim == 1 and raw.size == 0:
            raw = raw.reshape(0, 0)
        if raw.ndim != 2:
            raise ValueError("grid must be two-dimensional")
        grid = np.empty(raw.shape, dtype=object if mode == RATIONAL else np.float64)
        for idx, v in np.ndenumerate(raw):
            grid[idx] = to_scalar(v, mode)
        nz = np.argwhere(grid != 0)
        if nz.size:
            rows, cols = int(nz[:, 0].max()) + 1, int(nz[:, 1].max()) + 1
        else:
            rows = cols = 0
        self.mode = mode
        self._grid = grid[:rows, :cols]
        self.support = (rows, cols)
        self.tag = tag
        self.label = label or tag or f"grid{rows}x{cols}"

    @classmethod
    def _wrap(cls, grid, mode, label=None, tag=None):
        # grid already holds scalars of `mode`; skip per-entry coercion
        obj = cls.__new__(cls)
        grid = np.asarray(grid, dtype=object if mode == RATIONAL else np.float64)
        if mode == RATIONAL:
            grid = _qnorm(grid).astype(object) if grid.size else grid
        nz = np.argwhere(grid != 0)
        if nz.size:
            rows, cols = int(nz[:, 0].max()) + 1, int(nz[:, 1].max()) + 1
        else:
            rows = cols = 0
        obj.mode = mode
        obj._grid = grid[:rows, :cols]
        obj.support = (rows, cols)
        obj.tag = tag
        obj.label = label or tag or f"grid{rows}x{cols}"
        return obj

    @property
    def grid(self):
        return self._grid.copy()

    def _entry(self, k, l):
        r, c = self.support
        if k <= r and l <= c:
            return self._grid[k - 1, l - 1]
        return _zero(self.mode)

    def values(self, rows, cols):
        if self.mode == RATIONAL:
            out = np.zeros((rows, cols), dtype=object)
            out[...] = 0
        else:
            out = np.zeros((rows, cols))
        r = min(rows, self.support[0])
        c = min(cols, self.support[1])
        out[:r, :c] = self._grid[:r, :c]
        return out

    def float_rows(self, r0, r1, ncols):
        out = np.zeros((r1 - r0, ncols))
        r, c = self.support
        lo, hi = r0, min(r1, r)
        cc = min(ncols, c)
        if lo < hi and cc > 0:
            out[:hi - lo, :cc] = self._grid[lo:hi, :cc].astype(np.float64)
        return out

    def __eq__(self, other):
        if not isinstance(other, FiniteSequence):
            return NotImplemented
        return (self.mode == other.mode and self.support == other.support
                and bool(np.all(self._grid == other._grid)))

    __hash__ = None


class ExprSequence(DoubleSequence):
    """Closed-form sequence in the variables k, l."""

    def __init__(self, source, mode=RATIONAL, label=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if isinstance(source, str):
            self.text = source
            self.expr = _expr.parse(source, _expr.SEQUENCE_VARS)
        else:
            self.expr = source
            self.text = _expr.pretty(source)
        self.mode = mode
        self.label = label or self.text

    def _entry(self, k, l):
        v = _expr.evaluate(self.expr, {"k": k, "l": l})
        return float(v) if self.mode == FLOAT else v

    def values(self, rows, cols):
        if self.mode == FLOAT:
            return self.float_rows(0, rows, cols)
        return super().values(rows, cols)

    def float_rows(self, r0, r1, ncols):
        ks = np.arange(r0 + 1, r1 + 1, dtype=np.int64)[:, None]
        ls = np.arange(1, ncols + 1, dtype=np.int64)[None, :]
        return _expr.evaluate_array(self.expr, {"k": ks, "l": ls})


class _Indicator(DoubleSequence):
    """Infinite 0/1 special sequences: e, e_row(k0), e_col(l0)."""

    def __init__(self, tag, params, mode):
        self.tag = tag
        self.params = params
        self.mode = mode
        self.label = tag if not params else f"{tag}({','.join(map(str, params))})"

    def _hit(self, k, l):
        if self.tag == "e":
            return np.ones(np.broadcast_shapes(np.shape(k), np.shape(l)), dtype=bool)
        if self.tag == "e_row":
            return np.broadcast_to(k == self.params[0], np.broadcast_shapes(np.shape(k), np.shape(l)))
        return np.broadcast_to(l == self.params[0], np.broadcast_shapes(np.shape(k), np.shape(l)))

    def _entry(self, k, l):
        one = 1 if self.mode == RATIONAL else 1.0
        return one if bool(self._hit(k, l)) else _zero(self.mode)

    def float_rows(self, r0, r1, ncols):
        ks = np.arange(r0 + 1, r1 + 1)[:, None]
        ls = np.arange(1, ncols + 1)[None, :]
        return self._hit(ks, ls).astype(np.float64)

    def values(self, rows, cols):
        grid = self.float_rows(0, rows, cols)
        if self.mode == RATIONAL:
            return grid.astype(np.int64).astype(object)
        return grid


class LazySequence(DoubleSequence):
    """Sequence defined by an entry function and a vectorised row function."""

    def __init__(self, label, mode, entry, rows_fn, support=None):
        self.label = label
        self.mode = mode
        self._entry_fn = entry
        self._rows_fn = rows_fn
        self.support = support

    def _entry(self, k, l):
        return self._entry_fn(k, l)

    def float_rows(self, r0, r1, ncols):
        return self._rows_fn(r0, r1, ncols)


# --- special sequences -----------------------------------------------------

def e(mode=RATIONAL):
    return _Indicator("e", (), mode)


def e_row(k0, mode=RATIONAL):
    return _Indicator("e_row", (_index(k0),), mode)


def e_col(l0, mode=RATIONAL):
    return _Indicator("e_col", (_index(l0),), mode)


def e_unit(k0, l0, mode=RATIONAL):
    k0, l0 = _index(k0), _index(l0)
    grid = np.zeros((k0, l0), dtype=int)
    grid[k0 - 1, l0 - 1] = 1
    return FiniteSequence(grid, mode, tag=f"e_unit({k0},{l0})")


def e_block(m, n, mode=RATIONAL):
    m, n = _index(m), _index(n)
    return FiniteSequence(np.ones((m, n), dtype=int), mode, tag=f"e_block({m},{n})")


def zero(mode=RATIONAL):
    return FiniteSequence(np.zeros((0, 0)), mode, tag="zero")


_SPECIAL = {"e": (e, 0), "e_row": (e_row, 1), "e_col": (e_col, 1),
            "e_unit": (e_unit, 2), "e_block": (e_block, 2), "zero": (zero, 0)}


def special(tag, *params, mode=RATIONAL):
    """Build a special sequence from its tag, e.g. ``special("e_unit", 2, 5)``."""
    try:
        fn, arity = _SPECIAL[tag]
    except KeyError:
        raise ValueError(f"unknown special sequence {tag!r}") from None
    if len(params) != arity:
        raise ValueError(f"{tag} takes {arity} parameter(s), got {len(params)}")
    return fn(*params, mode=mode)


# --- arithmetic -------------------------------------------------------------

def _combine(x, y, op):
    if not isinstance(y, DoubleSequence):
        return NotImplemented
    mode = common_mode(x, y)
    sign = 1 if op == "+" else -1
    if x.is_finite and y.is_finite:
        r = max(x.support[0], y.support[0])
        c = max(x.support[1], y.support[1])
        return FiniteSequence._wrap(x.values(r, c) + sign * y.values(r, c), mode)
    return LazySequence(
        f"({x.label} {op} {y.label})", mode,
        lambda k, l: _norm(x._entry(k, l) + sign * y._entry(k, l)),
        lambda r0, r1, nc: x.float_rows(r0, r1, nc) + sign * y.float_rows(r0, r1, nc),
    )


def scale(x, c):
    c = to_scalar(c, x.mode)
    if x.is_finite:
        r, cc = x.support
        return FiniteSequence._wrap(x.values(r, cc) * c, x.mode)
    fc = float(c)
    return LazySequence(f"{c}*{x.label}", x.mode,
                        lambda k, l: _norm(c * x._entry(k, l)),
                        lambda r0, r1, nc: fc * x.float_rows(r0, r1, nc))


def absolute(x):
    if x.is_finite:
        r, c = x.support
        return FiniteSequence._wrap(np.abs(x.values(r, c)), x.mode)
    return LazySequence(f"|{x.label}|", x.mode, lambda k, l: abs(x._entry(k, l)),
                        lambda r0, r1, nc: np.abs(x.float_rows(r0, r1, nc)))


# --- differences ----------------------------------------------------------

def delta11(x):
    """(Δx)_kl = x_kl - x_{k+1,l} - x_{k,l+1} + x_{k+1,l+1}."""
    if x.is_finite:
        r, c = x.support
        g = x.values(r + 1, c + 1)
        return FiniteSequence._wrap(g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:] + g[1:, 1:], x.mode)

    def entry(k, l):
        return _norm(x._entry(k, l) - x._entry(k + 1, l) - x._entry(k, l + 1)
                     + x._entry(k + 1, l + 1))

    def rows(r0, r1, nc):
        g = x.float_rows(r0, r1 + 1, nc + 1)
        return g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:] + g[1:, 1:]

    return LazySequence(f"Δ{x.label}", x.mode, entry, rows)


def delta10(x):
    """Row-direction difference x_kl - x_{k+1,l}."""
    if x.is_finite:
        r, c = x.support
        g = x.values(r + 1, c)
        return FiniteSequence._wrap(g[:-1, :] - g[1:, :], x.mode)

    def rows(r0, r1, nc):
        g = x.float_rows(r0, r1 + 1, nc)
        return g[:-1] - g[1:]

    return LazySequence(f"Δ10{x.label}", x.mode,
                        lambda k, l: _norm(x._entry(k, l) - x._entry(k + 1, l)), rows)


def delta01(x):
    """Column-direction difference x_kl - x_{k,l+1}."""
    if x.is_finite:
        r, c = x.support
        g = x.values(r, c + 1)
        return FiniteSequence._wrap(g[:, :-1] - g[:, 1:], x.mode)

    def rows(r0, r1, nc):
        g = x.float_rows(r0, r1, nc + 1)
        return g[:, :-1] - g[:, 1:]

    return LazySequence(f"Δ01{x.label}", x.mode,
                        lambda k, l: _norm(x._entry(k, l) - x._entry(k, l + 1)), rows)


# --- sections and sums -----------------------------------------------------

def section(x, m, n):
    """x^[m,n]: x on [1..m] x [1..n], zero elsewhere."""
    return FiniteSequence._wrap(x.values(_index(m), _index(n)), x.mode,
                                label=f"{x.label}[{m},{n}]")


def _grid_sum(g, mode):
    if mode == RATIONAL:
        return exact_sum(g.ravel().tolist())
    return math.fsum(g.ravel().tolist())


def partial_sum(x, m, n):
    """s_mn = sum of x_kl over k <= m, l <= n."""
    return _grid_sum(x.values(_index(m), _index(n)), x.mode)


def residual(x, m, n, window):
    """Sever's residual r_mn truncated to `window`: the sum of x outside the
    corner [1..m] x [1..n] but inside the window."""
    m, n = _index(m), _index(n)
    if not window.covers(m, n):
        raise WindowError(f"window {window} does not cover ({m},{n})")
    g = x.values(window.rows, window.cols)
    total = _grid_sum(g, x.mode)
    inner = _grid_sum(g[:m, :n], x.mode)
    if x.mode == RATIONAL:
        return _norm(total - inner)
    return total - inner


class CumulativeView(DoubleSequence):
    """Partial sums s_mn of x (of |x| when `absolute`), divided by mn when
    `average`.  Window scans stream these with a running carry instead of
    calling ``float_rows`` repeatedly."""

    def __init__(self, base, average=False, absolute=False):
        self.base = base
        self.average = average
        self.absolute = absolute
        self.mode = base.mode
        inner = f"|{base.label}|" if absolute else base.label
        self.label = f"{'avg' if average else 'S'}[{inner}]"

    def _entry(self, k, l):
        g = self.base.values(k, l)
        if self.absolute:
            g = np.abs(g)
        s = _grid_sum(g, self.mode)
        if not self.average:
            return s
        return exact_div(s, k * l) if self.mode == RATIONAL else s / (k * l)

    def float_rows(self, r0, r1, ncols):
        g = self.base.float_rows(0, r1, ncols)
        if self.absolute:
            g = np.abs(g)
        g = g.cumsum(axis=0).cumsum(axis=1)[r0:]
        if self.average:
            g = g / _kl_weights(r1 - r0, ncols, r0)
        return g

    def box_values(self):
        """Exact grid over the support box of a finite base (None otherwise).
        Beyond the box the partial sums repeat the box's last row/column."""
        if not self.base.is_finite:
            return None
        r, c = self.base.support
        r, c = max(r, 1), max(c, 1)
        g = self.base.values(r, c)
        if self.absolute:
            g = np.abs(g)
        s = g.cumsum(axis=0).cumsum(axis=1)
        if self.mode == RATIONAL:
            s = _qnorm(s).astype(object)
        return s


def partial_sums(x):
    """The sequence (s_mn) of partial sums."""
    return CumulativeView(x)


def corner_averages(x, absolute=False):
    """(s_mn / (mn)): the T-transform of x."""
    return CumulativeView(x, average=True, absolute=absolute)


# --- weights ----------------------------------------------------------------

def integrate(x):
    """(kl * x_kl): the map behind the integrated space ∫E."""
    if x.is_finite:
        r, c = x.support
        return FiniteSequence._wrap(x.values(r, c) * _kl_weights(r, c, mode=x.mode), x.mode)
    return LazySequence(f"kl*{x.label}", x.mode,
                        lambda k, l: _norm(k * l * x._entry(k, l)),
                        lambda r0, r1, nc: x.float_rows(r0, r1, nc) * _kl_weights(r1 - r0, nc, r0))


def differentiate(x):
    """(x_kl / (kl)): the map behind the differentiated space dE."""
    if x.is_finite:
        r, c = x.support
        g = x.values(r, c)
        w = _kl_weights(r, c, mode=x.mode)
        out = _qdiv(g, w) if x.mode == RATIONAL else g / w
        return FiniteSequence._wrap(out, x.mode)
    if x.mode == RATIONAL:
        entry = lambda k, l: exact_div(x._entry(k, l), k * l)  # noqa: E731
    else:
        entry = lambda k, l: x._entry(k, l) / (k * l)  # noqa: E731
    return LazySequence(f"{x.label}/kl", x.mode, entry,
                        lambda r0, r1, nc: x.float_rows(r0, r1, nc) / _kl_weights(r1 - r0, nc, r0))


def hahn_coefficients(x):
    """y_kl = kl * (Δx)_kl."""
    return integrate(delta11(x))
