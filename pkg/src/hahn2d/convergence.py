"""Deciding θ-limits, sups and double-series sums from finite windows.

Finitely supported input is decided exactly.  Everything else is scanned in
float64 over a nested window schedule W_0 ⊂ W_1 ⊂ ... and a statistic is
recorded per window.  A small set of rules turns that trace into a
:class:`Verdict`:

* statistic above ``DIVERGENCE_THRESHOLD`` (or non-finite)    -> Fails
* increments shrinking geometrically (ratio <= ``DECAY_RATIO``) -> extrapolate
  to the zero-mesh limit (Neville in h = 1/sqrt(MN)); accept when estimates
  from overlapping point sets agree within tol
* last ``stability_count`` increments below tol                -> Holds
* increments not shrinking over the last 3 refinements          -> Fails
* anything else                                                 -> Inconclusive
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

import numpy as np

from . import _kernels
from .sequence import (RATIONAL, CumulativeView, DoubleSequence, Window, exact_sum, _qdiv,
                       _norm)

DIVERGENCE_THRESHOLD = 1e12
DECAY_RATIO = 0.75
GROWTH_RATIO = 0.95
EXTRAPOLATION_POINTS = 6
BLOCK_ENTRIES = 1 << 22
THETAS = ("p", "bp", "r")

__all__ = [
    "Outcome", "Verdict", "Holds", "Fails", "Inconclusive", "LimitSpec",
    "DEFAULT_WINDOWS", "conjunction", "format_scalar",
    "pringsheim_limit", "bp_limit", "r_limit", "theta_limit", "sup_norm",
    "series_theta_sum", "settle_series", "settle_frontier", "neville_at_zero",
    "window_sums", "window_sups", "bounded_partial_sums", "recognize_rational",
]


class Outcome(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


def format_scalar(v):
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer to a limit or sup question.

    ``exact`` is True only when the value was computed in exact arithmetic
    with no extrapolation.
    """

    outcome: Outcome
    value: Any = None
    witness: Any = None
    diagnostics: tuple = ()
    exact: bool = False
    note: str = ""

    @property
    def holds(self):
        return self.outcome is Outcome.HOLDS

    @property
    def fails(self):
        return self.outcome is Outcome.FAILS

    @property
    def inconclusive(self):
        return self.outcome is Outcome.INCONCLUSIVE

    def __str__(self):
        if self.holds:
            return f"Holds({format_scalar(self.value)})"
        if self.fails:
            return f"Fails({self.witness})"
        return "Inconclusive"


def Holds(value, exact=False, witness=None, diagnostics=(), note=""):
    return Verdict(Outcome.HOLDS, value, witness, tuple(diagnostics), exact, note)


def Fails(witness, diagnostics=(), note="", value=None, exact=False):
    return Verdict(Outcome.FAILS, value, witness, tuple(diagnostics), exact, note)


def Inconclusive(diagnostics=(), note="", value=None):
    return Verdict(Outcome.INCONCLUSIVE, value, None, tuple(diagnostics), False, note)


def conjunction(verdicts, value=None):
    """Kleene conjunction: any Fails wins, then any Inconclusive, else Holds."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.fails:
            return v
    for v in verdicts:
        if v.inconclusive:
            return v
    exact = all(v.exact for v in verdicts)
    if value is None and verdicts:
        value = verdicts[0].value
    return Holds(value, exact=exact)


def _as_window(w):
    if isinstance(w, Window):
        return w
    if isinstance(w, str):
        return Window.parse(w)
    r, c = w
    return Window(int(r), int(c))


DEFAULT_WINDOWS = tuple(Window(16 * 2 ** i, 16 * 2 ** i) for i in range(6))


@dataclass(frozen=True)
class LimitSpec:
    """θ mode, tolerance and window schedule for every window-based decision."""

    mode: str = "bp"
    tol: float = 1e-9
    windows: tuple = field(default=DEFAULT_WINDOWS)
    stability_count: int = 3

    def __post_init__(self):
        if self.mode not in THETAS:
            raise ValueError(f"mode must be one of {THETAS}, got {self.mode!r}")
        if not (self.tol >= 0 and math.isfinite(self.tol)):
            raise ValueError("tol must be a finite nonnegative number")
        if self.stability_count < 1:
            raise ValueError("stability_count must be positive")
        ws = tuple(_as_window(w) for w in self.windows)
        if not ws:
            raise ValueError("window schedule is empty")
        for a, b in zip(ws, ws[1:]):
            if not (b.rows > a.rows and b.cols > a.cols):
                raise ValueError(f"window schedule must increase strictly: {a} then {b}")
        object.__setattr__(self, "windows", ws)

    @classmethod
    def ending_at(cls, last, count=6, **kw):
        """Schedule of up to `count` halving windows ending at `last`."""
        last = _as_window(last)
        ws = []
        r, c = last.rows, last.cols
        while len(ws) < count and r >= 1 and c >= 1:
            ws.append(Window(r, c))
            if r == 1 or c == 1:
                break
            r, c = r // 2, c // 2
        return cls(windows=tuple(reversed(ws)), **kw)

    def with_mode(self, mode):
        return replace(self, mode=mode)

    @property
    def last(self):
        return self.windows[-1]

    def check_tol(self, x):
        if self.tol == 0 and not (x.is_finite and x.mode == RATIONAL):
            raise ValueError("tol = 0 requires finitely supported rational input")


# --- streaming ---------------------------------------------------------------

def _kl(r0, nrows, ncols):
    return np.outer(np.arange(r0 + 1, r0 + nrows + 1, dtype=np.float64),
                    np.arange(1, ncols + 1, dtype=np.float64))


def _stream(x, nrows, ncols):
    """Yield (r0, block): float rows r0+1 .. r0+len(block) of x, cols 1..ncols."""
    if isinstance(x, CumulativeView):
        carry = np.zeros(ncols)
        for r0, blk in _stream(x.base, nrows, ncols):
            if x.absolute:
                blk = np.abs(blk)
            blk = np.cumsum(blk, axis=1)
            np.cumsum(blk, axis=0, out=blk)
            blk += carry
            carry = blk[-1].copy()
            if x.average:
                blk = blk / _kl(r0, blk.shape[0], ncols)
            yield r0, blk
        return
    step = max(1, BLOCK_ENTRIES // max(ncols, 1))
    for r0 in range(0, nrows, step):
        r1 = min(nrows, r0 + step)
        yield r0, np.ascontiguousarray(x.float_rows(r0, r1, ncols), dtype=np.float64)


def _delta_stream(x, nrows, ncols):
    """Like _stream but each block carries one extra trailing row and column,
    as forward differences need."""
    prev = None
    for r0, blk in _stream(x, nrows + 1, ncols + 1):
        if prev is not None:
            yield prev[0], np.ascontiguousarray(np.vstack([prev[1], blk[:1]]))
        prev = (r0, blk)
    r0, blk = prev
    if blk.shape[0] > 1:
        yield r0, blk


def _buckets(windows):
    ms = np.array([w.rows for w in windows], dtype=np.int64)
    ns = np.array([w.cols for w in windows], dtype=np.int64)
    rb = np.zeros(ms[-1] + 2, dtype=np.int64)
    cb = np.zeros(ns[-1] + 2, dtype=np.int64)
    rb[1:] = np.searchsorted(ms, np.arange(1, ms[-1] + 2), side="left")
    cb[1:] = np.searchsorted(ns, np.arange(1, ns[-1] + 2), side="left")
    return rb, cb


def window_sums(x, windows, stat, q=1.0, backend=None):
    """Per-window totals of a nonnegative statistic of x.

    stat: "hahn" (kl|Δx|), "bv" (|Δx|) or "lq" (|x|^q).
    """
    windows = tuple(_as_window(w) for w in windows)
    rb, cb = _buckets(windows)
    nb = len(windows)
    M, N = windows[-1].rows, windows[-1].cols
    total = np.zeros(nb)
    if stat in ("hahn", "bv"):
        kern = _kernels.get("delta_bucket_sums", backend)
        for r0, blk in _delta_stream(x, M, N):
            total += kern(blk, r0, rb, cb, nb, stat == "hahn")
    elif stat == "lq":
        kern = _kernels.get("power_bucket_sums", backend)
        for r0, blk in _stream(x, M, N):
            total += kern(blk, r0, rb, cb, nb, float(q))
    else:
        raise ValueError(f"unknown statistic {stat!r}")
    return np.cumsum(total)


def window_sups(x, windows, backend=None):
    """Per-window sup |x_kl| with the index attaining it."""
    windows = tuple(_as_window(w) for w in windows)
    rb, cb = _buckets(windows)
    nb = len(windows)
    M, N = windows[-1].rows, windows[-1].cols
    kern = _kernels.get("abs_bucket_max", backend)
    best = np.full(nb, -1.0)
    ak = np.zeros(nb, dtype=np.int64)
    al = np.zeros(nb, dtype=np.int64)
    for r0, blk in _stream(x, M, N):
        b, k, l = kern(blk, r0, rb, cb, nb, False)
        better = b > best
        best[better], ak[better], al[better] = b[better], k[better], l[better]
    for i in range(1, nb):
        if not best[i] > best[i - 1]:
            best[i], ak[i], al[i] = best[i - 1], ak[i - 1], al[i - 1]
    return best, ak, al


def _frontier_bounds(windows):
    lo_r = np.array([w.rows // 2 for w in windows], dtype=np.int64)
    hi_r = np.array([w.rows for w in windows], dtype=np.int64)
    lo_c = np.array([w.cols // 2 for w in windows], dtype=np.int64)
    hi_c = np.array([w.cols for w in windows], dtype=np.int64)
    return lo_r, hi_r, lo_c, hi_c


def window_frontiers(x, windows, backend=None):
    """Oscillation, mean and max modulus of x over each window's frontier
    quadrant (M/2, M] x (N/2, N]."""
    windows = tuple(_as_window(w) for w in windows)
    nb = len(windows)
    M, N = windows[-1].rows, windows[-1].cols
    bounds = _frontier_bounds(windows)
    mx = np.full(nb, -np.inf)
    mn = np.full(nb, np.inf)
    sm = np.zeros(nb)
    cnt = np.zeros(nb, dtype=np.int64)
    kern = _kernels.get("frontier_update", backend)
    for r0, blk in _stream(x, M, N):
        kern(blk, r0, *bounds, mx, mn, sm, cnt)
    return mx - mn, sm / np.maximum(cnt, 1), np.maximum(np.abs(mx), np.abs(mn))


def window_lines(x, windows, backend=None):
    """Tail oscillation of every row (over cols (N/2, N]) and every column
    (over rows (M/2, M]) for each window; shapes (M, nb) and (nb, N)."""
    windows = tuple(_as_window(w) for w in windows)
    nb = len(windows)
    M, N = windows[-1].rows, windows[-1].cols
    lo_r, hi_r, lo_c, hi_c = _frontier_bounds(windows)
    row_osc = np.zeros((M, nb))
    col_max = np.full((nb, N), -np.inf)
    col_min = np.full((nb, N), np.inf)
    kern = _kernels.get("line_osc_update", backend)
    for r0, blk in _stream(x, M, N):
        kern(blk, r0, lo_r, hi_r, lo_c, hi_c, row_osc, col_max, col_min)
    col_osc = np.where(np.isfinite(col_max), col_max - col_min, 0.0)
    return row_osc, col_osc


# --- decision rules ---------------------------------------------------------

def neville_at_zero(h, v):
    """Value at h = 0 of the polynomial through the points (h_i, v_i)."""
    p = [float(t) for t in v]
    h = [float(t) for t in h]
    n = len(p)
    for j in range(1, n):
        for i in range(n - j):
            p[i] = (h[i + j] * p[i] - h[i] * p[i + 1]) / (h[i + j] - h[i])
    return p[0]


def _mesh(windows):
    return [1.0 / math.sqrt(w.rows * w.cols) for w in windows]


def _ratios(d):
    out = []
    for a, b in zip(d, d[1:]):
        a, b = abs(a), abs(b)
        if a == 0:
            out.append(0.0 if b == 0 else math.inf)
        else:
            out.append(b / a)
    return out


def _extrapolate(windows, values, tol):
    n = min(EXTRAPOLATION_POINTS, len(values))
    if n < 3:
        return None
    h = _mesh(windows)[-n:]
    v = list(values)[-n:]
    full = neville_at_zero(h, v)
    sub = neville_at_zero(h[1:], v[1:])
    if math.isfinite(full) and abs(full - sub) <= tol * max(1.0, abs(full)):
        return full + 0.0
    return None


def _diag(windows, values):
    return tuple((str(w), float(v)) for w, v in zip(windows, values))


def settle_series(windows, values, spec, growth_witness=None, label="partial sums"):
    """Decide the limit of a trace of cumulative window statistics."""
    windows = tuple(windows)
    values = [float(v) for v in values]
    diag = _diag(windows, values)
    for w, v in zip(windows, values):
        if not math.isfinite(v) or abs(v) > DIVERGENCE_THRESHOLD:
            return Fails(growth_witness or w, diag, f"{label} exceed {DIVERGENCE_THRESHOLD:g}")
    d = [b - a for a, b in zip(values, values[1:])]
    rho = _ratios(d)
    if len(rho) >= 2 and all(r <= DECAY_RATIO for r in rho[-2:]):
        est = _extrapolate(windows, values, spec.tol)
        if est is not None:
            return Holds(est, diagnostics=diag, note="extrapolated")
    k = spec.stability_count
    if len(d) >= k and all(abs(t) <= spec.tol for t in d[-k:]):
        return Holds(values[-1], diagnostics=diag, note="stable")
    if len(rho) >= 3 and all(r >= GROWTH_RATIO for r in rho[-3:]) and abs(d[-1]) > spec.tol:
        return Fails(growth_witness or windows[-1], diag, f"{label} keep growing")
    return Inconclusive(diag, f"{label} neither settle nor diverge", value=values[-1])


def settle_frontier(windows, osc, means, maxabs, spec, label="frontier"):
    """Decide a Pringsheim limit from frontier oscillations and means."""
    windows = tuple(windows)
    diag = tuple((str(w), float(o)) for w, o in zip(windows, osc))
    for w, m in zip(windows, maxabs):
        if not math.isfinite(m) or m > DIVERGENCE_THRESHOLD:
            return Fails(w, diag, f"{label} values exceed {DIVERGENCE_THRESHOLD:g}")
    k = spec.stability_count
    rho = _ratios(osc)
    stable = len(osc) >= k and all(o <= spec.tol for o in osc[-k:])
    decaying = len(rho) >= 2 and all(r <= DECAY_RATIO for r in rho[-2:])
    if decaying or stable:
        est = _extrapolate(windows, means, spec.tol)
        if est is not None:
            return Holds(est, diagnostics=diag, note="extrapolated")
        if stable:
            return Holds(float(means[-1]), diagnostics=diag, note="stable")
    if len(rho) >= 3 and all(r >= GROWTH_RATIO for r in rho[-3:]) and osc[-1] > spec.tol:
        return Fails(windows[-1], diag, f"{label} oscillation does not shrink")
    return Inconclusive(diag, f"{label} oscillation undecided", value=float(means[-1]))


def _line_verdict(osc, spec):
    """Single-sequence tail check on a row/column oscillation trace."""
    k = spec.stability_count
    rho = _ratios(osc)
    if len(osc) >= k and all(o <= spec.tol for o in osc[-k:]):
        return Outcome.HOLDS
    if len(rho) >= 2 and all(r <= DECAY_RATIO for r in rho[-2:]):
        return Outcome.HOLDS
    if len(rho) >= 3 and all(r >= GROWTH_RATIO for r in rho[-3:]) and osc[-1] > spec.tol:
        return Outcome.FAILS
    return Outcome.INCONCLUSIVE


RECOGNITION_DENOMINATOR = 100


def recognize_rational(verdict, mode, tol):
    """In rational mode, replace a window-derived value by the nearest
    fraction with denominator <= RECOGNITION_DENOMINATOR when it lies
    within tol.  The verdict stays marked inexact."""
    if mode != RATIONAL or verdict.exact or not isinstance(verdict.value, float):
        return verdict
    v = verdict.value
    if not math.isfinite(v):
        return verdict
    f = Fraction(v).limit_denominator(RECOGNITION_DENOMINATOR)
    if abs(float(f) - v) <= tol:
        note = (verdict.note + "; " if verdict.note else "") + "value recognized as rational"
        return replace(verdict, value=_norm(f), note=note)
    return verdict


# --- exact paths ------------------------------------------------------------

def _zero_of(x):
    return 0 if x.mode == RATIONAL else 0.0


def _exact_box(x):
    """Grid over which x is decided exactly, or None.

    Finite support gives the support grid (x vanishes outside).  A partial-sum
    view of finite support gives its box: outside, the sums repeat the box's
    edges and the averages shrink in absolute value.
    """
    if x.is_finite:
        r, c = x.support
        return x.values(max(r, 1), max(c, 1))
    if isinstance(x, CumulativeView):
        box = x.box_values()
        if box is not None and x.average:
            R, C = box.shape
            w = np.outer(np.arange(1, R + 1), np.arange(1, C + 1))
            box = _qdiv(box, w.astype(object)) if x.mode == RATIONAL else box / w
        return box
    return None


def _eventual_limit(x):
    if x.is_finite:
        return _zero_of(x)
    box = x.box_values()
    if x.average:
        return _zero_of(x)
    return box[-1, -1]


# --- public limit operations -----------------------------------------------

def sup_norm(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """sup_{k,l} |x_kl|."""
    box = _exact_box(x)
    if box is not None:
        a = np.abs(box)
        i, j = np.unravel_index(int(np.argmax(a)), a.shape)
        return Holds(_norm(a[i, j]) if x.mode == RATIONAL else float(a[i, j]),
                     exact=x.mode == RATIONAL, witness=(int(i) + 1, int(j) + 1))
    spec.check_tol(x)
    best, ak, al = window_sups(x, spec.windows)
    v = recognize_rational(settle_series(spec.windows, best, spec, label="window sups"),
                           x.mode, spec.tol)
    if v.holds:
        return replace(v, witness=(int(ak[-1]), int(al[-1])))
    if v.fails:
        grow = int(np.argmax(best))
        return replace(v, witness=(int(ak[grow]), int(al[grow])))
    return v


def pringsheim_limit(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """p-lim x_kl as k, l -> oo jointly."""
    if _exact_box(x) is not None:
        return Holds(_eventual_limit(x), exact=x.mode == RATIONAL)
    spec.check_tol(x)
    osc, mean, mx = window_frontiers(x, spec.windows)
    return recognize_rational(settle_frontier(spec.windows, osc, mean, mx, spec), x.mode, spec.tol)


def bp_limit(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """Pringsheim limit of a bounded sequence."""
    p = pringsheim_limit(x, spec)
    if p.fails:
        return p
    s = sup_norm(x, spec)
    if s.fails:
        return replace(s, note="unbounded: " + s.note)
    if p.inconclusive:
        return p
    if s.inconclusive:
        return replace(s, value=p.value, note="boundedness undecided: " + s.note)
    return replace(p, diagnostics=p.diagnostics + s.diagnostics)


def r_limit(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """Regular limit: bp-limit plus convergence of every row and column."""
    b = bp_limit(x, spec)
    if b.fails or _exact_box(x) is not None:
        return b
    row_osc, col_osc = window_lines(x, spec.windows)
    undecided = None
    for k in range(row_osc.shape[0]):
        o = _line_verdict(row_osc[k], spec)
        if o is Outcome.FAILS:
            return Fails(("row", k + 1), _diag(spec.windows, row_osc[k]), f"row {k + 1} does not converge")
        if o is Outcome.INCONCLUSIVE and undecided is None:
            undecided = ("row", k + 1)
    for l in range(col_osc.shape[1]):
        o = _line_verdict(col_osc[:, l], spec)
        if o is Outcome.FAILS:
            return Fails(("col", l + 1), _diag(spec.windows, col_osc[:, l]), f"column {l + 1} does not converge")
        if o is Outcome.INCONCLUSIVE and undecided is None:
            undecided = ("col", l + 1)
    if b.inconclusive:
        return b
    if undecided is not None:
        return Inconclusive(b.diagnostics, f"{undecided[0]} {undecided[1]} undecided", value=b.value)
    return b


_LIMITS = {"p": pringsheim_limit, "bp": bp_limit, "r": r_limit}


def theta_limit(x, spec: LimitSpec = LimitSpec(), theta=None) -> Verdict:
    """Dispatch on θ (default: spec.mode)."""
    return _LIMITS[theta or spec.mode](x, spec)


def _series_of_cumulative(view, theta):
    """θ-sum of y = (s_mn [/ (mn)]) for finitely supported base, exactly.

    Beyond the support box R x C, y_mn = s_{min(m,R),min(n,C)} u(m) v(n) with
    u, v = 1 or 1/index, whose sums diverge.  The partial sums converge in p
    iff the three edge coefficients vanish; they stay bounded (bp, r) iff the
    last row and last column of s vanish entirely.
    """
    box = view.box_values()
    R, C = box.shape
    zero = _zero_of(view)
    if view.average:
        ys = np.empty_like(box)
        for i in range(R):
            for j in range(C):
                ys[i, j] = (_norm(Fraction(box[i, j]) / ((i + 1) * (j + 1)))
                            if view.mode == RATIONAL else box[i, j] / ((i + 1) * (j + 1)))
        ucoef = [Fraction(1, m + 1) if view.mode == RATIONAL else 1.0 / (m + 1) for m in range(R)]
        vcoef = [Fraction(1, n + 1) if view.mode == RATIONAL else 1.0 / (n + 1) for n in range(C)]
    else:
        ys = box
        ucoef = [1] * R
        vcoef = [1] * C
    inner = exact_sum(ys.ravel().tolist()) if view.mode == RATIONAL else math.fsum(ys.ravel().tolist())
    exact = view.mode == RATIONAL
    last_row = [box[R - 1, n] for n in range(C)]
    last_col = [box[m, C - 1] for m in range(R)]
    if theta == "p":
        a = sum((last_row[n] * vcoef[n] for n in range(C)), zero)
        b = sum((last_col[m] * ucoef[m] for m in range(R)), zero)
        if box[R - 1, C - 1] != 0:
            return Fails("corner sum", exact=exact, note="partial sums grow in both directions")
        if a != 0:
            return Fails("last row", exact=exact, note="partial sums grow along rows")
        if b != 0:
            return Fails("last column", exact=exact, note="partial sums grow along columns")
        return Holds(_norm(inner) if exact else inner, exact=exact)
    for n, v in enumerate(last_row):
        if v != 0:
            return Fails(("row", R, n + 1), exact=exact, note="partial sums unbounded")
    for m, v in enumerate(last_col):
        if v != 0:
            return Fails(("col", m + 1, C), exact=exact, note="partial sums unbounded")
    return Holds(_norm(inner) if exact else inner, exact=exact)


def series_theta_sum(x: DoubleSequence, spec: LimitSpec = LimitSpec(), theta=None) -> Verdict:
    """θ-sum of the double series Σ x_kl (θ-limit of its partial sums)."""
    theta = theta or spec.mode
    if x.is_finite:
        r, c = x.support
        g = x.values(r, c)
        total = exact_sum(g.ravel().tolist()) if x.mode == RATIONAL else math.fsum(g.ravel().tolist())
        return Holds(total, exact=x.mode == RATIONAL)
    if isinstance(x, CumulativeView) and x.base.is_finite and not x.absolute:
        return _series_of_cumulative(x, theta)
    return theta_limit(CumulativeView(x), spec, theta)


def _cumulative_as_finite(view):
    """When the last row and column of the box vanish, the view itself is
    finitely supported; return it as a grid sequence."""
    from .sequence import FiniteSequence
    box = view.box_values()
    if any(v != 0 for v in box[-1, :]) or any(v != 0 for v in box[:, -1]):
        return None
    g = box
    if view.average:
        R, C = box.shape
        g = np.empty_like(box)
        for i in range(R):
            for j in range(C):
                g[i, j] = (_norm(Fraction(box[i, j]) / ((i + 1) * (j + 1)))
                           if view.mode == RATIONAL else box[i, j] / ((i + 1) * (j + 1)))
    return FiniteSequence._wrap(g, view.mode)


def bounded_partial_sums(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """sup_{m,n} |s_mn|: membership of BS."""
    if isinstance(x, CumulativeView) and x.base.is_finite and not x.absolute:
        v = _series_of_cumulative(x, "bp")
        if v.fails:
            return v
        x = _cumulative_as_finite(x)
    return sup_norm(CumulativeView(x), spec)
