"""Membership of a 4D matrix in the classes (λ, μ) through their
characterizing conditions.

Each condition is a sup or a limit over the indices of A.  Finitely supported
matrices are decided exactly over their support box (one extra step in m, n
for the differences).  Other matrices are sampled on the nested 4D windows
``MATRIX_WINDOWS`` and the per-window statistics are settled with the same
rules as sequence scans.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .convergence import (Fails, Holds, Inconclusive, LimitSpec, Verdict, conjunction,
                          series_theta_sum, settle_series, theta_limit)
from .matrix4d import Matrix4D, make_E, make_F
from .sequence import (FLOAT, RATIONAL, DoubleSequence, FiniteSequence, Window, WindowError,
                       _qdiv, exact_sum)
from .spaces import beta_bp_dual_member

__all__ = [
    "ClassId", "ClassReport", "CLASS_TAGS", "MATRIX_WINDOWS", "classify",
    "check_condition_3_3", "check_condition_3_4", "check_condition_3_5",
    "hahn_matrix_norm", "matrix_norm_report",
]

MATRIX_WINDOWS = (Window(2, 2), Window(4, 4), Window(8, 8), Window(16, 16), Window(32, 32))
LIMIT_CAP = 512   # per-(k, l) limit scans use the sequence windows up to this size
SUBSET_PROBE = 3  # subset conditions scan all subsets of a 3x3 block of positions
ROW_PROBE = 4     # rows (m, n) <= 4x4 for the row-dual condition

CLASS_TAGS = ("Lu->Mu", "Lu->Lu", "Lu->Cbp", "H->Mu", "H->Lu", "H->Cbp", "H->H", "H->BV",
              "H->BV0", "H->CS", "H->CS0", "H->BS", "Lu->H", "C0->H", "C->H", "Mu->H")

_ALIASES = {"→": "->", "θ": "", "Hθ": "H", "BVθ0": "BV0", "CSθ0": "CS0", "CSθ": "CS",
            "Cθ0": "C0", "Cθ": "C"}


@dataclass(frozen=True)
class ClassId:
    tag: str
    theta: str = "bp"

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unsupported class {self.tag!r}; choose from {', '.join(CLASS_TAGS)}")
        if self.theta not in ("p", "bp", "r"):
            raise ValueError(f"θ must be p, bp or r, got {self.theta!r}")

    @classmethod
    def parse(cls, text, theta="bp"):
        t = text.strip().replace(" ", "")
        for a in ("CSθ0", "CSθ", "BVθ0", "Cθ0", "Cθ", "Hθ"):
            t = t.replace(a, _ALIASES[a])
        t = t.replace("→", "->")
        return cls(t, theta)

    def __str__(self):
        return f"{self.tag}[{self.theta}]"


@dataclass(frozen=True)
class ClassReport:
    class_id: ClassId
    conditions: tuple  # ((name, Verdict), ...)
    overall: Verdict
    norms: dict = field(default_factory=dict)

    def condition(self, name):
        return dict(self.conditions)[name]


# --- grids ----------------------------------------------------------------------

class _Grid:
    """Entries of A on the largest window plus one step in (m, n).

    ``exact`` grids come from a finite support box and make every statistic
    exact; otherwise windows slice a float64 grid.
    """

    def __init__(self, A: Matrix4D, windows):
        self.A = A
        self.windows = tuple(windows)
        self.exact = A.is_finite
        self.mode = A.mode if self.exact else FLOAT
        if self.exact:
            M, N, K, L = (max(s, 1) for s in A.support)
            self.g = A.values(M + 1, N + 1, K, L)
            self.shape = (M, N, K, L)
        else:
            w = self.windows[-1]
            self.g = A.float_grid(w.rows + 1, w.cols + 1, w.rows, w.cols)
            self.shape = (w.rows, w.cols, w.rows, w.cols)

    def slices(self):
        """(label, sub-grid) for each window; a single full slice when exact."""
        if self.exact:
            return [(None, self.g)]
        return [(w, self.g[:w.rows + 1, :w.cols + 1, :w.rows, :w.cols]) for w in self.windows]


def _abs(a):
    return np.abs(a)


def _argmax(a):
    flat = a.ravel().tolist()
    i = max(range(len(flat)), key=lambda j: flat[j]) if flat else 0
    return (flat[i] if flat else 0), tuple(int(t) + 1 for t in np.unravel_index(i, a.shape))


def _sum_axes(a, axes, mode):
    if mode == RATIONAL:
        out = a
        for ax in sorted(axes, reverse=True):
            out = np.sum(out, axis=ax)  # object sum keeps Fractions exact
        return out
    return a.sum(axis=tuple(axes))


def _kl(K, L, mode):
    w = np.outer(np.arange(1, K + 1), np.arange(1, L + 1))
    return w.astype(object) if mode == RATIONAL else w.astype(np.float64)


def _mn(M, N, mode):
    return _kl(M, N, mode)[:, :, None, None]


def _div_kl(a, mode):
    K, L = a.shape[-2:]
    w = _kl(K, L, mode)
    return _qdiv(a, w) if mode == RATIONAL else a / w


def _corner(g):
    return g.cumsum(axis=2).cumsum(axis=3)


def _d11(g):
    return g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:] + g[1:, 1:]


# statistics on a sub-grid g of shape (M+1, N+1, K, L) --------------------------

def _stat_entries(g, mode):
    return _argmax(_abs(g[:-1, :-1]))


def _stat_column_sums(g, mode):
    return _argmax(_sum_axes(_abs(g[:-1, :-1]), (0, 1), mode))


def _hh_profile(g, mode, weighted):
    d = _d11(_corner(g))
    a = _abs(d)
    if weighted:
        M, N = a.shape[:2]
        a = a * _mn(M, N, mode)
    return _div_kl(_sum_axes(a, (0, 1), mode), mode)


def _stat_hahn(g, mode):
    return _argmax(_hh_profile(g, mode, True))


def _stat_unweighted(g, mode):
    return _argmax(_hh_profile(g, mode, False))


def _stat_corner_sums(g, mode):
    return _argmax(_div_kl(_sum_axes(_abs(_corner(g)[:-1, :-1]), (0, 1), mode), mode))


def _f_grid(g, mode):
    M, N = g.shape[0] - 1, g.shape[1] - 1
    return _d11(g) * _mn(M, N, mode)


def _stat_weighted_diffs(g, mode):
    return _argmax(_sum_axes(_abs(_f_grid(g, mode)), (0, 1), mode))


def _stat_weighted_corners(g, mode):
    return _argmax(_sum_axes(_abs(_corner(_f_grid(g, mode))), (0, 1), mode))


def _subset_max(vectors, mode):
    """max over nonempty subsets K of Σ_rest |Σ_{j in K} vectors[j]|."""
    best, arg = None, None
    n = len(vectors)
    for mask in range(1, 1 << n):
        acc = None
        for j in range(n):
            if mask >> j & 1:
                acc = vectors[j] if acc is None else acc + vectors[j]
        vals = np.abs(acc).ravel().tolist()
        s = exact_sum(vals) if mode == RATIONAL else math.fsum(vals)
        if best is None or s > best:
            best, arg = s, mask
    return best, arg


def _stat_subset_columns(g, mode):
    f = _f_grid(g, mode)
    P = min(SUBSET_PROBE, f.shape[2]), min(SUBSET_PROBE, f.shape[3])
    pos = list(itertools.product(range(P[0]), range(P[1])))
    best, mask = _subset_max([f[:, :, k, l] for k, l in pos], mode)
    return best, tuple((k + 1, l + 1) for j, (k, l) in enumerate(pos) if mask >> j & 1)


def _stat_subset_rows(g, mode):
    f = _f_grid(g, mode)
    P = min(SUBSET_PROBE, f.shape[0]), min(SUBSET_PROBE, f.shape[1])
    pos = list(itertools.product(range(P[0]), range(P[1])))
    best, mask = _subset_max([f[m, n] for m, n in pos], mode)
    return best, tuple((m + 1, n + 1) for j, (m, n) in enumerate(pos) if mask >> j & 1)


def _sup_condition(grid: _Grid, stat, spec, name):
    out = []
    for w, g in grid.slices():
        out.append((w, stat(g, grid.mode)))
    if grid.exact:
        value, wit = out[0][1]
        return Holds(value, exact=grid.mode == RATIONAL, witness=wit, note=name)
    values = [float(v) for _, (v, _) in out]
    verdict = settle_series(grid.windows, values, spec, label=f"{name} window sups")
    wit = out[-1][1][1]
    if verdict.holds:
        return Holds(verdict.value, witness=wit, diagnostics=verdict.diagnostics, note=name)
    if verdict.fails:
        return Fails(wit, verdict.diagnostics, f"{name}: {verdict.note}")
    return verdict


# --- limit conditions -------------------------------------------------------------

class _GridSequence(DoubleSequence):
    """Float double sequence backed by a precomputed array (zero outside)."""

    def __init__(self, arr, label):
        self.arr = np.asarray(arr, dtype=np.float64)
        self.mode = FLOAT
        self.label = label

    def _entry(self, k, l):
        r, c = self.arr.shape
        return float(self.arr[k - 1, l - 1]) if k <= r and l <= c else 0.0

    def float_rows(self, r0, r1, ncols):
        out = np.zeros((r1 - r0, ncols))
        r, c = self.arr.shape
        hi, cc = min(r1, r), min(ncols, c)
        if r0 < hi:
            out[:hi - r0, :cc] = self.arr[r0:hi, :cc]
        return out


def _limit_windows(spec, grid, per_kl):
    if per_kl:
        ws = tuple(w for w in spec.windows if w.rows <= LIMIT_CAP and w.cols <= LIMIT_CAP)
        if len(ws) >= 3:
            return ws
    return grid.windows


def _probe(grid):
    K, L = grid.shape[2], grid.shape[3]
    return min(K, ROW_PROBE), min(L, ROW_PROBE)


def _limit_condition(grid, spec, theta, seq_of, name, null=False, series=False, per_kl=True):
    """For every probed (k, l): θ-limit (or θ-sum) of the (m, n)-sequence
    seq_of(g)[:, :, k, l].

    ``per_kl`` marks transforms whose (k, l) slice only needs entries with
    indices <= (k, l); those are sampled on the longer sequence windows.
    """
    arr = seq_of(grid.g)
    K, L = _probe(grid)
    K, L = min(K, arr.shape[2]), min(L, arr.shape[3])
    if grid.exact:
        mode = grid.mode
        vals = np.empty((K, L), dtype=object if mode == RATIONAL else np.float64)
        for k in range(K):
            for l in range(L):
                col = arr[:, :, k, l].ravel().tolist()
                if series:
                    vals[k, l] = exact_sum(col) if mode == RATIONAL else math.fsum(col)
                else:
                    vals[k, l] = 0 if mode == RATIONAL else 0.0
                if null and vals[k, l] != 0:
                    return Fails((k + 1, l + 1), note=f"{name}: limit {vals[k, l]} is not 0",
                                 exact=mode == RATIONAL)
        return Holds(FiniteSequence._wrap(vals, mode), exact=mode == RATIONAL, note=name)
    ws = _limit_windows(spec, grid, per_kl)
    mspec = LimitSpec(mode=theta, tol=spec.tol, windows=ws,
                      stability_count=min(spec.stability_count, len(ws) - 1))
    w = ws[-1]
    if ws is not grid.windows:
        arr = seq_of(grid.A.float_grid(w.rows, w.cols, K, L))
    else:
        arr = arr[:w.rows, :w.cols]
    vals = np.zeros((K, L))
    verdicts = []
    for k in range(K):
        for l in range(L):
            seq = _GridSequence(arr[:, :, k, l], f"{name}[{k + 1},{l + 1}]")
            v = series_theta_sum(seq, mspec, theta) if series else theta_limit(seq, mspec, theta)
            if v.holds and null and abs(v.value) > spec.tol:
                v = Fails((k + 1, l + 1), v.diagnostics, f"{name}: limit {v.value} is not 0")
            elif v.fails:
                v = Fails((k + 1, l + 1), v.diagnostics, f"{name}: {v.note}")
            verdicts.append(v)
            if v.holds:
                vals[k, l] = v.value
    overall = conjunction(verdicts)
    if overall.holds:
        return Holds(FiniteSequence._wrap(vals, FLOAT), note=name)
    return overall


def _identity(g):
    return g


def _corner_avg(g):
    K, L = g.shape[2], g.shape[3]
    c = _corner(g)
    if c.dtype == object:
        return _qdiv(c, _kl(K, L, RATIONAL)[None, None])
    return c / _kl(K, L, FLOAT)[None, None]


def _abs_row_sums(g):
    s = np.abs(g).sum(axis=(2, 3)) if g.dtype != object else _sum_axes(np.abs(g), (2, 3), RATIONAL)
    return s[:, :, None, None]


# --- public condition checks ----------------------------------------------------

def check_condition_3_3(A: Matrix4D, spec: LimitSpec = LimitSpec(), windows=MATRIX_WINDOWS) -> Verdict:
    """sup_{m,n,k,l} |a_mnkl| < oo."""
    return _sup_condition(_Grid(A, windows), _stat_entries, spec, "sup-entries")


def check_condition_3_5(A: Matrix4D, spec: LimitSpec = LimitSpec(), windows=MATRIX_WINDOWS) -> Verdict:
    """sup_{k,l} Σ_{m,n} |a_mnkl| < oo."""
    return _sup_condition(_Grid(A, windows), _stat_column_sums, spec, "sup-column-sums")


def check_condition_3_4(A: Matrix4D, spec: LimitSpec = LimitSpec(), windows=MATRIX_WINDOWS) -> Verdict:
    """bp-lim_{m,n} a_mnkl exists for every k, l; value is the limit grid."""
    return _limit_condition(_Grid(A, windows), spec, "bp", _identity, "entry-limits")


def _rows_in_dual(A, spec, fail_fast=True):
    """Row-dual condition: each row A_mn (m, n <= ROW_PROBE) in the β(bp)-dual."""
    verdicts = []
    for m in range(1, ROW_PROBE + 1):
        for n in range(1, ROW_PROBE + 1):
            v = beta_bp_dual_member(A.row(m, n), spec)
            verdicts.append(((m, n), v))
            if v.fails:
                return Fails((m, n), tuple((str(r), str(x)) for r, x in verdicts),
                             f"row {(m, n)} not in the dual: {v.note}")
            if v.inconclusive and fail_fast:
                return Inconclusive(tuple((str(r), str(x)) for r, x in verdicts),
                                    f"row {(m, n)} undecided")
    undecided = [r for r, v in verdicts if v.inconclusive]
    diag = tuple((str(r), str(v)) for r, v in verdicts)
    if undecided:
        return Inconclusive(diag, f"rows {undecided} undecided")
    return Holds(None, exact=all(v.exact for _, v in verdicts), diagnostics=diag,
                 note=f"rows m,n <= {ROW_PROBE}")


# --- (H, H) norm -------------------------------------------------------------------

def _finite_box(A, probe):
    if not A.is_finite:
        raise ValueError("the matrix norm is computed for finitely supported matrices")
    M, N, K, L = A.support
    if not (probe.rows >= max(M, K) and probe.cols >= max(N, L)):
        raise WindowError(f"probe {probe} does not cover support {M}x{N}x{K}x{L}")
    P, Q = probe.rows, probe.cols
    return A.values(P + 1, Q + 1, P, Q)


def hahn_matrix_norm(A: Matrix4D, probe: Window):
    """max_{k,l <= probe} (1/kl) Σ_{m,n} mn |Σ_{i<=k, j<=l} Δ11_mn a_mnij|."""
    g = _finite_box(A, probe)
    value, _ = _argmax(_hh_profile(g, A.mode, True))
    return value


def matrix_norm_report(A: Matrix4D, probe: Window) -> dict:
    """Weighted (H,H) norm next to the unweighted display form.

    ``discrepancy`` is set when the two forms differ at some (k, l) of the
    probe, which happens exactly when some (m, n) != (1, 1) contributes a
    nonzero difference term.
    """
    g = _finite_box(A, probe)
    mode = A.mode
    w = _hh_profile(g, mode, True)
    u = _hh_profile(g, mode, False)
    wv, warg = _argmax(w)
    uv, uarg = _argmax(u)
    d = _d11(_corner(g))
    nz = np.argwhere(d != 0)
    offdiag = bool(any((m, n) != (0, 0) for m, n, _, _ in nz))
    return {
        "weighted": wv, "weighted_at": warg, "unweighted": uv, "unweighted_at": uarg,
        "discrepancy": bool(np.any(w != u)), "sup_differs": wv != uv,
        "contributing_offdiag": offdiag,
    }


# --- classify -------------------------------------------------------------------

def classify(A: Matrix4D, class_id, spec: LimitSpec = LimitSpec(), windows=MATRIX_WINDOWS,
             fail_fast=True) -> ClassReport:
    """Evaluate the condition list of `class_id` for A."""
    if isinstance(class_id, str):
        class_id = ClassId.parse(class_id, spec.mode)
    th = class_id.theta
    tag = class_id.tag
    src, dst = tag.split("->")
    conds = []
    norms = {}

    def grid_of(M):
        return _Grid(M, windows)

    if src == "Lu" and dst != "H":
        G = grid_of(A)
        conds.append(("sup-entries" if dst != "Lu" else "sup-column-sums",
                      _sup_condition(G, _stat_entries if dst != "Lu" else _stat_column_sums, spec,
                                     "sup-entries" if dst != "Lu" else "sup-column-sums")))
        if dst == "Cbp":
            conds.append(("entry-limits", _limit_condition(G, spec, "bp", _identity, "entry-limits")))
    elif src == "H" and dst in ("Mu", "Lu", "Cbp"):
        conds.append(("rows-in-beta-dual", _rows_in_dual(A, spec, fail_fast)))
        G = grid_of(make_E(A))
        if dst == "Lu":
            conds.append(("sup-column-sums[E]", _sup_condition(G, _stat_column_sums, spec, "sup-column-sums[E]")))
        else:
            conds.append(("sup-entries[E]", _sup_condition(G, _stat_entries, spec, "sup-entries[E]")))
        if dst == "Cbp":
            conds.append(("entry-limits[E]", _limit_condition(G, spec, "bp", _identity, "entry-limits[E]")))
    elif tag == "H->H":
        G = grid_of(A)
        conds.append(("entries-null", _limit_condition(G, spec, th, _identity, "entries-null", null=True)))
        hh = _sup_condition(G, _stat_hahn, spec, "hahn-norm")
        conds.append(("hahn-norm", hh))
        display = _sup_condition(G, _stat_unweighted, spec, "unweighted-norm")
        norms["hahn_matrix_norm"] = hh.value
        norms["unweighted_norm"] = display.value
        norms["discrepancy"] = (hh.holds and display.holds and hh.value != display.value)
    elif tag in ("H->BV", "H->BV0"):
        G = grid_of(A)
        if tag == "H->BV0":
            conds.append(("entries-null", _limit_condition(G, spec, th, _identity, "entries-null", null=True)))
        conds.append(("unweighted-norm", _sup_condition(G, _stat_unweighted, spec, "unweighted-norm")))
    elif tag in ("H->CS", "H->CS0", "H->BS"):
        G = grid_of(A)
        conds.append(("sup-corner-sums", _sup_condition(G, _stat_corner_sums, spec, "sup-corner-sums")))
        if tag == "H->CS":
            conds.append(("corner-series", _limit_condition(G, spec, th, _corner_avg, "corner-series", series=True)))
        elif tag == "H->CS0":
            conds.append(("corner-series-null", _limit_condition(G, spec, th, _corner_avg, "corner-series-null",
                                                       null=True, series=True)))
    elif tag in ("Lu->H", "C0->H", "C->H"):
        G = grid_of(A)
        conds.append(("entries-null", _limit_condition(G, spec, th, _identity, "entries-null", null=True)))
        if tag == "Lu->H":
            conds.append(("sup-weighted-differences", _sup_condition(G, _stat_weighted_diffs, spec, "sup-weighted-differences")))
        else:
            conds.append(("sup-subset-columns", _sup_condition(G, _stat_subset_columns, spec, "sup-subset-columns")))
        if tag == "C->H":
            conds.append(("sup-weighted-corners", _sup_condition(G, _stat_weighted_corners, spec, "sup-weighted-corners")))
    elif tag == "Mu->H":
        G = grid_of(A)
        conds.append(("sup-subset-rows", _sup_condition(G, _stat_subset_rows, spec, "sup-subset-rows")))
        conds.append(("row-sums-null", _limit_condition(G, spec, th, _abs_row_sums, "row-sums-null", null=True,
                                                  per_kl=False)))
    else:  # pragma: no cover - ClassId validates tags
        raise ValueError(tag)

    overall = conjunction([v for _, v in conds])
    if overall.holds:
        overall = Holds(None, exact=overall.exact)
    return ClassReport(class_id, tuple(conds), overall, norms)


def check_F_reduction(A: Matrix4D, spec: LimitSpec = LimitSpec(), windows=MATRIX_WINDOWS) -> Verdict:
    """Column-sum bound on F(A): the (L_u, H) sup condition in its matrix-F form."""
    return _sup_condition(_Grid(make_F(A), windows), _stat_column_sums, spec, "sup-column-sums[F]")
