"""4D matrices G = (g_mnkl), their action on double sequences and the derived
matrices T, D(a), B(a), E(A), F(A).

Entries are exact (``entry``); ``row_float`` and ``float_grid`` give float64
views for window scans.  Application (Gx)_mn = θ-Σ_kl g_mnkl x_kl is a finite
sum whenever the row or x has finite support, and a θ-limit otherwise.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import expr as _expr
from .convergence import Holds, LimitSpec, Verdict, series_theta_sum
from .sequence import (FLOAT, MODES, RATIONAL, CumulativeView, DoubleSequence, EvaluationError,
                       FiniteSequence, ModeError, _norm, _qnorm, common_mode, delta01, delta10,
                       delta11, exact_div, exact_sum, to_scalar)

__all__ = [
    "Matrix4D", "FiniteMatrix", "ExprMatrix", "RowSequence", "AppliedSequence",
    "make_T", "make_D", "make_B", "make_E", "make_F", "apply", "abel_double_summation",
]


def _index(i):
    if not isinstance(i, (int, np.integer)) or i < 1:
        raise ValueError(f"indices start at 1, got {i!r}")
    return int(i)


def _zero(mode):
    return 0 if mode == RATIONAL else 0.0


def _div(a, b, mode):
    return exact_div(a, b) if mode == RATIONAL else a / b


class Matrix4D:
    """Evaluable map (m, n, k, l) -> scalar on indices >= 1."""

    mode = RATIONAL
    support = None  # (M, N, K, L) box of nonzero entries, None when not finite
    label = "A"

    @property
    def is_finite(self):
        return self.support is not None

    def entry(self, m, n, k, l):
        return self._entry(_index(m), _index(n), _index(k), _index(l))

    __call__ = entry

    def _entry(self, m, n, k, l):
        raise NotImplementedError

    def row_support(self, m, n):
        """(K, L) bounding the nonzero entries of row (m, n), or None."""
        if self.is_finite:
            M, N, K, L = self.support
            return (K, L) if m <= M and n <= N else (0, 0)
        return None

    def row(self, m, n):
        return RowSequence(self, _index(m), _index(n))

    def row_float(self, m, n, r0, r1, ncols):
        """float64 entries g_mnkl for r0 < k <= r1, 1 <= l <= ncols."""
        out = np.empty((r1 - r0, ncols))
        for i in range(r1 - r0):
            for j in range(ncols):
                out[i, j] = float(self._entry(m, n, r0 + i + 1, j + 1))
        return out

    def float_grid(self, M, N, K, L):
        """float64 array of g over [1..M] x [1..N] x [1..K] x [1..L]."""
        out = np.empty((M, N, K, L))
        for m in range(M):
            for n in range(N):
                out[m, n] = self.row_float(m + 1, n + 1, 0, K, L)
        return out

    def values(self, M, N, K, L):
        """Grid in the matrix's own mode."""
        out = np.empty((M, N, K, L), dtype=object if self.mode == RATIONAL else np.float64)
        for idx in itertools.product(range(M), range(N), range(K), range(L)):
            out[idx] = self._entry(*(i + 1 for i in idx))
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {self.label} ({self.mode})>"


class FiniteMatrix(Matrix4D):
    """Finitely supported matrix from a 4D grid with origin (1,1,1,1)."""

    def __init__(self, data, mode=RATIONAL, label=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        raw = np.array(data, dtype=object)
        if raw.size == 0:
            raw = raw.reshape(0, 0, 0, 0)
        if raw.ndim != 4:
            raise ValueError("matrix grid must be four-dimensional")
        grid = np.empty(raw.shape, dtype=object if mode == RATIONAL else np.float64)
        for idx, v in np.ndenumerate(raw):
            grid[idx] = to_scalar(v, mode)
        self._init(grid, mode, label)

    def _init(self, grid, mode, label):
        nz = np.argwhere(grid != 0)
        box = tuple(int(nz[:, i].max()) + 1 for i in range(4)) if nz.size else (0, 0, 0, 0)
        self.mode = mode
        self._grid = grid[:box[0], :box[1], :box[2], :box[3]]
        self.support = box
        self.label = label or "grid{}x{}x{}x{}".format(*box)

    @classmethod
    def _wrap(cls, grid, mode, label=None):
        obj = cls.__new__(cls)
        grid = np.asarray(grid, dtype=object if mode == RATIONAL else np.float64)
        if mode == RATIONAL and grid.size:
            grid = _qnorm(grid).astype(object)
        obj._init(grid, mode, label)
        return obj

    def _entry(self, m, n, k, l):
        M, N, K, L = self.support
        if m <= M and n <= N and k <= K and l <= L:
            return self._grid[m - 1, n - 1, k - 1, l - 1]
        return _zero(self.mode)

    def values(self, M, N, K, L):
        out = np.zeros((M, N, K, L), dtype=object if self.mode == RATIONAL else np.float64)
        if self.mode == RATIONAL:
            out[...] = 0
        b = [min(a, s) for a, s in zip((M, N, K, L), self.support)]
        out[:b[0], :b[1], :b[2], :b[3]] = self._grid[:b[0], :b[1], :b[2], :b[3]]
        return out

    def row_float(self, m, n, r0, r1, ncols):
        out = np.zeros((r1 - r0, ncols))
        M, N, K, L = self.support
        if m <= M and n <= N:
            hi, cc = min(r1, K), min(ncols, L)
            if r0 < hi and cc > 0:
                out[:hi - r0, :cc] = self._grid[m - 1, n - 1, r0:hi, :cc].astype(np.float64)
        return out

    def float_grid(self, M, N, K, L):
        return np.asarray(self.values(M, N, K, L), dtype=np.float64)


class ExprMatrix(Matrix4D):
    """Closed-form matrix in the variables m, n, k, l."""

    def __init__(self, source, mode=RATIONAL, label=None):
        if isinstance(source, str):
            self.expr = _expr.parse(source, _expr.MATRIX_VARS)
            self.text = source
        else:
            self.expr = source
            self.text = _expr.pretty(source)
        self.mode = mode
        self.label = label or self.text

    def _entry(self, m, n, k, l):
        v = _expr.evaluate(self.expr, {"m": m, "n": n, "k": k, "l": l})
        return float(v) if self.mode == FLOAT else v

    def row_float(self, m, n, r0, r1, ncols):
        ks = np.arange(r0 + 1, r1 + 1, dtype=np.int64)[:, None]
        ls = np.arange(1, ncols + 1, dtype=np.int64)[None, :]
        return _expr.evaluate_array(self.expr, {"m": np.int64(m), "n": np.int64(n), "k": ks, "l": ls})

    def float_grid(self, M, N, K, L):
        ax = [np.arange(1, s + 1, dtype=np.int64) for s in (M, N, K, L)]
        env = {v: a.reshape([-1 if i == j else 1 for j in range(4)])
               for i, (v, a) in enumerate(zip(("m", "n", "k", "l"), ax))}
        return _expr.evaluate_array(self.expr, env)


class RowSequence(DoubleSequence):
    """The double sequence (k, l) -> g_mnkl for a fixed row (m, n)."""

    def __init__(self, source, m, n):
        self.source, self.m, self.n = source, m, n
        self.mode = source.mode
        self.support = source.row_support(m, n)
        self.label = f"{source.label}[{m},{n}]"

    def _entry(self, k, l):
        return self.source._entry(self.m, self.n, k, l)

    def float_rows(self, r0, r1, ncols):
        return self.source.row_float(self.m, self.n, r0, r1, ncols)


# --- derived matrices ---------------------------------------------------------

class _Corner:
    """Exact corner sums Σ_{i<=k, j<=l} of a double sequence, with a prefix
    cache over the support box when the sequence is finite."""

    def __init__(self, seq):
        self.seq = seq
        self.mode = seq.mode
        self._box = None
        if seq.is_finite:
            r, c = seq.support
            g = seq.values(max(r, 1), max(c, 1))
            s = g.cumsum(axis=0).cumsum(axis=1)
            self._box = _qnorm(s).astype(object) if self.mode == RATIONAL else s

    def __call__(self, k, l):
        if self._box is not None:
            r, c = self._box.shape
            return self._box[min(k, r) - 1, min(l, c) - 1]
        g = self.seq.values(k, l)
        vals = g.ravel().tolist()
        return exact_sum(vals) if self.mode == RATIONAL else float(np.sum(g))


class TMatrix(Matrix4D):
    """t_mnkl = 1/(mn) for k <= m, l <= n."""

    def __init__(self, mode=RATIONAL):
        self.mode = mode
        self.label = "T"
        self.tag = "T"

    def _entry(self, m, n, k, l):
        if k <= m and l <= n:
            return _div(1, m * n, self.mode)
        return _zero(self.mode)

    def row_support(self, m, n):
        return (m, n)

    def row_float(self, m, n, r0, r1, ncols):
        ks = np.arange(r0 + 1, r1 + 1)[:, None]
        ls = np.arange(1, ncols + 1)[None, :]
        return np.where((ks <= m) & (ls <= n), 1.0 / (m * n), 0.0)

    def float_grid(self, M, N, K, L):
        m = np.arange(1, M + 1)[:, None, None, None]
        n = np.arange(1, N + 1)[None, :, None, None]
        k = np.arange(1, K + 1)[None, None, :, None]
        l = np.arange(1, L + 1)[None, None, None, :]
        return np.where((k <= m) & (l <= n), 1.0 / (m * n), 0.0)


class DMatrix(Matrix4D):
    """d_mnkl = a_mn/(kl) for k >= m, l >= n."""

    def __init__(self, a):
        self.a = a
        self.mode = a.mode
        self.label = f"D({a.label})"
        self.tag = "D"

    def _entry(self, m, n, k, l):
        if k >= m and l >= n:
            return _div(self.a._entry(m, n), k * l, self.mode)
        return _zero(self.mode)

    def row_support(self, m, n):
        return (0, 0) if self.a._entry(m, n) == 0 else None

    def row_float(self, m, n, r0, r1, ncols):
        ks = np.arange(r0 + 1, r1 + 1)[:, None]
        ls = np.arange(1, ncols + 1)[None, :]
        amn = float(self.a._entry(m, n))
        return np.where((ks >= m) & (ls >= n), amn / (ks * ls), 0.0)


class BMatrix(Matrix4D):
    """b_mnkl = (1/kl) Σ_{i<=k, j<=l} a_ij for k <= m, l <= n."""

    def __init__(self, a):
        self.a = a
        self.mode = a.mode
        self.label = f"B({a.label})"
        self.tag = "B"
        self._corner = _Corner(a)

    def _entry(self, m, n, k, l):
        if k <= m and l <= n:
            return _div(self._corner(k, l), k * l, self.mode)
        return _zero(self.mode)

    def row_support(self, m, n):
        return (m, n)

    def row_float(self, m, n, r0, r1, ncols):
        avg = CumulativeView(self.a, average=True).float_rows(r0, r1, ncols)
        ks = np.arange(r0 + 1, r1 + 1)[:, None]
        ls = np.arange(1, ncols + 1)[None, :]
        return np.where((ks <= m) & (ls <= n), avg, 0.0)


class EMatrix(Matrix4D):
    """e_mnkl = (1/kl) Σ_{i<=k, j<=l} a_mnij for k <= m, l <= n."""

    def __init__(self, A):
        self.A = A
        self.mode = A.mode
        self.label = f"E({A.label})"
        self.tag = "E"
        if A.is_finite:
            M, N, K, L = A.support
            self.support = (M, N, min(M, K), min(N, L)) if all(A.support) else (0, 0, 0, 0)
            g = A.values(M, N, K, L)
            self._cache = g.cumsum(axis=2).cumsum(axis=3) if g.size else g
        else:
            self._cache = None

    def _corner(self, m, n, k, l):
        if self._cache is not None:
            M, N, K, L = self.A.support
            if m > M or n > N or K == 0 or L == 0:
                return _zero(self.mode)
            return self._cache[m - 1, n - 1, min(k, K) - 1, min(l, L) - 1]
        return _Corner(self.A.row(m, n))(k, l)

    def _entry(self, m, n, k, l):
        if k <= m and l <= n:
            return _div(self._corner(m, n, k, l), k * l, self.mode)
        return _zero(self.mode)

    def row_support(self, m, n):
        if self.is_finite:
            return super().row_support(m, n)
        return (m, n)

    def row_float(self, m, n, r0, r1, ncols):
        avg = CumulativeView(self.A.row(m, n), average=True).float_rows(r0, r1, ncols)
        ks = np.arange(r0 + 1, r1 + 1)[:, None]
        ls = np.arange(1, ncols + 1)[None, :]
        return np.where((ks <= m) & (ls <= n), avg, 0.0)

    def float_grid(self, M, N, K, L):
        g = self.A.float_grid(M, N, K, L).cumsum(axis=2).cumsum(axis=3)
        m = np.arange(1, M + 1)[:, None, None, None]
        n = np.arange(1, N + 1)[None, :, None, None]
        k = np.arange(1, K + 1)[None, None, :, None]
        l = np.arange(1, L + 1)[None, None, None, :]
        return np.where((k <= m) & (l <= n), g / (k * l), 0.0)


class FMatrix(Matrix4D):
    """f_mnkl = mn (a_mnkl - a_{m+1,n,kl} - a_{m,n+1,kl} + a_{m+1,n+1,kl})."""

    def __init__(self, A):
        self.A = A
        self.mode = A.mode
        self.label = f"F({A.label})"
        self.tag = "F"
        if A.is_finite:
            self.support = A.support

    def _entry(self, m, n, k, l):
        A = self.A
        d = (A._entry(m, n, k, l) - A._entry(m + 1, n, k, l) - A._entry(m, n + 1, k, l)
             + A._entry(m + 1, n + 1, k, l))
        return _norm(m * n * d)

    def row_support(self, m, n):
        rs = [self.A.row_support(i, j) for i in (m, m + 1) for j in (n, n + 1)]
        if any(r is None for r in rs):
            return None
        return (max(r[0] for r in rs), max(r[1] for r in rs))

    def row_float(self, m, n, r0, r1, ncols):
        A = self.A
        d = (A.row_float(m, n, r0, r1, ncols) - A.row_float(m + 1, n, r0, r1, ncols)
             - A.row_float(m, n + 1, r0, r1, ncols) + A.row_float(m + 1, n + 1, r0, r1, ncols))
        return m * n * d

    def float_grid(self, M, N, K, L):
        g = self.A.float_grid(M + 1, N + 1, K, L)
        d = g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:] + g[1:, 1:]
        w = np.outer(np.arange(1, M + 1), np.arange(1, N + 1)).astype(np.float64)
        return d * w[:, :, None, None]


def make_T(mode=RATIONAL):
    return TMatrix(mode)


def make_D(a):
    return DMatrix(a)


def make_B(a):
    return BMatrix(a)


def make_E(A):
    return EMatrix(A)


def make_F(A):
    return FMatrix(A)


# --- application ------------------------------------------------------------

class AppliedSequence(DoubleSequence):
    """Gx as a double sequence; ``verdict(m, n)`` gives the θ-sum per entry."""

    def __init__(self, G, x, spec):
        self.G, self.x, self.spec = G, x, spec
        self.mode = common_mode(G, x)
        self.label = f"{G.label}·{x.label}"

    def verdict(self, m, n) -> Verdict:
        m, n = _index(m), _index(n)
        row = self.G.row(m, n)
        bound = row.support
        if bound is None and self.x.is_finite:
            bound = self.x.support
        if bound is not None:
            r, c = bound
            if r == 0 or c == 0:
                return Holds(_zero(self.mode), exact=self.mode == RATIONAL)
            g = row.values(r, c) * self.x.values(r, c)
            vals = g.ravel().tolist()
            total = exact_sum(vals) if self.mode == RATIONAL else float(np.sum(g))
            return Holds(total, exact=self.mode == RATIONAL)
        prod = _Product(row, self.x)
        return series_theta_sum(prod, self.spec)

    def _entry(self, m, n):
        v = self.verdict(m, n)
        if not v.holds:
            raise EvaluationError(f"(Gx)_{m},{n} is not θ-summable: {v}", (m, n))
        return v.value


class _Product(DoubleSequence):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.mode = a.mode
        self.label = f"{a.label}*{b.label}"

    def _entry(self, k, l):
        return _norm(self.a._entry(k, l) * self.b._entry(k, l))

    def float_rows(self, r0, r1, ncols):
        return self.a.float_rows(r0, r1, ncols) * self.b.float_rows(r0, r1, ncols)


class TApplied(CumulativeView):
    """Tx = (s_mn/(mn)); every entry is a finite corner average."""

    def __init__(self, x, spec):
        super().__init__(x, average=True)
        self.spec = spec
        self.label = f"T·{x.label}"

    def verdict(self, m, n):
        return Holds(self._entry(_index(m), _index(n)), exact=self.mode == RATIONAL)


def apply(G: Matrix4D, x: DoubleSequence, spec: LimitSpec = LimitSpec()):
    """The transformed sequence Gx.

    A finitely supported G gives a finitely supported result computed in full;
    T gives the streaming corner-average view; anything else is evaluated per
    entry on demand.
    """
    if G.mode != x.mode:
        raise ModeError(f"cannot apply a {G.mode} matrix to a {x.mode} sequence")
    if isinstance(G, TMatrix):
        return TApplied(x, spec)
    if G.is_finite:
        M, N, K, L = G.support
        if not (M and N):
            return FiniteSequence._wrap(np.zeros((0, 0)), x.mode)
        g = G.values(M, N, K, L)
        xv = x.values(K, L) if K and L else None
        out = np.empty((M, N), dtype=object if x.mode == RATIONAL else np.float64)
        for m in range(M):
            for n in range(N):
                if xv is None:
                    out[m, n] = _zero(x.mode)
                    continue
                vals = (g[m, n] * xv).ravel().tolist()
                out[m, n] = exact_sum(vals) if x.mode == RATIONAL else float(np.sum(vals))
        return FiniteSequence._wrap(out, x.mode, label=f"{G.label}·{x.label}")
    return AppliedSequence(G, x, spec)


# --- summation by parts ---------------------------------------------------

def abel_double_summation(a: DoubleSequence, x: DoubleSequence, m, n):
    """Σ_{k<=m, l<=n} a_kl x_kl through Abel's double summation by parts:

        Σ_{k<m, l<n} S_kl Δx_kl + Σ_{k<m} S_kn Δ10 x_kn
        + Σ_{l<n} S_ml Δ01 x_ml + S_mn x_mn

    with S the corner sums of a.
    """
    m, n = _index(m), _index(n)
    mode = common_mode(a, x)
    S = a.values(m, n).cumsum(axis=0).cumsum(axis=1)
    d11 = delta11(x).values(m, n)
    d10 = delta10(x).values(m, n)
    d01 = delta01(x).values(m, n)
    terms = []
    for k in range(m - 1):
        for l in range(n - 1):
            terms.append(S[k, l] * d11[k, l])
    for k in range(m - 1):
        terms.append(S[k, n - 1] * d10[k, n - 1])
    for l in range(n - 1):
        terms.append(S[m - 1, l] * d01[m - 1, l])
    terms.append(S[m - 1, n - 1] * x.eval(m, n))
    if mode == RATIONAL:
        return exact_sum(terms)
    return float(np.sum(terms))

