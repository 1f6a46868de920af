"""Float kernels behind the finite-window scans.

Every kernel exists twice: a numba ``@njit`` loop and a numpy version.  The
loop versions are used unless ``HAHN2D_DISABLE_NUMBA=1`` is set or numba is
not importable.  Both operate on one row block of a float grid, so a scan can
stream windows far larger than memory would hold as one array.

Window bookkeeping uses buckets: with nested windows W_0 ⊂ W_1 ⊂ ..., the
entry (k, l) belongs to bucket ``max(rb[k], cb[l])``, the first window that
contains it.  Per-window totals are cumulative sums (or maxima) over buckets.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised through the env flag instead
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("HAHN2D_DISABLE_NUMBA", "") not in ("1", "true", "yes")


# --- numpy reference versions ---------------------------------------------

def _bucket_grid(r0, nrows, ncols, rb, cb):
    ks = np.arange(r0 + 1, r0 + nrows + 1)
    ls = np.arange(1, ncols + 1)
    return np.maximum(rb[ks][:, None], cb[ls][None, :])


def delta_bucket_sums_np(block, r0, rb, cb, nbuckets, weighted):
    d = np.abs(block[:-1, :-1] - block[1:, :-1] - block[:-1, 1:] + block[1:, 1:])
    nr, nc = d.shape
    if weighted:
        d = d * np.arange(r0 + 1, r0 + nr + 1, dtype=np.float64)[:, None]
        d = d * np.arange(1, nc + 1, dtype=np.float64)[None, :]
    b = _bucket_grid(r0, nr, nc, rb, cb)
    return np.bincount(b.ravel(), weights=d.ravel(), minlength=nbuckets)[:nbuckets]


def power_bucket_sums_np(block, r0, rb, cb, nbuckets, q):
    v = np.abs(block) if q == 1.0 else np.abs(block) ** q
    b = _bucket_grid(r0, block.shape[0], block.shape[1], rb, cb)
    return np.bincount(b.ravel(), weights=v.ravel(), minlength=nbuckets)[:nbuckets]


def abs_bucket_max_np(block, r0, rb, cb, nbuckets, averaged):
    nr, nc = block.shape
    v = np.abs(block)
    if averaged:
        v = v / np.arange(r0 + 1, r0 + nr + 1, dtype=np.float64)[:, None]
        v = v / np.arange(1, nc + 1, dtype=np.float64)[None, :]
    b = _bucket_grid(r0, nr, nc, rb, cb)
    best = np.full(nbuckets, -1.0)
    argk = np.zeros(nbuckets, dtype=np.int64)
    argl = np.zeros(nbuckets, dtype=np.int64)
    for w in range(nbuckets):
        sel = b == w
        if not sel.any():
            continue
        masked = np.where(sel, v, -1.0)
        flat = int(np.argmax(masked))
        i, j = divmod(flat, nc)
        best[w] = masked[i, j]
        argk[w] = r0 + i + 1
        argl[w] = j + 1
    return best, argk, argl


def frontier_update_np(block, r0, lo_r, hi_r, lo_c, hi_c, mx, mn, sm, cnt):
    nr = block.shape[0]
    for w in range(lo_r.shape[0]):
        a = max(lo_r[w], r0)
        b = min(hi_r[w], r0 + nr)
        if a >= b:
            continue
        sub = block[a - r0:b - r0, lo_c[w]:hi_c[w]]
        if sub.size == 0:
            continue
        mx[w] = max(mx[w], sub.max())
        mn[w] = min(mn[w], sub.min())
        sm[w] += sub.sum()
        cnt[w] += sub.size


def line_osc_update_np(block, r0, lo_r, hi_r, lo_c, hi_c, row_osc, col_max, col_min):
    nr = block.shape[0]
    for w in range(lo_r.shape[0]):
        seg = block[:, lo_c[w]:hi_c[w]]
        if seg.shape[1]:
            row_osc[r0:r0 + nr, w] = seg.max(axis=1) - seg.min(axis=1)
        a = max(lo_r[w], r0)
        b = min(hi_r[w], r0 + nr)
        if a < b:
            sub = block[a - r0:b - r0, :]
            np.maximum(col_max[w], sub.max(axis=0), out=col_max[w])
            np.minimum(col_min[w], sub.min(axis=0), out=col_min[w])


# --- numba versions ---------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def delta_bucket_sums_nb(block, r0, rb, cb, nbuckets, weighted):
        out = np.zeros(nbuckets)
        nr = block.shape[0] - 1
        nc = block.shape[1] - 1
        for i in range(nr):
            k = r0 + i + 1
            rk = rb[k]
            for j in range(nc):
                d = block[i, j] - block[i + 1, j] - block[i, j + 1] + block[i + 1, j + 1]
                if d == 0.0:
                    continue
                if d < 0.0:
                    d = -d
                if weighted:
                    d *= k * (j + 1.0)
                w = cb[j + 1]
                if rk > w:
                    w = rk
                out[w] += d
        return out

    @njit(cache=True)
    def power_bucket_sums_nb(block, r0, rb, cb, nbuckets, q):
        out = np.zeros(nbuckets)
        for i in range(block.shape[0]):
            rk = rb[r0 + i + 1]
            for j in range(block.shape[1]):
                v = abs(block[i, j])
                if v == 0.0:
                    continue
                if q != 1.0:
                    v = v ** q
                w = cb[j + 1]
                if rk > w:
                    w = rk
                out[w] += v
        return out

    @njit(cache=True)
    def abs_bucket_max_nb(block, r0, rb, cb, nbuckets, averaged):
        best = np.full(nbuckets, -1.0)
        argk = np.zeros(nbuckets, dtype=np.int64)
        argl = np.zeros(nbuckets, dtype=np.int64)
        for i in range(block.shape[0]):
            k = r0 + i + 1
            rk = rb[k]
            for j in range(block.shape[1]):
                v = abs(block[i, j])
                if averaged:
                    v = v / (k * (j + 1.0))
                w = cb[j + 1]
                if rk > w:
                    w = rk
                if v > best[w]:
                    best[w] = v
                    argk[w] = k
                    argl[w] = j + 1
        return best, argk, argl

    @njit(cache=True)
    def frontier_update_nb(block, r0, lo_r, hi_r, lo_c, hi_c, mx, mn, sm, cnt):
        nr = block.shape[0]
        for w in range(lo_r.shape[0]):
            a = max(lo_r[w], r0)
            b = min(hi_r[w], r0 + nr)
            for r in range(a, b):
                i = r - r0
                for j in range(lo_c[w], hi_c[w]):
                    v = block[i, j]
                    if v > mx[w]:
                        mx[w] = v
                    if v < mn[w]:
                        mn[w] = v
                    sm[w] += v
                    cnt[w] += 1

    @njit(cache=True)
    def line_osc_update_nb(block, r0, lo_r, hi_r, lo_c, hi_c, row_osc, col_max, col_min):
        nr = block.shape[0]
        for w in range(lo_r.shape[0]):
            for i in range(nr):
                if hi_c[w] > lo_c[w]:
                    hi = block[i, lo_c[w]]
                    lo = hi
                    for j in range(lo_c[w] + 1, hi_c[w]):
                        v = block[i, j]
                        if v > hi:
                            hi = v
                        if v < lo:
                            lo = v
                    row_osc[r0 + i, w] = hi - lo
                r = r0 + i
                if lo_r[w] <= r < hi_r[w]:
                    for j in range(block.shape[1]):
                        v = block[i, j]
                        if v > col_max[w, j]:
                            col_max[w, j] = v
                        if v < col_min[w, j]:
                            col_min[w, j] = v


_NP = {
    "delta_bucket_sums": delta_bucket_sums_np,
    "power_bucket_sums": power_bucket_sums_np,
    "abs_bucket_max": abs_bucket_max_np,
    "frontier_update": frontier_update_np,
    "line_osc_update": line_osc_update_np,
}

_NB = {}
if _HAVE_NUMBA:
    _NB = {
        "delta_bucket_sums": delta_bucket_sums_nb,
        "power_bucket_sums": power_bucket_sums_nb,
        "abs_bucket_max": abs_bucket_max_nb,
        "frontier_update": frontier_update_nb,
        "line_osc_update": line_osc_update_nb,
    }


def backend_names():
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def get(name, backend=None):
    """Kernel `name` from the requested backend (default: per env flag)."""
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    table = _NB if backend == "numba" else _NP
    return table[name]
