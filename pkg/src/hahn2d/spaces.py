"""Norms, membership predicates and dual-space tests.

Every norm returns a :class:`NormReport` whose verdict is exact for finitely
supported rational input and window-based otherwise.  ``member`` reports the
deciding sub-condition as the witness of a failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .convergence import (Fails, Holds, LimitSpec, Verdict, bounded_partial_sums,
                          recognize_rational, series_theta_sum, settle_series, sup_norm,
                          theta_limit, window_frontiers, window_sums)
from .sequence import (RATIONAL, DoubleSequence, Window, WindowError, corner_averages,
                       delta11, differentiate, e_block, exact_div, exact_sum, integrate)

__all__ = [
    "SpaceId", "NormReport", "hahn_norm", "hahn_seminorm_p", "bv_variation", "bs_norm",
    "lq_norm", "pinf_norm", "member", "alpha_dual_member", "beta_bp_dual_member",
    "gamma_dual_member", "functional_norm",
]

_THETA_FAMILIES = {"C", "C0", "BV0", "CS", "CS0", "H", "P", "P0"}
_PLAIN = {"Mu", "BV", "BS", "Pinf"}
_FIXED = {"Cp": ("C", "p"), "Cp0": ("C0", "p"), "Cbp": ("C", "bp"), "Cbp0": ("C0", "bp"),
          "Cr": ("C", "r"), "Cr0": ("C0", "r")}


@dataclass(frozen=True)
class SpaceId:
    """A space tag with its θ, q or inner-space parameter.

    Tags: Mu, Cp, Cp0, Cbp, Cbp0, Cr, Cr0 (or C / C0 with θ), Lq, BV, BV0 (the
    θ-null part of BV), BS, CS, CS0, H, Pinf, P, P0, d (differentiated) and
    int (integrated).
    """

    tag: str
    theta: str | None = None
    q: object = None
    inner: "SpaceId | None" = None

    def __post_init__(self):
        if self.tag in _FIXED:
            fam, th = _FIXED[self.tag]
            object.__setattr__(self, "tag", fam)
            object.__setattr__(self, "theta", th)
        t = self.tag
        if t == "Lu":
            object.__setattr__(self, "tag", "Lq")
            object.__setattr__(self, "q", 1)
            t = "Lq"
        if t in _THETA_FAMILIES:
            if self.theta is None:
                object.__setattr__(self, "theta", "bp")
            if self.theta not in ("p", "bp", "r"):
                raise ValueError(f"θ must be p, bp or r, got {self.theta!r}")
        elif self.theta is not None and t not in ("d", "int"):
            raise ValueError(f"space {t} takes no θ parameter")
        if t == "Lq":
            if self.q is None or not (self.q >= 1):
                raise ValueError("Lq needs q >= 1")
        elif self.q is not None:
            raise ValueError(f"space {t} takes no q parameter")
        if t in ("d", "int"):
            if self.inner is None:
                raise ValueError(f"{t}(E) needs an inner space")
        elif t not in _THETA_FAMILIES | _PLAIN | {"Lq"}:
            raise ValueError(f"unknown space {t!r}")

    @classmethod
    def parse(cls, text, theta=None, q=None):
        """Parse 'H', 'Cbp0', 'Lq', 'L1', 'd(H)', 'int(Lu)' and the like."""
        text = text.strip()
        for pre in ("d(", "int("):
            if text.startswith(pre) and text.endswith(")"):
                return cls(pre[:-1], inner=cls.parse(text[len(pre):-1], theta, q))
        if text.startswith("L") and text[1:].isdigit():
            return cls("Lq", q=int(text[1:]))
        if text in _FIXED:
            return cls(text)
        fam = {"BVθ0": "BV0", "CSθ": "CS", "CSθ0": "CS0", "Hθ": "H", "Pθ": "P", "Pθ0": "P0"}.get(text, text)
        if fam in _THETA_FAMILIES:
            return cls(fam, theta=theta or "bp")
        if fam == "Lq":
            return cls("Lq", q=q if q is not None else 1)
        return cls(fam)

    def __str__(self):
        if self.tag in ("d", "int"):
            return f"{self.tag}({self.inner})"
        if self.tag == "Lq":
            return "Lu" if self.q == 1 else f"L{self.q}"
        if self.theta is not None:
            return f"{self.tag}[{self.theta}]"
        return self.tag


@dataclass(frozen=True)
class NormReport:
    norm_id: str
    verdict: Verdict
    partial_values: tuple = ()
    windows: tuple = ()

    @property
    def value(self):
        return self.verdict.value


def _exact(x):
    return x.is_finite and x.mode == RATIONAL


def _grid_total(g, mode):
    vals = g.ravel().tolist()
    return exact_sum(vals) if mode == RATIONAL else math.fsum(vals)


def _delta_norm(x, spec, weighted, norm_id):
    if x.is_finite:
        d = delta11(x)
        r, c = d.support
        g = np.abs(d.values(r, c))
        if weighted and r and c:
            w = np.outer(np.arange(1, r + 1), np.arange(1, c + 1))
            g = g * (w.astype(object) if x.mode == RATIONAL else w)
        v = _grid_total(g, x.mode)
        return NormReport(norm_id, Holds(v, exact=_exact(x)), (v,))
    spec.check_tol(x)
    sums = window_sums(x, spec.windows, "hahn" if weighted else "bv")
    label = "hahn series" if weighted else "variation series"
    verdict = recognize_rational(settle_series(spec.windows, sums, spec, label=label), x.mode, spec.tol)
    if verdict.fails:
        verdict = replace(verdict, note=f"{label} diverges")
    return NormReport(norm_id, verdict, tuple(float(s) for s in sums), spec.windows)


def hahn_norm(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> NormReport:
    """Σ kl |Δx_kl|."""
    return _delta_norm(x, spec, True, "hahn")


def bv_variation(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> NormReport:
    """Σ |Δx_kl|."""
    return _delta_norm(x, spec, False, "bv")


def _tail_sup(x, spec):
    """lim_N sup_{k,l>=N} |x_kl|, truncated to the window schedule: for each
    window, the max modulus over all frontier quadrants from that window on."""
    if x.is_finite:
        z = 0 if x.mode == RATIONAL else 0.0
        return Holds(z, exact=_exact(x))
    _, _, mx = window_frontiers(x, spec.windows)
    tails = np.maximum.accumulate(mx[::-1])[::-1]
    return recognize_rational(settle_series(spec.windows, tails, spec, label="tail sups"),
                              x.mode, spec.tol)


def hahn_seminorm_p(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> NormReport:
    """Σ kl|Δx_kl| + lim_N sup_{k,l>=N} |x_kl|."""
    h = hahn_norm(x, spec)
    t = _tail_sup(x, spec)
    for v in (h.verdict, t):
        if v.fails:
            return NormReport("hahn-p", v, h.partial_values, h.windows)
    for v in (h.verdict, t):
        if v.inconclusive:
            return NormReport("hahn-p", v, h.partial_values, h.windows)
    total = h.verdict.value + t.value
    return NormReport("hahn-p", Holds(total, exact=h.verdict.exact and t.exact),
                      h.partial_values, h.windows)


def bs_norm(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> NormReport:
    """sup_{m,n} |s_mn|."""
    return NormReport("bs", bounded_partial_sums(x, spec))


def _exact_root(v, q):
    """v^(1/q) as a Fraction when it is rational, else None."""
    v = Fraction(v)
    if q == 1:
        return v
    out = []
    for part in (v.numerator, v.denominator):
        r = round(part ** (1.0 / q))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** q == part:
                out.append(cand)
                break
        else:
            return None
    return Fraction(out[0], out[1])


def lq_norm(x: DoubleSequence, q=1, spec: LimitSpec = LimitSpec()) -> NormReport:
    """(Σ |x_kl|^q)^(1/q), q >= 1."""
    if not q >= 1:
        raise ValueError("lq_norm needs q >= 1")
    nid = "lq" if q != 1 else "l1"
    if x.is_finite:
        r, c = x.support
        g = np.abs(x.values(r, c))
        int_q = float(q).is_integer()
        if x.mode == RATIONAL and int_q:
            total = exact_sum((g ** int(q)).ravel().tolist())
            root = _exact_root(total, int(q))
            if root is not None:
                v = int(root) if root.denominator == 1 else root
                return NormReport(nid, Holds(v, exact=True), (v,))
            v = float(total) ** (1.0 / q)
            return NormReport(nid, Holds(v, note="irrational root"), (v,))
        v = math.fsum((np.asarray(g, dtype=float) ** float(q)).ravel().tolist()) ** (1.0 / float(q))
        return NormReport(nid, Holds(v), (v,))
    spec.check_tol(x)
    sums = window_sums(x, spec.windows, "lq", float(q))
    verdict = settle_series(spec.windows, sums, spec, label="power sums")
    if verdict.holds:
        verdict = recognize_rational(replace(verdict, value=verdict.value ** (1.0 / float(q))),
                                     x.mode, spec.tol)
    elif verdict.fails:
        verdict = replace(verdict, note="power series diverges")
    return NormReport(nid, verdict, tuple(float(s) for s in sums), spec.windows)


def pinf_norm(x: DoubleSequence, spec: LimitSpec = LimitSpec()) -> NormReport:
    """sup_{m,n} |s_mn| / (mn)."""
    return NormReport("pinf", sup_norm(corner_averages(x), spec))


# --- membership -------------------------------------------------------------

def _is_zero(v, spec, exact):
    if v is None:
        return False
    if exact:
        return v == 0
    return abs(v) <= max(spec.tol, 0.0)


def _null(verdict, spec, what):
    """Turn a limit verdict into a 'limit is zero' verdict."""
    if not verdict.holds:
        return verdict
    if _is_zero(verdict.value, spec, verdict.exact):
        return verdict
    return Fails(f"{what} is {verdict.value}, not 0", verdict.diagnostics,
                 value=verdict.value, exact=verdict.exact)


def _labelled(verdict, label):
    if verdict.fails:
        return replace(verdict, witness=label, note=verdict.note or label)
    return verdict


def member(x: DoubleSequence, space: SpaceId, spec: LimitSpec = LimitSpec()) -> Verdict:
    """Decide x ∈ space."""
    if isinstance(space, str):
        space = SpaceId.parse(space)
    t, th = space.tag, space.theta
    if t == "Mu":
        return _labelled(sup_norm(x, spec), "unbounded")
    if t == "C":
        return _labelled(theta_limit(x, spec, th), f"not {th}-convergent")
    if t == "C0":
        return _labelled(_null(theta_limit(x, spec, th), spec, f"{th}-limit"), f"not {th}-null")
    if t == "Lq":
        return _labelled(lq_norm(x, space.q, spec).verdict, "power series diverges")
    if t == "BV":
        return _labelled(bv_variation(x, spec).verdict, "variation series diverges")
    if t == "BV0":
        v = bv_variation(x, spec).verdict
        if v.fails:
            return _labelled(v, "variation series diverges")
        n = member(x, SpaceId("C0", th), spec)
        if n.fails or v.inconclusive:
            return n if n.fails else v
        return n if n.inconclusive else v
    if t == "BS":
        return _labelled(bs_norm(x, spec).verdict, "partial sums unbounded")
    if t == "CS":
        return _labelled(series_theta_sum(x, spec, th), f"series not {th}-summable")
    if t == "CS0":
        s = series_theta_sum(x, spec, th)
        return _labelled(_null(s, spec, f"{th}-sum"), f"series not {th}-summable to 0")
    if t == "H":
        h = hahn_norm(x, spec).verdict
        if h.fails:
            return replace(h, witness="hahn series diverges", note="hahn series diverges")
        n = member(x, SpaceId("C0", th), spec)
        if n.fails:
            return replace(n, witness=f"not {th}-null", note=f"not in C{th}0: {n.note}".rstrip(": "))
        if h.inconclusive:
            return h
        if n.inconclusive:
            return n
        return h
    if t in ("Pinf", "P", "P0"):
        # P-spaces are domains of the averaging matrix T: x ∈ P iff Tx ∈ BS / CS / CS0
        from .matrix4d import apply, make_T
        target = {"Pinf": SpaceId("BS"), "P": SpaceId("CS", th), "P0": SpaceId("CS0", th)}[t]
        return member(apply(make_T(), x, spec), target, spec)
    if t == "d":
        return member(differentiate(x), space.inner, spec)
    if t == "int":
        return member(integrate(x), space.inner, spec)
    raise ValueError(f"unsupported space {space}")


# --- duals --------------------------------------------------------------------

def alpha_dual_member(a: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """sup_{k,l} (1/kl) Σ_{m<=k, n<=l} |a_mn| < oo."""
    return _labelled(sup_norm(corner_averages(a, absolute=True), spec),
                     "corner averages of |a| unbounded")


def gamma_dual_member(a: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """a ∈ P∞ (bounded corner averages)."""
    return _labelled(pinf_norm(a, spec).verdict, "corner averages unbounded")


def beta_bp_dual_member(a: DoubleSequence, spec: LimitSpec = LimitSpec()) -> Verdict:
    """Bounded corner averages whose bp-limit exists."""
    g = gamma_dual_member(a, spec)
    if g.fails:
        return g
    lim = theta_limit(corner_averages(a), spec, "bp")
    if lim.fails:
        return _labelled(lim, "corner averages not bp-convergent")
    if g.inconclusive:
        return g
    if lim.inconclusive:
        return lim
    return replace(g, diagnostics=g.diagnostics + (("bp-limit", lim.value),))


def functional_norm(a: DoubleSequence, probe_window: Window) -> object:
    """max over the probe of |Σ a_kl x^(m,n)_kl| with test elements
    x^(m,n) = e_block(m,n) / (mn)."""
    if not a.is_finite:
        raise ValueError("functional_norm needs a finitely supported sequence")
    r, c = a.support
    if not probe_window.covers(r, c):
        raise WindowError(f"probe {probe_window} does not cover support {r}x{c}")
    M, N = probe_window.rows, probe_window.cols
    g = a.values(M, N)
    best = 0
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            t = e_block(m, n, a.mode).values(M, N)
            dot = _grid_total(g * t, a.mode)
            val = abs(exact_div(dot, m * n) if a.mode == RATIONAL else dot / (m * n))
            if val > best:
                best = val
    return best
