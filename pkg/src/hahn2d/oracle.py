"""Brute-force checks of the summation identities and norm equalities on
small exact instances.

The oracle recomputes each side from plain Python ``Fraction`` arithmetic
over explicit index loops and compares it with the library result.  Every
random instance is drawn from ``random.Random`` seeded by the case name and
an integer seed, so a seed fully determines a run.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .characterize import hahn_matrix_norm, matrix_norm_report
from .convergence import format_scalar
from .matrix4d import (FiniteMatrix, abel_double_summation, apply, make_B, make_D,
                       make_E, make_F)
from .sequence import FiniteSequence, Window, e_block, hahn_coefficients, zero
from .spaces import functional_norm, hahn_norm, pinf_norm

__all__ = [
    "OracleCase", "SUITES", "SEQ_SHAPE", "MAT_SHAPE", "MARGIN",
    "random_sequence", "random_matrix", "identity_3_8", "identity_4_1",
    "identity_betadual", "identity_D", "identity_F", "abel_identity",
    "determining_set_decompose",
    "functional_norm_bruteforce", "matrix_norm_bruteforce", "run_suite",
    "write_records", "read_records",
]

SEQ_SHAPE = (6, 6)
MAT_SHAPE = (4, 4, 4, 4)
MARGIN = 2


@dataclass
class OracleCase:
    case_id: str
    seed: object
    description: str
    relation: str
    passed: bool
    lhs: object
    rhs: object
    details: dict = field(default_factory=dict)

    def record(self):
        d = asdict(self)
        d["lhs"] = format_scalar(self.lhs)
        d["rhs"] = format_scalar(self.rhs)
        d["details"] = {k: format_scalar(v) if isinstance(v, (Fraction, int, float)) and not isinstance(v, bool)
                        else v for k, v in self.details.items()}
        return d


# --- instances ------------------------------------------------------------------

def _rng(name, seed):
    return random.Random(f"{name}:{seed}")


def random_fraction(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def random_sequence(rng, shape=SEQ_SHAPE):
    r, c = shape
    return FiniteSequence([[random_fraction(rng) for _ in range(c)] for _ in range(r)])


def random_matrix(rng, shape=MAT_SHAPE):
    M, N, K, L = shape
    return FiniteMatrix([[[[random_fraction(rng) for _ in range(L)] for _ in range(K)]
                          for _ in range(N)] for _ in range(M)])


def _x(x, k, l):
    return Fraction(x.eval(k, l))


def _bound(x):
    r, c = x.support
    return r + MARGIN, c + MARGIN


def _mismatch(pairs):
    """First (index, lhs, rhs) with lhs != rhs, or None."""
    for idx, a, b in pairs:
        if a != b:
            return idx, a, b
    return None


def _case(case_id, seed, desc, relation, pairs, details=None):
    pairs = list(pairs)
    bad = _mismatch(pairs)
    details = dict(details or {})
    details["checked"] = len(pairs)
    if bad is None:
        lhs = pairs[-1][1] if pairs else Fraction(0)
        rhs = pairs[-1][2] if pairs else Fraction(0)
        return OracleCase(case_id, seed, desc, relation, True, lhs, rhs, details)
    idx, a, b = bad
    details["at"] = str(idx)
    return OracleCase(case_id, seed, desc, relation, False, a, b, details)


# --- identities -------------------------------------------------------------------

def _hahn_y(x, i, j):
    return i * j * (_x(x, i, j) - _x(x, i + 1, j) - _x(x, i, j + 1) + _x(x, i + 1, j + 1))


def identity_3_8(x, seed=None):
    """Σ_{i=k..m, j=l..n} y_ij/(ij) = x_kl - x_{m+1,l} - x_{k,n+1} + x_{m+1,n+1}
    with y = hahn_coefficients(x), for all (k,l) <= (m,n) <= support + margin."""
    R, C = _bound(x)
    y = hahn_coefficients(x)
    pairs = []
    # the library coefficients must agree with the defining formula
    for i in range(1, R + 1):
        for j in range(1, C + 1):
            pairs.append((("y", i, j), Fraction(y.eval(i, j)), _hahn_y(x, i, j)))
    for k in range(1, R + 1):
        for l in range(1, C + 1):
            # running column sums over i for the fixed corner (k, l)
            acc = {}
            for m in range(k, R + 1):
                for n in range(l, C + 1):
                    col = acc.get(n, Fraction(0)) + Fraction(y.eval(m, n)) / (m * n)
                    acc[n] = col
                    lhs = sum((acc[j] for j in range(l, n + 1)), Fraction(0))
                    rhs = _x(x, k, l) - _x(x, m + 1, l) - _x(x, k, n + 1) + _x(x, m + 1, n + 1)
                    pairs.append(((k, l, m, n), lhs, rhs))
    return _case("identity_3_8", seed, x.label, "telescoped hahn coefficients", pairs)


def _direct(A_entry, x, m, n):
    return sum((A_entry(m, n, k, l) * _x(x, k, l)
                for k in range(1, m + 1) for l in range(1, n + 1)), Fraction(0))


def _boundary(A_entry, x, m, n):
    return sum((A_entry(m, n, k, l) * (_x(x, m + 1, l) + _x(x, k, n + 1) - _x(x, m + 1, n + 1))
                for k in range(1, m + 1) for l in range(1, n + 1)), Fraction(0))


def _transformed(E_entry, y, m, n):
    return sum((E_entry(m, n, k, l) * Fraction(y.eval(k, l))
                for k in range(1, m + 1) for l in range(1, n + 1)), Fraction(0))


def identity_4_1(A, x, seed=None):
    """Σ_{k<=m,l<=n} a_mnkl x_kl = (Ey)_mn + boundary terms, y the hahn
    coefficients of x and E = make_E(A).

    The boundary terms Σ a_mnkl (x_{m+1,l} + x_{k,n+1} - x_{m+1,n+1}) vanish
    in the θ-limit for x in H; ``literal_holds`` counts the (m, n) where the
    uncorrected equality already holds exactly.
    """
    E = make_E(A)
    y = hahn_coefficients(x)
    a = lambda m, n, k, l: Fraction(A.entry(m, n, k, l))  # noqa: E731

    def e_entry(m, n, k, l):
        # e_mnkl from its definition, independent of the library matrix
        return sum((a(m, n, i, j) for i in range(1, k + 1) for j in range(1, l + 1)),
                   Fraction(0)) / (k * l)

    M = max(A.support[0], x.support[0]) + MARGIN
    N = max(A.support[1], x.support[1]) + MARGIN
    pairs, literal = [], 0
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            for k in range(1, m + 1):
                for l in range(1, n + 1):
                    pairs.append((("E", m, n, k, l), Fraction(E.entry(m, n, k, l)), e_entry(m, n, k, l)))
            lhs = _direct(a, x, m, n)
            ey = _transformed(e_entry, y, m, n)
            literal += lhs == ey
            pairs.append(((m, n), lhs, ey + _boundary(a, x, m, n)))
    return _case("identity_4_1", seed, f"{A.label}, {x.label}", "direct sum = (Ey) + boundary",
                 pairs, {"literal_holds": literal, "points": M * N})


def identity_betadual(a, x, seed=None):
    """Rows-constant case a_mnkl = a_kl: Σ a_kl x_kl = (By)_mn + boundary,
    B = make_B(a)."""
    B = make_B(a)
    y = hahn_coefficients(x)
    row = lambda m, n, k, l: _x(a, k, l)  # noqa: E731

    def b_entry(m, n, k, l):
        return sum((_x(a, i, j) for i in range(1, k + 1) for j in range(1, l + 1)),
                   Fraction(0)) / (k * l)

    M = max(a.support[0], x.support[0]) + MARGIN
    N = max(a.support[1], x.support[1]) + MARGIN
    pairs = []
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            for k in range(1, m + 1):
                for l in range(1, n + 1):
                    pairs.append((("B", m, n, k, l), Fraction(B.entry(m, n, k, l)), b_entry(m, n, k, l)))
            pairs.append(((m, n), _direct(row, x, m, n),
                          _transformed(b_entry, y, m, n) + _boundary(row, x, m, n)))
    return _case("identity_betadual", seed, f"{a.label}, {x.label}",
                 "rows-constant direct sum = (By) + boundary", pairs)


def identity_D(a, x, seed=None):
    """a_mn x_mn = (Dy)_mn with D = make_D(a) and y the hahn coefficients of x."""
    D = make_D(a)
    y = hahn_coefficients(x)
    R = max(a.support[0], x.support[0]) + MARGIN
    C = max(a.support[1], x.support[1]) + MARGIN
    yr, yc = y.support
    pairs = []
    for m in range(1, R + 1):
        for n in range(1, C + 1):
            for k in range(m, R + 1):
                for l in range(n, C + 1):
                    pairs.append((("D", m, n, k, l), Fraction(D.entry(m, n, k, l)),
                                  _x(a, m, n) / (k * l)))
            dy = sum((Fraction(D.entry(m, n, k, l)) * Fraction(y.eval(k, l))
                      for k in range(m, yr + 1) for l in range(n, yc + 1)), Fraction(0))
            pairs.append(((m, n), dy, _x(a, m, n) * _x(x, m, n)))
    return _case("identity_D", seed, f"{a.label}, {x.label}", "a x = (Dy)", pairs)


def identity_F(A, x, seed=None):
    """(Fx)_mn = mn Δ11 (Ax)_mn with F = make_F(A)."""
    Fx = apply(make_F(A), x)
    M = A.support[0] + MARGIN
    N = A.support[1] + MARGIN
    K, L = A.support[2], A.support[3]

    def ax(m, n):
        return sum((Fraction(A.entry(m, n, k, l)) * _x(x, k, l)
                    for k in range(1, K + 1) for l in range(1, L + 1)), Fraction(0))

    pairs = []
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            rhs = m * n * (ax(m, n) - ax(m + 1, n) - ax(m, n + 1) + ax(m + 1, n + 1))
            pairs.append(((m, n), Fraction(Fx.eval(m, n)), rhs))
    return _case("identity_F", seed, f"{A.label}, {x.label}", "Fx = mn Δ(Ax)", pairs)


def abel_identity(a, x, seed=None):
    """Abel double summation by parts against the direct sum."""
    M = max(a.support[0], x.support[0]) + MARGIN
    N = max(a.support[1], x.support[1]) + MARGIN
    pairs = []
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            direct = sum((_x(a, k, l) * _x(x, k, l)
                          for k in range(1, m + 1) for l in range(1, n + 1)), Fraction(0))
            pairs.append(((m, n), Fraction(abel_double_summation(a, x, m, n)), direct))
    return _case("abel_identity", seed, f"{a.label}, {x.label}", "summation by parts", pairs)


# --- determining set and norms ----------------------------------------------------

def determining_set_decompose(x, seed=None):
    """x = Σ z_kl e_block(k,l)/(kl) with z = hahn_coefficients(x), and
    Σ|z| = hahn_norm(x)."""
    R, C = x.support
    z = hahn_coefficients(x)
    recon = [[Fraction(0)] * (C + MARGIN) for _ in range(R + MARGIN)]
    total = Fraction(0)
    zr, zc = z.support
    for k in range(1, zr + 1):
        for l in range(1, zc + 1):
            zk = Fraction(z.eval(k, l))
            total += abs(zk)
            if zk:
                d = e_block(k, l)
                for i in range(1, k + 1):
                    for j in range(1, l + 1):
                        recon[i - 1][j - 1] += zk * Fraction(d.eval(i, j)) / (k * l)
    pairs = [((i + 1, j + 1), recon[i][j], _x(x, i + 1, j + 1))
             for i in range(R + MARGIN) for j in range(C + MARGIN)]
    norm = hahn_norm(x)
    pairs.append((("sum|z|",), total, norm.value))
    return _case("determining_set_decompose", seed, x.label, "reconstruction and Σ|z| = ‖x‖_H",
                 pairs, {"hahn_norm": norm.value, "exact": norm.verdict.exact})


def functional_norm_bruteforce(a, probe=None, seed=None):
    """max over the probe of |Σ_{k<=m,l<=n} a_kl|/(mn) = pinf_norm(a), with the
    determining-set functional norm agreeing."""
    r, c = a.support
    if probe is None:
        probe = Window(max(2 * r, 1), max(2 * c, 1))
    best = Fraction(0)
    for m in range(1, probe.rows + 1):
        for n in range(1, probe.cols + 1):
            s = sum((_x(a, k, l) for k in range(1, m + 1) for l in range(1, n + 1)), Fraction(0))
            best = max(best, abs(s) / (m * n))
    p = pinf_norm(a)
    f = Fraction(functional_norm(a, probe))
    pairs = [(("functional",), f, best), (("pinf",), Fraction(p.value), best)]
    return _case("functional_norm_bruteforce", seed, a.label, "‖f‖ = ‖a‖_P∞", pairs,
                 {"probe": str(probe), "functional": f, "pinf": p.value})


def matrix_norm_bruteforce(A, probe=None, seed=None):
    """hahn_matrix_norm(A) = max_{(k,l) <= probe} ‖A(e_block(k,l)/(kl))‖_H."""
    M, N, K, L = A.support
    if probe is None:
        s = max(M, N, K, L, 1)
        probe = Window(2 * s, 2 * s)
    best = Fraction(0)
    for k in range(1, probe.rows + 1):
        for l in range(1, probe.cols + 1):
            d = e_block(k, l) / (k * l)
            v = Fraction(hahn_norm(apply(A, d)).value)
            best = max(best, v)
    lib = hahn_matrix_norm(A, probe)
    rep = matrix_norm_report(A, probe)
    flag_ok = rep["discrepancy"] == rep["contributing_offdiag"]
    pairs = [(("norm",), Fraction(lib), best), (("flag",), rep["discrepancy"], rep["contributing_offdiag"])]
    return _case("matrix_norm_bruteforce", seed, A.label, "‖A‖_(H,H) = determining-set sup", pairs,
                 {"probe": str(probe), "unweighted": rep["unweighted"],
                  "discrepancy": rep["discrepancy"], "contributing_offdiag": rep["contributing_offdiag"],
                  "flag_consistent": flag_ok})


# --- suites --------------------------------------------------------------------------

def _rescaled(x):
    n = Fraction(hahn_norm(x).value)
    return x / n if n > 1 else x


def _identities(seed):
    rng = _rng("identity_3_8", seed)
    yield identity_3_8(random_sequence(rng, (5, 5)), seed)
    rng = _rng("identity_4_1", seed)
    yield identity_4_1(random_matrix(rng, (3, 3, 3, 3)), random_sequence(rng, (3, 3)), seed)
    rng = _rng("identity_betadual", seed)
    yield identity_betadual(random_sequence(rng, (4, 4)), random_sequence(rng, (4, 4)), seed)
    rng = _rng("abel_identity", seed)
    yield abel_identity(random_sequence(rng, (5, 5)), random_sequence(rng, (5, 5)), seed)
    rng = _rng("identity_D", seed)
    yield identity_D(random_sequence(rng, (4, 4)), random_sequence(rng, (5, 5)), seed)
    rng = _rng("identity_F", seed)
    yield identity_F(random_matrix(rng, (3, 3, 3, 3)), random_sequence(rng, (3, 3)), seed)
    rng = _rng("determining_set", seed)
    yield determining_set_decompose(_rescaled(random_sequence(rng)), seed)


def _norms(seed):
    rng = _rng("functional_norm", seed)
    yield functional_norm_bruteforce(random_sequence(rng, (5, 5)), seed=seed)
    rng = _rng("matrix_norm", seed)
    yield matrix_norm_bruteforce(random_matrix(rng), seed=seed)


def _fixed():
    """Deterministic cases that do not depend on the seed."""
    yield identity_3_8(e_block(3, 3), "fixed")
    yield identity_3_8(zero(), "fixed")
    yield identity_4_1(FiniteMatrix([[[[0]]]]), zero(), "fixed")
    yield determining_set_decompose(e_block(2, 2) / 4, "fixed")
    yield functional_norm_bruteforce(FiniteSequence([[1]]), seed="fixed")
    yield functional_norm_bruteforce(e_block(3, 3), seed="fixed")
    yield matrix_norm_bruteforce(FiniteMatrix([[[[1]]]]), seed="fixed")


SUITES = ("identities", "norms", "all")


def run_suite(suite="all", seed=42, count=1):
    """Oracle cases for `suite` over seeds seed, seed+1, ..., seed+count-1."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    cases = []
    if suite == "all":
        cases.extend(_fixed())
    for s in range(seed, seed + count):
        if suite in ("identities", "all"):
            cases.extend(_identities(s))
        if suite in ("norms", "all"):
            cases.extend(_norms(s))
    return cases


def write_records(cases, path):
    with open(path, "w", encoding="utf-8") as fh:
        for c in cases:
            fh.write(json.dumps(c.record(), ensure_ascii=False) + "\n")


def read_records(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
