"""Command-line front end.

Objects are defined in a small text document, one per line::

    # comments start with '#'
    seq rowinv = piece(k==1, 1/l) piece(true, 0)
    seq diag float = piece(k==l, 1/(k*l)) piece(true, 0)
    seq g = [[3, -7], [2, 0]]
    seq u = e_unit(2, 3)
    mat T2 = 1/(m*n) where k<=m and l<=n
    mat A = [[[[1, 2], [0, 1]]]]
    mat EA = E(A)

A definition is a grid literal, an expression (optionally followed by
``where COND``, which zeroes the entry outside COND) or a special tag.  A line
whose brackets are still open continues on the next line.  The built-in
corpus (``hahn2d.corpus``) is always available; document names shadow it.

Exit status: 0 success, 1 some verdict Fails or an oracle case mismatches,
2 Inconclusive without Fails, 3 usage, parse or evaluation error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import corpus, expr
from .characterize import ClassId, classify, matrix_norm_report
from .convergence import Holds, LimitSpec, Verdict, format_scalar
from .matrix4d import (ExprMatrix, FiniteMatrix, Matrix4D, apply, make_B, make_D, make_E,
                       make_F, make_T)
from .oracle import SUITES, run_suite
from .sequence import (FLOAT, RATIONAL, DoubleSequence, ExprSequence, FiniteSequence,
                       ModeError, Window, WindowError, special)
from .spaces import (SpaceId, alpha_dual_member, beta_bp_dual_member, bs_norm, bv_variation,
                     gamma_dual_member, hahn_norm, hahn_seminorm_p, lq_norm, member, pinf_norm)

__all__ = ["ObjectSpec", "Report", "DocumentError", "parse_document", "build_objects", "run", "main",
           "encode", "decode", "parse_report", "EXIT_OK", "EXIT_FAILS", "EXIT_INCONCLUSIVE",
           "EXIT_ERROR"]

EXIT_OK, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3

SEQ_SPECIALS = {"e": 0, "e_row": 1, "e_col": 1, "e_unit": 2, "e_block": 2, "zero": 0}
MAT_DERIVED = {"D": "seq", "B": "seq", "E": "mat", "F": "mat"}


class DocumentError(ValueError):
    def __init__(self, message, line, col=1):
        self.line, self.col = line, col
        super().__init__(f"line {line}, column {col}: {message}")


@dataclass(frozen=True)
class ObjectSpec:
    name: str
    kind: str        # "sequence" | "matrix"
    form: str        # "grid" | "expr" | "special"
    definition: str
    mode: str
    line: int = 0
    col: int = 1


# --- document parsing -------------------------------------------------------------

_HEAD = re.compile(r"\s*(seq|mat)\s+([A-Za-z_][A-Za-z0-9_]*)\s*(?:\s(rational|float))?\s*=\s*")
_SPECIAL = re.compile(r"([A-Za-z_]+)\s*(?:\((.*)\))?\s*$", re.S)
_NUMBER = re.compile(r"-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?(/\d+)?")


def _logical_lines(text):
    """(line_no, text) with bracket-continuation joined."""
    buf, start, depth = [], 0, 0
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not buf and not line.strip():
            continue
        if not buf:
            start = no
        buf.append(line)
        depth += line.count("[") + line.count("(") - line.count("]") - line.count(")")
        if depth <= 0:
            yield start, " ".join(buf)
            buf, depth = [], 0
    if buf:
        yield start, " ".join(buf)


def _classify_definition(kind, body):
    b = body.strip()
    if b.startswith("["):
        return "grid"
    m = _SPECIAL.fullmatch(b)
    if m:
        tag = m.group(1)
        if kind == "sequence" and tag in SEQ_SPECIALS and (m.group(2) is not None or SEQ_SPECIALS[tag] == 0):
            return "special"
        if kind == "matrix" and (tag in ("T", "zero") and m.group(2) is None
                                 or tag in MAT_DERIVED and m.group(2) is not None):
            return "special"
    return "expr"


def parse_document(text, default_mode=RATIONAL):
    """Parse object definitions; raise DocumentError with line/column."""
    specs, seen = [], {}
    for no, line in _logical_lines(text):
        m = _HEAD.match(line)
        if not m:
            raise DocumentError("expected 'seq NAME [rational|float] = DEF' or 'mat NAME = DEF'",
                                no, len(line) - len(line.lstrip()) + 1)
        kw, name, mode = m.group(1), m.group(2), m.group(3) or default_mode
        if name in seen:
            raise DocumentError(f"name {name!r} already defined on line {seen[name]}", no, m.start(2) + 1)
        seen[name] = no
        body = line[m.end():].strip()
        if not body:
            raise DocumentError("missing definition", no, m.end() + 1)
        kind = "sequence" if kw == "seq" else "matrix"
        specs.append(ObjectSpec(name, kind, _classify_definition(kind, body), body, mode, no, m.end() + 1))
    return specs


def _parse_grid(spec):
    """Nested list literal -> nested lists of scalars, checked rectangular."""
    text = spec.definition
    pos = 0

    def err(msg, at):
        raise DocumentError(msg, spec.line, spec.col + at)

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def value():
        nonlocal pos
        skip()
        if pos < len(text) and text[pos] == "[":
            pos += 1
            items = []
            skip()
            if pos < len(text) and text[pos] == "]":
                pos += 1
                return items
            while True:
                items.append(value())
                skip()
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == "]":
                    pos += 1
                    return items
                err("expected ',' or ']'", pos)
        m = _NUMBER.match(text, pos)
        if not m:
            err("expected a number or '['", pos)
        pos = m.end()
        q = Fraction(m.group(0))
        return q if spec.mode == RATIONAL else float(q)

    out = value()
    skip()
    if pos != len(text):
        err("unexpected text after grid", pos)

    def shape(v, depth):
        if not isinstance(v, list):
            return ()
        subs = [shape(s, depth + 1) for s in v]
        if any(s != subs[0] for s in subs):
            err("non-rectangular grid", 0)
        return (len(v),) + (subs[0] if subs else ())

    dims = shape(out, 0)
    want = 2 if spec.kind == "sequence" else 4
    if len(dims) != want and not (dims and dims[-1] == 0):
        err(f"{spec.kind} grid must be {want}-dimensional, got {len(dims)}", 0)
    return out


def _expr_source(spec):
    body = spec.definition
    depth = 0
    for i in range(len(body)):
        c = body[i]
        depth += c == "("
        depth -= c == ")"
        if depth == 0 and body.startswith("where", i) and (i == 0 or not body[i - 1].isalnum()) \
                and (i + 5 >= len(body) or not body[i + 5].isalnum()):
            return f"piece({body[i + 5:].strip()}, {body[:i].strip()}) piece(true, 0)", i
    return body, None


def _build(spec, env):
    try:
        if spec.form == "grid":
            data = _parse_grid(spec)
            if spec.kind == "sequence":
                return FiniteSequence(data, spec.mode, label=spec.name)
            return FiniteMatrix(data, spec.mode, label=spec.name)
        if spec.form == "special":
            m = _SPECIAL.fullmatch(spec.definition.strip())
            tag, args = m.group(1), m.group(2)
            if spec.kind == "sequence":
                params = [int(a) for a in args.split(",")] if args and args.strip() else []
                if len(params) != SEQ_SPECIALS[tag]:
                    raise DocumentError(f"{tag} takes {SEQ_SPECIALS[tag]} parameter(s)", spec.line, spec.col)
                return special(tag, *params, mode=spec.mode)
            if tag == "T":
                return make_T(spec.mode)
            if tag == "zero":
                return FiniteMatrix(np.zeros((0, 0, 0, 0)), spec.mode, label=spec.name)
            src = args.strip()
            if src not in env:
                raise DocumentError(f"unknown object {src!r}", spec.line, spec.col)
            obj = env[src]
            need = MAT_DERIVED[tag]
            if need == "seq" and not isinstance(obj, DoubleSequence):
                raise DocumentError(f"{tag}(...) needs a sequence", spec.line, spec.col)
            if need == "mat" and not isinstance(obj, Matrix4D):
                raise DocumentError(f"{tag}(...) needs a matrix", spec.line, spec.col)
            return {"D": make_D, "B": make_B, "E": make_E, "F": make_F}[tag](obj)
        source, _ = _expr_source(spec)
        variables = expr.SEQUENCE_VARS if spec.kind == "sequence" else expr.MATRIX_VARS
        try:
            tree = expr.parse(source, variables)
        except expr.ExprSyntaxError as exc:
            raise DocumentError(str(exc), spec.line, spec.col + min(exc.pos, len(spec.definition))) from exc
        cls = ExprSequence if spec.kind == "sequence" else ExprMatrix
        return cls(tree, spec.mode, label=spec.name)
    except (ModeError, ValueError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc), spec.line, spec.col) from exc


def build_objects(specs, base=None):
    env = dict(base or {})
    for spec in specs:
        env[spec.name] = _build(spec, env)
    return env


def _corpus_env(mode):
    return build_objects(parse_document(corpus.DOCUMENT, mode))


# --- machine encoding ---------------------------------------------------------------

def encode(v):
    """JSON-ready form; scalars keep their type (rationals as 'p/q', floats
    with 17 significant digits, integers as JSON integers)."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return {"rational": f"{v.numerator}/{v.denominator}"}
    if isinstance(v, (float, np.floating)):
        return {"float": format(float(v), ".17g")}
    if isinstance(v, Verdict):
        return {"outcome": v.outcome.value, "value": encode(v.value), "witness": encode(v.witness),
                "exact": v.exact, "note": v.note, "diagnostics": encode(list(v.diagnostics))}
    if isinstance(v, FiniteSequence):
        r, c = v.support
        return {"grid": encode(v.values(r, c).tolist()) if r and c else []}
    if isinstance(v, Window):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [encode(t) for t in v]
    if isinstance(v, dict):
        return {str(k): encode(t) for k, t in v.items()}
    if isinstance(v, np.ndarray):
        return encode(v.tolist())
    return str(v)


def decode(v):
    if isinstance(v, dict):
        if set(v) == {"rational"}:
            return Fraction(v["rational"])
        if set(v) == {"float"}:
            return float(v["float"])
        return {k: decode(t) for k, t in v.items()}
    if isinstance(v, list):
        return [decode(t) for t in v]
    return v


def parse_report(text):
    """Records of a machine report with scalars restored."""
    return [decode(json.loads(line)) for line in text.splitlines() if line.strip()]


# --- commands -------------------------------------------------------------------------

class CommandError(Exception):
    pass


@dataclass
class Report:
    status: int
    records: list
    lines: list
    report: str = "text"
    out: str | None = None

    def machine(self):
        return "".join(json.dumps(encode(r), ensure_ascii=False) + "\n" for r in self.records)


def _status(verdicts):
    vs = list(verdicts)
    if any(v.fails for v in vs):
        return EXIT_FAILS
    if any(v.inconclusive for v in vs):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _lookup(env, name, kind):
    if name not in env:
        raise CommandError(f"unknown object {name!r}")
    obj = env[name]
    want = DoubleSequence if kind == "sequence" else Matrix4D
    if not isinstance(obj, want):
        raise CommandError(f"{name!r} is not a {kind}")
    return obj


def _spec(args, theta=None):
    kw = {"tol": args.tol} if args.tol is not None else {}
    th = theta or getattr(args, "theta", None) or "bp"
    if args.window:
        return LimitSpec.ending_at(Window.parse(args.window), mode=th, **kw)
    return LimitSpec(mode=th, **kw)


def _verdict_text(v):
    s = str(v)
    extra = []
    if v.holds and v.witness is not None:
        extra.append(f"at {v.witness}")
    if v.note:
        extra.append(v.note)
    if v.exact:
        extra.append("exact")
    return s + (f"  [{'; '.join(extra)}]" if extra else "")


def _cmd_eval(args, env):
    obj = env.get(args.name)
    if obj is None:
        raise CommandError(f"unknown object {args.name!r}")
    idx = [int(i) for i in args.index]
    want = 2 if isinstance(obj, DoubleSequence) else 4
    if len(idx) != want:
        raise CommandError(f"{args.name} takes {want} indices")
    val = obj.eval(*idx) if want == 2 else obj.entry(*idx)
    rec = {"kind": "value", "name": args.name, "index": idx, "value": val}
    return [rec], [f"{args.name}{tuple(idx)} = {format_scalar(val)}"], EXIT_OK


_NORMS = {"hahn": hahn_norm, "hahn-p": hahn_seminorm_p, "bv": bv_variation, "bs": bs_norm,
          "pinf": pinf_norm}


def _cmd_norm(args, env):
    x = _lookup(env, args.name, "sequence")
    spec = _spec(args)
    if args.norm == "lq":
        rep = lq_norm(x, args.q, spec)
    else:
        rep = _NORMS[args.norm](x, spec)
    rec = {"kind": "norm", "name": args.name, "norm": rep.norm_id, "verdict": rep.verdict,
           "partial_values": list(rep.partial_values)}
    return [rec], [f"{args.norm}({args.name}) : {_verdict_text(rep.verdict)}"], _status([rep.verdict])


def _cmd_member(args, env):
    x = _lookup(env, args.name, "sequence")
    sid = SpaceId.parse(args.space, args.theta, args.q)
    v = member(x, sid, _spec(args))
    rec = {"kind": "member", "name": args.name, "space": str(sid), "verdict": v}
    return [rec], [f"{args.name} ∈ {sid} : {_verdict_text(v)}"], _status([v])


_DUALS = {"alpha": alpha_dual_member, "beta-bp": beta_bp_dual_member, "gamma": gamma_dual_member}


def _cmd_dual(args, env):
    a = _lookup(env, args.name, "sequence")
    v = _DUALS[args.dual](a, _spec(args))
    rec = {"kind": "dual", "name": args.name, "dual": args.dual, "verdict": v}
    return [rec], [f"{args.name} ∈ H^{args.dual} : {_verdict_text(v)}"], _status([v])


def _applied_verdict(y, m, n):
    if hasattr(y, "verdict"):
        return y.verdict(m, n)
    return Holds(y.eval(m, n), exact=y.mode == RATIONAL)


def _cmd_apply(args, env):
    G = _lookup(env, args.matrix, "matrix")
    x = _lookup(env, args.seq, "sequence")
    y = apply(G, x, _spec(args))
    if args.at:
        m, n = (int(t) for t in args.at.split(","))
        points = [(m, n)]
    else:
        w = Window.parse(args.grid or "4x4")
        points = [(m, n) for m in range(1, w.rows + 1) for n in range(1, w.cols + 1)]
    recs, lines, vs = [], [], []
    for m, n in points:
        v = _applied_verdict(y, m, n)
        vs.append(v)
        recs.append({"kind": "apply", "matrix": args.matrix, "seq": args.seq, "at": [m, n], "verdict": v})
        lines.append(f"({args.matrix}·{args.seq})[{m},{n}] : {_verdict_text(v)}")
    return recs, lines, _status(vs)


def _cmd_derive(args, env):
    kind = args.kind
    if kind == "T":
        G = make_T(args.mode or RATIONAL)
    else:
        if not args.source:
            raise CommandError(f"--as {kind} needs --from NAME")
        need = "sequence" if MAT_DERIVED[kind] == "seq" else "matrix"
        src = _lookup(env, args.source, need)
        G = {"D": make_D, "B": make_B, "E": make_E, "F": make_F}[kind](src)
    w = Window.parse(args.grid or args.window or "3x3")
    entries = []
    for m in range(1, w.rows + 1):
        for n in range(1, w.cols + 1):
            for k in range(1, w.rows + 1):
                for l in range(1, w.cols + 1):
                    v = G.entry(m, n, k, l)
                    if v != 0:
                        entries.append([m, n, k, l, v])
    rec = {"kind": "entries", "name": args.name, "as": kind, "from": args.source,
           "window": str(w), "finite": G.is_finite, "entries": entries}
    lines = [f"{args.name} = {G.label}  ({len(entries)} nonzero entries with all indices <= {w})"]
    lines += [f"  [{m},{n},{k},{l}] = {format_scalar(v)}" for m, n, k, l, v in entries]
    return [rec], lines, EXIT_OK


def _cmd_classify(args, env):
    A = _lookup(env, args.matrix, "matrix")
    cid = ClassId.parse(args.cls, args.theta or "bp")
    rep = classify(A, cid, _spec(args, cid.theta))
    recs = [{"kind": "condition", "class": str(cid), "condition": name, "verdict": v}
            for name, v in rep.conditions]
    lines = [f"{args.matrix} ∈ {cid} : {_verdict_text(rep.overall)}"]
    lines += [f"  {name}: {_verdict_text(v)}" for name, v in rep.conditions]
    norms = dict(rep.norms)
    if cid.tag == "H->H" and A.is_finite:
        M, N, K, L = A.support
        probe = Window.parse(args.window) if args.window else Window(max(M, K, 1), max(N, L, 1))
        nr = matrix_norm_report(A, probe)
        norms.update({"hahn_matrix_norm": nr["weighted"], "unweighted_norm": nr["unweighted"],
                      "discrepancy": nr["discrepancy"]})
    if norms:
        lines += [f"  {k} = {format_scalar(v) if not isinstance(v, bool) else v}" for k, v in norms.items()]
    recs.append({"kind": "class", "class": str(cid), "matrix": args.matrix, "overall": rep.overall,
                 "norms": norms})
    return recs, lines, _status([rep.overall])


def _cmd_verify(args, env):
    cases = run_suite(args.suite, args.seed, args.count)
    recs = [dict(c.record(), kind="oracle") for c in cases]
    bad = [c for c in cases if not c.passed]
    lines = [f"{'pass' if c.passed else 'FAIL'}  {c.case_id} seed={c.seed}  {format_scalar(c.lhs)} vs {format_scalar(c.rhs)}"
             for c in cases]
    lines.append(f"{len(cases) - len(bad)}/{len(cases)} oracle cases pass")
    return recs, lines, EXIT_FAILS if bad else EXIT_OK


COMMANDS = {"eval": _cmd_eval, "norm": _cmd_norm, "member": _cmd_member, "dual": _cmd_dual,
            "apply": _cmd_apply, "derive": _cmd_derive, "classify": _cmd_classify,
            "verify": _cmd_verify}


# --- argument parsing ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _globals(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--file", "-f", default=d, help="definition document ('-' for stdin)")
    p.add_argument("--define", "-D", action="append", default=d,
                   help="extra definition line (repeatable)")
    p.add_argument("--window", default=d, help="last scan window MxN (exact probe for matrices)")
    p.add_argument("--tol", type=float, default=d, help="tolerance for window decisions")
    p.add_argument("--mode", choices=(RATIONAL, FLOAT), default=d,
                   help="default arithmetic mode for definitions")
    p.add_argument("--report", choices=("text", "machine"), default=d)
    p.add_argument("--out", default=d, help="write the machine report here")


def build_parser():
    common = _Parser(add_help=False)
    _globals(common, suppress=True)
    p = _Parser(prog="hahn2d", description="Hahn double sequence space toolkit")
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common], help="evaluate an entry")
    s.add_argument("name")
    s.add_argument("index", nargs="+")

    s = sub.add_parser("norm", parents=[common], help="compute a norm")
    s.add_argument("name")
    s.add_argument("--norm", required=True, choices=("hahn", "hahn-p", "bv", "bs", "lq", "pinf"))
    s.add_argument("--q", type=float, default=1)

    s = sub.add_parser("member", parents=[common], help="space membership")
    s.add_argument("name")
    s.add_argument("--space", required=True)
    s.add_argument("--theta", choices=("p", "bp", "r"))
    s.add_argument("--q", type=float, default=None)

    s = sub.add_parser("dual", parents=[common], help="dual-space membership")
    s.add_argument("name")
    s.add_argument("--dual", required=True, choices=tuple(_DUALS))

    s = sub.add_parser("apply", parents=[common], help="apply a matrix to a sequence")
    s.add_argument("matrix")
    s.add_argument("seq")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--at", help="single entry m,n")
    g.add_argument("--grid", help="entries over MxN (default 4x4)")

    s = sub.add_parser("derive", parents=[common], help="build a derived matrix")
    s.add_argument("name")
    s.add_argument("--as", dest="kind", required=True, choices=("T", "D", "B", "E", "F"))
    s.add_argument("--from", dest="source")
    s.add_argument("--grid", help="list entries with all indices <= MxN (default 3x3)")

    s = sub.add_parser("classify", parents=[common], help="matrix class membership")
    s.add_argument("matrix")
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--theta", choices=("p", "bp", "r"))

    s = sub.add_parser("verify", parents=[common], help="run the brute-force oracle")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--count", type=int, default=1)
    return p


def _load(args):
    mode = args.mode or RATIONAL
    env = _corpus_env(mode)
    text = ""
    if args.file:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    if args.define:
        text += "\n" + "\n".join(args.define)
    if text.strip():
        env = build_objects(parse_document(text, mode), env)
    return env


def run(argv) -> Report:
    """Run one command line (without the program name)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt, out = args.report or "text", args.out
    t0 = time.perf_counter()
    head = {"kind": "command", "argv": list(argv)}
    try:
        env = {} if args.command == "verify" else _load(args)
        recs, lines, status = COMMANDS[args.command](args, env)
    except (DocumentError, CommandError, expr.EvaluationError, ModeError, WindowError,
            ValueError, OSError) as exc:
        recs = [head, {"kind": "error", "message": str(exc)}, {"kind": "status", "exit": EXIT_ERROR}]
        return Report(EXIT_ERROR, recs, [f"error: {exc}"], fmt, out)
    lines.append(f"({time.perf_counter() - t0:.3f}s)")
    return Report(status, [head] + recs + [{"kind": "status", "exit": status}], lines, fmt, out)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    rep = run(argv)
    doc = rep.machine()
    if rep.out:
        with open(rep.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    if rep.report == "machine" and not rep.out:
        sys.stdout.write(doc)
    else:
        stream = sys.stderr if rep.status == EXIT_ERROR else sys.stdout
        for line in rep.lines:
            print(line, file=stream)
    return rep.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
