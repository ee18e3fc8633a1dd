"""Command-line front end.

    periodring periods spec.json [--json] [--concrete]
    periodring raynaud-shape 4

A spec is a JSON document; numbers are strings so nothing passes through floats:

    {"p": "5",
     "base_field": {"unramified_degree": "1"},
     "precision": {"m": "12", "N": "2", "depth": "2", "level": "1"},
     "motive": {"r": "1", "s": "1",
                "u": [[{"valuation": "1", "unit": ["6"], "name": "q"}]]},
     "outputs": ["periods"]}

Exit codes: 0 success, 2 verification failure, 3 precision exhaustion, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import motive as mot
from . import sympr
from .bdr import BdRContext
from .padic import PadicError, PrecisionError, split_fraction
from .tilt import make_tower

EXIT_OK, EXIT_FAIL, EXIT_PRECISION, EXIT_PARSE = 0, 2, 3, 4

PROFILES = {
    "fast": {"m": 10, "N": 2, "depth": 2, "level": 1},
    "default": {"m": 16, "N": 2, "depth": 3, "level": 2},
    "high": {"m": 24, "N": 3, "depth": 3, "level": 2},
}
PROFILE_ENV = "PERIODRING_PRECISION_PROFILE"
OUTPUTS = ("periods", "comparison", "frobenius", "monodromy", "galois-check", "limit-verify", "raynaud-shape")


class SpecError(ValueError):
    pass


@dataclass
class MotiveSpec:
    p: int
    motive: mot.ToricMotive
    m: int
    N: int
    depth: int
    level: int
    outputs: tuple


def _num(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SpecError(f"{where}: expected a number written as a string, got {x!r}")
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"{where}: cannot parse {x!r} as a rational number") from None


def _int(x, where: str) -> int:
    v = _num(x, where)
    if v.denominator != 1:
        raise SpecError(f"{where}: expected an integer, got {x!r}")
    return int(v)


def _profile() -> dict:
    name = os.environ.get(PROFILE_ENV, "default").strip() or "default"
    if name not in PROFILES:
        raise SpecError(f"{PROFILE_ENV}={name!r}: unknown profile (choose from {', '.join(PROFILES)})")
    return dict(PROFILES[name])


def _entry(e, p: int, where: str) -> tuple[Fraction, str | None]:
    if isinstance(e, (str, int)) and not isinstance(e, bool):
        return _num(e, where), None
    if not isinstance(e, dict):
        raise SpecError(f"{where}: expected an entry object")
    unknown = set(e) - {"valuation", "unit", "name"}
    if unknown:
        raise SpecError(f"{where}: unknown fields {sorted(unknown)}")
    v = _int(e.get("valuation", "0"), where + ".valuation")
    unit = e.get("unit", ["1"])
    if not isinstance(unit, list) or len(unit) != 1:
        raise SpecError(f"{where}.unit: expected a coefficient vector of length 1 over Q_p")
    u = _num(unit[0], where + ".unit[0]")
    if u == 0 or split_fraction(u, p)[0] != 0:
        raise SpecError(f"{where}.unit: {unit[0]} is not a p-adic unit")
    name = e.get("name")
    if name is not None and not isinstance(name, str):
        raise SpecError(f"{where}.name: expected a string")
    return Fraction(p) ** v * u, name


def parse_spec(doc, overrides: dict | None = None, force: bool = False) -> MotiveSpec:
    if not isinstance(doc, dict):
        raise SpecError("spec: expected a JSON object")
    if "p" not in doc:
        raise SpecError("spec: missing field 'p'")
    p = _int(doc["p"], "p")
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise SpecError(f"p: {p} is not prime")
    base = doc.get("base_field", {})
    if not isinstance(base, dict):
        raise SpecError("base_field: expected an object")
    if _int(base.get("unramified_degree", "1"), "base_field.unramified_degree") != 1 or base.get("eisenstein"):
        raise SpecError("base_field: only K = Q_p is supported for motive specs")
    prec = _profile()
    block = doc.get("precision", {})
    if not isinstance(block, dict):
        raise SpecError("precision: expected an object")
    for k in ("m", "N", "depth", "level"):
        if k in block:
            prec[k] = _int(block[k], f"precision.{k}")
    for k, v in (overrides or {}).items():
        if v is not None:
            prec[k] = v
    if "level" in (overrides or {}) and overrides["level"] is not None and (overrides or {}).get("depth") is None:
        prec["depth"] = max(prec["depth"], prec["level"] + 1)
    if not force and (prec["N"] > 5 or prec["depth"] > 4):
        raise SpecError("precision: N <= 5 and depth <= 4 unless --force is given")
    if prec["N"] < 1 or prec["depth"] < 1 or prec["level"] < 0 or prec["m"] < 4:
        raise SpecError("precision: values out of range")

    mb = doc.get("motive")
    if not isinstance(mb, dict):
        raise SpecError("motive: missing or not an object")
    r, s = _int(mb.get("r", "0"), "motive.r"), _int(mb.get("s", "0"), "motive.s")
    rows = mb.get("u", [])
    if not isinstance(rows, list) or len(rows) != s:
        raise SpecError(f"motive.u: expected {s} rows")
    Q, names = [], []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != r:
            raise SpecError(f"motive.u[{i}]: expected {r} entries")
        qs, ns = [], []
        for j, e in enumerate(row):
            q, n = _entry(e, p, f"motive.u[{i}][{j}]")
            qs.append(q)
            ns.append(n if n is not None else str(q))
        Q.append(qs)
        names.append(ns)
    label = str(mb.get("label", "M"))
    try:
        M = mot.toric_motive(p, Q, names, label) if s else mot.torus(p, 0)
    except mot.MotiveError as exc:
        raise SpecError(f"motive: {exc}") from None
    outs = doc.get("outputs", ["periods"])
    if not isinstance(outs, list) or any(o not in OUTPUTS for o in outs):
        raise SpecError(f"outputs: expected a list drawn from {', '.join(OUTPUTS)}")
    return MotiveSpec(p, M, prec["m"], prec["N"], prec["depth"], prec["level"], tuple(outs))


def load_spec(path: str, overrides: dict | None = None, force: bool = False) -> MotiveSpec:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_spec(doc, overrides, force)


# ---------------------------------------------------------------------------
# formatting


def fmt_padic(a) -> str:
    prec = a.field.prec if a.prec is None else a.prec
    if any(a.coeffs[1:]):
        v = "inf" if a.is_zero() else str(a.val_bound())
        return f"<tower element, v >= {v}> + O(p^{prec})"
    c = a.coeffs[0] % a.p ** max(0, int(prec) + a.den) if prec is not None else a.coeffs[0]
    val = Fraction(c, a.p ** a.den)
    return f"{val} + O(p^{prec})"


def _matrix_block(P: mot.PeriodMatrix) -> dict:
    return {"rows": list(P.row_labels), "cols": list(P.col_labels), "entries": P.to_lists(),
            "canonical": str(P)}


def _concrete(M: mot.ToricMotive, P: mot.PeriodMatrix, spec: MotiveSpec) -> dict:
    ctx = BdRContext(M.p, N=spec.N, tower=make_tower(M.p, spec.depth, M.unit_parts(), spec.m))
    out = []
    for row in P.rows:
        out.append([[fmt_padic(c) for c in sympr.evaluate(e, ctx).coeffs] for e in row])
    return {"key": {"N": spec.N, "depth": spec.depth, "m": spec.m}, "entries": out}


# ---------------------------------------------------------------------------
# commands


def cmd_periods(spec: MotiveSpec, concrete: bool = False) -> tuple[dict, int]:
    M = spec.motive
    if not M.injective:
        return {"error": "u is not injective; split it first (isogeny_split)",
                "split": _split_block(M)}, EXIT_FAIL
    P = mot.period_matrix(M)
    C = mot.comparison_matrix(M)
    check = (C @ P.transpose()).is_identity()
    dR = mot.de_rham_basis(M)
    fil = {w: min((sympr.fil_sym(P.rows[x][k]) for x in range(len(P.rows))
                   if not P.rows[x][k].is_zero()), default=None)
           for k, w in enumerate(dR.labels)}
    rep = {"verb": "periods", "p": M.p, "motive": M.label,
           "period_matrix": _matrix_block(P), "comparison_matrix": _matrix_block(C),
           "inverse_check": check,
           "weights": dict(zip(dR.labels, dR.weights)), "fil1": list(dR.fil1), "fil_degree": fil}
    if concrete:
        rep["concrete"] = _concrete(M, P, spec)
    return rep, EXIT_OK if check else EXIT_FAIL


def cmd_compare(spec: MotiveSpec, concrete: bool = False) -> tuple[dict, int]:
    C = mot.comparison_matrix(spec.motive)
    ok = (C @ mot.period_matrix(spec.motive).transpose()).is_identity()
    return {"verb": "compare", "comparison_matrix": _matrix_block(C), "inverse_check": ok}, \
        EXIT_OK if ok else EXIT_FAIL


def cmd_frobenius(spec: MotiveSpec, concrete: bool = False) -> tuple[dict, int]:
    M = spec.motive
    F = mot.frobenius_matrix_tdr(M)
    x, y = mot.frobenius_fixed_vector(F)
    rep = {"verb": "frobenius", "matrix": _matrix_block(F), "basis": ["v1", "v2"],
           "fixed_vector": f"({x})*v1 + ({y})*v2",
           "numeric_entry": fmt_padic(mot.frobenius_entry_numeric(M, spec.m))}
    return rep, EXIT_OK


def cmd_monodromy(spec: MotiveSpec, concrete: bool = False) -> tuple[dict, int]:
    M = spec.motive
    Nm = mot.monodromy_matrix(M)
    T = mot.tate_module_gens(M, 1)
    # entry (omega, x) is N applied to the period <omega, x>
    return {"verb": "monodromy", "rows": list(mot.de_rham_basis(M).labels), "cols": list(T.labels),
            "matrix": [[str(v) for v in row] for row in Nm], "nilpotent": True}, EXIT_OK


def cmd_galois_check(spec: MotiveSpec, concrete: bool = False, seed: int = 0,
                     samples: int = 8) -> tuple[dict, int]:
    M = spec.motive
    if spec.level < 1:
        raise SpecError("galois-check needs level >= 1")
    tower = make_tower(M.p, spec.level + 1, M.unit_parts(), spec.m) if concrete else None
    data = mot.galois_samples(M, spec.level, samples, seed, tower)
    ctx = BdRContext(M.p, N=2, tower=tower) if concrete else None
    tol = spec.level - 1
    rows, ok = [], True
    for s in data:
        res = mot.galois_residual(M, s)
        entry = {"sample": repr(s), "symbolic_zero": res.is_zero(), "residual": str(res)}
        ok &= res.is_zero()
        if concrete:
            vals = mot.concrete_galois_residual(M, s, ctx)
            worst = min((v for row in vals for cell in row for v in cell if v is not None), default=None)
            good = worst is None or worst >= tol
            entry["concrete_min_valuation"] = "exact" if worst is None else str(worst)
            entry["concrete_ok"] = good
            ok &= good
        rows.append(entry)
    rep = {"verb": "galois-check", "level": spec.level, "seed": seed, "samples": rows,
           "tolerance": f"v >= {tol}" if concrete else None, "passed": ok}
    return rep, EXIT_OK if ok else EXIT_FAIL


def cmd_limit_verify(spec: MotiveSpec, concrete: bool = True) -> tuple[dict, int]:
    M = spec.motive
    n = max(spec.level, 1)
    reports = mot.limit_verify(M, n, 2)
    rows = [{"omega": r.omega, "x": r.x, "recursion": r.recursion_ok,
             "value": None if r.value is None else str(r.value), "explicit": r.expected,
             "gr0": r.gr0_ok, "gr1": r.gr1_ok,
             "precision": None if r.precision is None else str(r.precision),
             "status": "PASS" if r.passed else "FAIL"} for r in reports]
    ok = all(r.passed for r in reports)
    return {"verb": "limit-verify", "level": n, "pairs": rows, "passed": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_raynaud_shape(reduction_type: str) -> tuple[dict, int]:
    return {"verb": "raynaud-shape", **mot.raynaud_shape(reduction_type)}, EXIT_OK


def _split_block(M: mot.ToricMotive) -> dict:
    sp = mot.isogeny_split(M)
    return {"kernel": sp.kernel, "n": sp.n, "injective_part": [[str(q) for q in row] for row in sp.injective.Q]}


COMMANDS = {
    "periods": cmd_periods, "compare": cmd_compare, "comparison": cmd_compare,
    "frobenius": cmd_frobenius, "monodromy": cmd_monodromy,
    "galois-check": cmd_galois_check, "limit-verify": cmd_limit_verify,
}


# ---------------------------------------------------------------------------
# rendering


def render_text(rep: dict) -> str:
    lines = []

    def walk(obj, indent: int, key: str | None):
        pad = "  " * indent
        head = f"{pad}{key}: " if key is not None else pad
        if isinstance(obj, dict):
            if key is not None:
                lines.append(f"{pad}{key}:")
            for k in obj:
                walk(obj[k], indent + (key is not None), str(k))
        elif isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
            lines.append(f"{pad}{key}:")
            for i, x in enumerate(obj):
                walk(x, indent + 1, f"[{i}]")
        else:
            lines.append(head + (json.dumps(obj) if not isinstance(obj, str) else obj))
    walk(rep, 0, None)
    return "\n".join(lines)


def render(rep: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(rep, indent=2, sort_keys=True, default=str)
    return render_text(rep)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="periodring", description="p-adic periods of split-toric 1-motives")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in ("periods", "compare", "frobenius", "monodromy", "galois-check", "limit-verify"):
        sp = sub.add_parser(verb)
        sp.add_argument("spec", help="motive spec (JSON), or - for stdin")
        sp.add_argument("--precision", type=int, help="p-adic working precision m")
        sp.add_argument("--fil", type=int, help="filtration cutoff N")
        sp.add_argument("--depth", type=int, help="tilt depth n")
        sp.add_argument("--level", type=int, help="Galois / Tate-module level")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=8)
        sp.add_argument("--concrete", action="store_true", help="add concrete B_dR normal forms")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--force", action="store_true", help="lift the N <= 5, depth <= 4 guard")
    rs = sub.add_parser("raynaud-shape")
    rs.add_argument("type", help="reduction type: 1, 2, 3, 4, 5a, 5b or 5c")
    rs.add_argument("--json", action="store_true")
    return ap


def run(argv: list[str] | None = None) -> tuple[str, int]:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "raynaud-shape":
            rep, code = cmd_raynaud_shape(args.type)
        else:
            over = {"m": args.precision, "N": args.fil, "depth": args.depth, "level": args.level}
            spec = load_spec(args.spec, over, args.force)
            fn = COMMANDS[args.verb]
            if args.verb == "galois-check":
                rep, code = fn(spec, args.concrete, args.seed, args.samples)
            else:
                rep, code = fn(spec, args.concrete)
    except SpecError as exc:
        return f"parse error: {exc}", EXIT_PARSE
    except mot.MotiveError as exc:
        if "unknown reduction type" in str(exc):
            return f"parse error: {exc}", EXIT_PARSE
        return f"verification failure: {exc}", EXIT_FAIL
    except PrecisionError as exc:
        return f"precision exhausted: {exc}", EXIT_PRECISION
    except PadicError as exc:
        return f"error: {exc}", EXIT_FAIL
    return render(rep, getattr(args, "json", False)), code


def main(argv: list[str] | None = None) -> int:
    out, code = run(argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_FAIL) else sys.stderr
    stream.write(out + "\n")
    stream.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
