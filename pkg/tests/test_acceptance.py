"""Acceptance criteria 1-10, one PASS/FAIL line each (also summarized at the end of the run)."""

import json
import random
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from periodring import sympr
from periodring.bdr import BdRContext, log_K_check
from periodring.cli import run
from periodring.motive import (RAYNAUD_TABLE, concrete_galois_residual, frobenius_entry_numeric,
                               frobenius_fixed_vector, frobenius_matrix_tdr, galois_residual,
                               galois_samples, isogeny_split, kummer, limit_verify,
                               monodromy_matrix, period_matrix, raynaud_shape, tate_curve,
                               tate_module_gens, tate_surface, toric_motive, verify_split)
from periodring.padic import split_fraction
from periodring.tilt import TiltElement, make_tower, twist_exponent
from periodring.witt import teich, witt_constant, witt_int_op, witt_sub


def report(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def precision(a) -> Fraction:
    return Fraction(a.field.prec if a.prec is None else a.prec)


def close(a, b, prec) -> bool:
    d = a - b
    return d.is_zero() or d.val_bound() >= prec or d.valuation() >= prec


def test_criterion_1_tate_curve_periods(tmp_path):
    spec = {"p": "5", "motive": {"r": "1", "s": "1",
                                 "u": [[{"valuation": "1", "unit": ["6"], "name": "q"}]]}}
    path = tmp_path / "tate.json"
    path.write_text(json.dumps(spec))
    out, code = run(["periods", str(path), "--json"])
    rep = json.loads(out)
    P, C = rep["period_matrix"]["canonical"], rep["comparison_matrix"]["canonical"]
    ok = code == 0 and P == "[[t, 0], [l[q], 1]]" and C == "[[t^-1, -l[q]*t^-1], [0, 1]]"
    report(1, ok, f"P = {P}, comparison = {C}")


@pytest.mark.parametrize("p,depth", [(2, 3), (3, 3), (5, 2)])
def test_criterion_2_gr1_anchor(p, depth):
    T = make_tower(p, depth)
    ctx = BdRContext(p, N=2, tower=T)
    m = ctx.witt_length
    nf = ctx.normalize(witt_sub(teich(T.eps(), m), witt_constant(T, 1, m)), 2)
    t = ctx.t_element(2)
    precs = [min(a, b) for a, b in zip(nf.precisions(), t.precisions())]
    ok = all(close(nf[j], t[j], precs[j]) for j in range(2)) and precs[1] >= depth - 1
    report(2, ok, f"p={p} depth={depth}: t = [eps]-1 mod F^2, gr^1 agreement to p^{precs[1]} (need p^{depth - 1})")


def test_criterion_3_limit_pairing(tmp_path):
    cases = [(tate_curve(2, 6), 2), (kummer(2, 3), 2), (kummer(3, 4), 1), (kummer(5, 6), 1)]
    lines, ok = [], True
    for M, n in cases:
        reps = limit_verify(M, n=n, N=2)
        for r in reps:
            good = r.passed and r.recursion_ok and (r.precision is None or r.precision >= 1)
            if r.omega == "ds" and r.x == "gamma":
                good = good and r.value == 1
            ok = ok and good
        lines.append(f"{M.label}(p={M.p}, level {n}): {sum(r.passed for r in reps)}/{len(reps)}")
    # the same check through the command line, Tate curve q = 2 * 3 at level 2
    spec = {"p": "2", "precision": {"N": "2", "depth": "3", "level": "2"},
            "motive": {"r": "1", "s": "1", "u": [[{"valuation": "1", "unit": ["3"], "name": "q"}]]}}
    path = tmp_path / "tate2.json"
    path.write_text(json.dumps(spec))
    out, code = run(["limit-verify", str(path), "--json"])
    cli_ok = code == 0 and all(r["status"] == "PASS" for r in json.loads(out)["pairs"])
    ok = ok and cli_ok
    lines.append(f"limit-verify command {'ok' if cli_ok else 'failed'}")
    report(3, ok, "; ".join(lines))


def test_criterion_4_galois_equivariance():
    level = 2
    motives = [tate_curve(2, 6), kummer(2, 3), tate_surface(2, 6, 3, 1, 2)]
    ok, parts = True, []
    for M in motives:
        T = tate_module_gens(M, level, concrete=True)
        ctx = BdRContext(M.p, N=2, tower=T.tower)
        data = galois_samples(M, level, count=10, seed=4, tower=T.tower)
        sym_ok = len(data) >= 8 and all(galois_residual(M, s).is_zero() for s in data)
        worst = None
        for s in data:
            for row in concrete_galois_residual(M, s, ctx):
                for vals in row:
                    for v in vals:
                        if v is not None and (worst is None or v < worst):
                            worst = v
        conc_ok = worst is None or worst >= level - 1
        ok = ok and sym_ok and conc_ok
        parts.append(f"{M.label}: {len(data)} data, symbolic 0 = {sym_ok}, min valuation {worst if worst is not None else 'exact'}")
    report(4, ok, "; ".join(parts))


def _random_expression(rng: random.Random, p: int, depth: int = 3):
    gens = [sympr.t_sym(), sympr.ell("q", p * 7, p), sympr.ell("b", p * p * 2, p), sympr.u_st(p),
            sympr.log_const("a", 1 + p, p), sympr.const(rng.randint(-3, 3))]
    if depth == 0:
        return rng.choice(gens)
    a, b = _random_expression(rng, p, depth - 1), _random_expression(rng, p, depth - 1)
    return rng.choice([a + b * rng.randint(-2, 2), a - b, a * b])


def test_criterion_5_frobenius_and_monodromy():
    p, a = 5, 6
    M = kummer(p, a)
    F = frobenius_matrix_tdr(M)
    L = sympr.log_const("a", a, p) * (p - 1)
    want = [[sympr.const(Fraction(1, p)), L / p], [sympr.const(0), sympr.const(1)]]
    shape_ok = all(F.rows[i][j] == want[i][j] for i in range(2) for j in range(2))

    # log_K(a^(p-1)) against the plain series for log(1 + y), y = a^(p-1) - 1
    y, s = Fraction(a ** (p - 1) - 1), Fraction(0)
    for k in range(1, 40):
        s += (-1) ** (k + 1) * y ** k / k
    num = frobenius_entry_numeric(M, prec=9) * p
    series_ok = close(num, num.field.from_fraction(s), 8)

    vec = frobenius_fixed_vector(F)
    eig_ok = vec == (sympr.log_const("a", a, p), sympr.const(1))

    S = tate_surface(3, 3 * 2, 4, 7, 9 * 2)
    N = monodromy_matrix(S)
    mono_ok = (N[0][2] == 1 and N[1][3] == 2 and N[0][3] == 0 and N[1][2] == 0
               and sum(v != 0 for row in N for v in row) == 2)

    rng = random.Random(50)
    exprs = [_random_expression(rng, p) for _ in range(50)]
    nphi_ok = all(sympr.monodromy(sympr.frobenius(x, p)) == sympr.frobenius(sympr.monodromy(x), p) * p
                  for x in exprs)
    ok = shape_ok and series_ok and eig_ok and mono_ok and nphi_ok
    report(5, ok, f"matrix {shape_ok}, log_K vs series mod p^8 {series_ok}, eigenvector {eig_ok}, "
                  f"N on surface {mono_ok}, N phi = p phi N on 50 expressions {nphi_ok}")


def _ghost_oracle(a, b, p, op):
    ghost = [[sum(p ** i * v[i] ** (p ** (n - i)) for i in range(n + 1)) for n in range(len(v))] for v in (a, b)]
    g = [x + y if op == "add" else x * y for x, y in zip(*ghost)]
    out = []
    for n, gn in enumerate(g):
        rest = gn - sum(p ** i * out[i] ** (p ** (n - i)) for i in range(n))
        assert rest % p ** n == 0
        out.append(rest // p ** n)
    return out


def test_criterion_6_witt_oracle():
    rng = random.Random(6)
    bad, total = 0, 0
    for p in (2, 3, 5):
        for _ in range(200):
            a = [rng.randint(-p ** 4, p ** 4) for _ in range(3)]
            b = [rng.randint(-p ** 4, p ** 4) for _ in range(3)]
            for op in ("add", "mul"):
                total += 1
                bad += witt_int_op(a, b, p, op) != _ghost_oracle(a, b, p, op)
    report(6, bad == 0, f"W_3 add/mul over p in {{2, 3, 5}}: {total - bad}/{total} agree with the ghost oracle")


def _strip(x: TiltElement) -> TiltElement:
    return TiltElement(x.top, x.depth, x.exact, None)


@pytest.mark.parametrize("p,depth,unit", [(3, 2, 4), (2, 3, 3)])
def test_criterion_7_logarithm_laws(p, depth, unit):
    T = make_tower(p, depth, (Fraction(unit),))
    ctx = BdRContext(p, N=2, tower=T)
    eps, mod = T.eps(), p ** (depth - 1)
    rng = random.Random(p)

    def rand_system():
        a, b, c = rng.randint(-5, 5), rng.randint(0, 2), rng.randint(-2, 2)
        return a, T.pflat() ** b * T.unit_system(unit) ** c

    mult_ok, twist_ok, model_ok = True, True, True
    for _ in range(50):
        (a1, r1), (a2, r2) = rand_system(), rand_system()
        x, y = eps ** a1 * r1, eps ** a2 * r2
        z = x * y
        # the twist of x*y against the chosen system r1*r2, read off the tops alone
        k = twist_exponent(_strip(z), r1 * r2, eps)
        twist_ok = twist_ok and k == (a1 + a2) % mod
        lhs = ctx.log_general(z)
        rhs = ctx.log_general(r1) + ctx.log_general(r2) + ctx.t_element() * (a1 + a2)
        precs = lhs.precisions()
        mult_ok = mult_ok and all(close(lhs[j], rhs[j], precs[j]) for j in range(2))
        mult_ok = mult_ok and (lhs - ctx.log_general(x) - ctx.log_general(y)).is_zero_at(0)
    # the label-driven model of [x] agrees with the Witt normal form built from coordinates
    for _ in range(6):
        a, r = rand_system()
        x = eps ** a * r
        nf = ctx.normalize(teich(x, ctx.witt_length), 2)
        tm = ctx.teich_model(x)
        model_ok = model_ok and all(close(nf[j], tm[j], nf.precisions()[j]) for j in range(2))

    theta_ok, worst = True, None
    for _ in range(20):
        c, a, d = rng.randint(-3, 3), rng.randint(0, mod - 1), rng.randint(1, p - 1)
        x = T.unit_system(unit) ** c * eps ** a * T.constant(d)
        th, lk = log_K_check(ctx, x)
        prec = min(precision(th), precision(lk))
        worst = prec if worst is None else min(worst, prec)
        theta_ok = theta_ok and close(th, lk, prec) and prec >= depth
    ok = mult_ok and twist_ok and model_ok and theta_ok
    report(7, ok, f"p={p} depth={depth}: 50 pairs multiplicative {mult_ok}, eps-twist recovered {twist_ok}, "
                  f"[x] model = Witt form {model_ok}; theta log_unit = log_K sharp on 20 units to p^{worst} {theta_ok}")


def test_criterion_8_tate_surface_golden():
    P = period_matrix(tate_surface(3, 6, 4, 7, 18))
    want = "[[t, 0, 0, 0], [0, t, 0, 0], [l[q1], l[a1], 1, 0], [l[a2], l[q2], 0, 1]]"
    report(8, str(P) == want, f"P = {P}")


def test_criterion_9_raynaud_classifier():
    expected = {"1": "i", "2": "ii", "3": "v", "4": "v", "5a": "iii", "5b": "iv", "5c": "v"}
    got = {t: raynaud_shape(t)["case"] for t in expected}
    ok = got == expected and set(RAYNAUD_TABLE) == set(expected)
    report(9, ok, ", ".join(f"{t} -> ({c})" for t, c in got.items()))


def _planted(rng: random.Random, p: int):
    primes = [q for q in (2, 3, 5, 7, 11, 13) if q != p]
    s = rng.randint(1, 2)
    r_free = rng.randint(1, 2)
    Q = [[Fraction(rng.choice(primes)) ** rng.randint(1, 3) * rng.choice([1, -1]) for _ in range(r_free)]
         for _ in range(s)]
    # planted relation: a combination of existing columns, or a torsion column of signs
    if rng.random() < 0.3:
        col = [Fraction(rng.choice([1, -1])) for _ in range(s)]
        col[0] = Fraction(-1)
    else:
        m = [rng.randint(-2, 2) or 1 for _ in range(r_free)]
        col = []
        for i in range(s):
            v = Fraction(1)
            for j, e in enumerate(m):
                v *= Q[i][j] ** e
            col.append(v)
    pos = rng.randint(0, r_free)
    for i in range(s):
        Q[i].insert(pos, col[i])
    return toric_motive(p, Q)


def test_criterion_10_isogeny_splitting():
    rng = random.Random(10)
    good = 0
    for _ in range(20):
        M = _planted(rng, rng.choice([2, 3, 5]))
        sp = isogeny_split(M)
        ok = sp.lattice_rank >= 1 and sp.injective.r + sp.lattice_rank == M.r and verify_split(M, sp)
        good += ok
    report(10, good == 20, f"{good}/20 planted-kernel motives split and recombine at level 2")


def test_split_parts_match_on_tate_modules():
    """Radicand equality gives equal generator classes in T_p / p^2 once roots are fixed."""
    M = toric_motive(3, [[Fraction(4), Fraction(16), Fraction(2)]])
    sp = isogeny_split(M)
    assert verify_split(M, sp)
    T = tate_module_gens(sp.injective, 2)
    assert len(T.labels) == sp.injective.s + sp.injective.r
    assert all(split_fraction(q, 3)[0] == 0 for col in sp.injective.Q for q in col)
