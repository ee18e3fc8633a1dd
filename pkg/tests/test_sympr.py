from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from periodring.bdr import BdRContext
from periodring.galois import compose, make_datum
from periodring.padic import log_K, make_base_field
from periodring.sympr import (SymbolError, canonical, const, ell, evaluate, fil_sym, free,
                              frobenius, galois_act, log_const, monodromy, t_sym, theta_sym,
                              u_st)
from periodring.tilt import make_tower

P = 5
GENS = [t_sym(), ell("q", 30, P), ell("a", 6, P), u_st(P), log_const("a", 6, P), const(2)]


@st.composite
def expressions(draw, depth=3):
    if depth == 0:
        return draw(st.sampled_from(GENS))
    a = draw(expressions(depth=depth - 1))
    b = draw(expressions(depth=depth - 1))
    op = draw(st.sampled_from(["+", "-", "*"]))
    c = draw(st.integers(-3, 3))
    if op == "+":
        return a + b * c
    if op == "-":
        return a - b
    return a * b


def datum(c, kp, kq):
    return make_datum(P, 1, c, kp, {Fraction(6, 5): kq, Fraction(6): kq})


sigmas = st.builds(datum, st.integers(1, 4), st.integers(0, 4), st.integers(0, 4))


@given(expressions())
def test_n_phi_relation(x):
    assert frobenius(monodromy(x), P) * P == monodromy(frobenius(x, P))


@given(expressions(), expressions())
def test_monodromy_is_a_derivation(x, y):
    assert monodromy(x * y) == monodromy(x) * y + x * monodromy(y)


@given(expressions(), expressions())
def test_frobenius_is_multiplicative(x, y):
    assert frobenius(x * y, P) == frobenius(x, P) * frobenius(y, P)


def divisible(x, m: int) -> bool:
    return all(c.denominator % P and c.numerator % m == 0 for c in x.terms.values())


@given(sigmas, sigmas, expressions(depth=2))
def test_galois_action_composes(s1, s2, x):
    # finite-level data: chi and eta are only defined modulo p^level
    d = galois_act(compose(s1, s2), x) - galois_act(s1, galois_act(s2, x))
    assert divisible(d, s1.modulus)


@given(sigmas, expressions(), expressions())
def test_galois_action_is_a_ring_map(s, x, y):
    assert galois_act(s, x * y) == galois_act(s, x) * galois_act(s, y)


@given(sigmas, expressions())
def test_galois_commutes_with_monodromy(s, x):
    assert galois_act(s, monodromy(x)) == monodromy(galois_act(s, x))


def test_basic_images():
    s = datum(2, 3, 1)
    assert galois_act(s, t_sym()) == t_sym() * 2
    assert galois_act(s, ell("q", 30, P)) == ell("q", 30, P) + t_sym() * s.eta(30)
    assert frobenius(u_st(P), P) == u_st(P) * P
    assert monodromy(ell("q", 30, P)) == const(1)
    assert monodromy(ell("q", Fraction(6, 25), P)) == const(-2)
    assert monodromy(log_const("q", 30, P)).is_zero()


def test_log_const_of_root_of_unity_is_zero():
    assert log_const("x", -5, P).is_zero()
    assert log_const("x", 25, P).is_zero()


@pytest.mark.parametrize("x,deg", [
    (t_sym(), 1),
    (t_sym() ** 3, 3),
    (ell("q", 30, P), 0),
    (ell("q", 30, P) - log_const("q", 30, P), 1),
    (ell("q", 5, P), 1),
    (u_st(P) * t_sym(), 2),
    (const(7), 0),
])
def test_fil_degree(x, deg):
    assert fil_sym(x) == deg


def test_fil_of_zero():
    assert fil_sym(const(0)) is None


def test_theta_sym():
    F = make_base_field(P)
    assert theta_sym(ell("a", 6, P)) == log_K(F.from_int(6))
    assert theta_sym(ell("q", 30, P) - log_const("q", 30, P)).is_zero()
    assert theta_sym(u_st(P) + t_sym() + 3) == F.from_int(3)
    with pytest.raises(SymbolError):
        theta_sym(free("lambda"))
    with pytest.raises(SymbolError):
        theta_sym(t_sym(-1))


def test_canonical_strings():
    x = (ell("q", 30, P) - log_const("q", 30, P)) * t_sym() + u_st(P) ** 2 * 3 - t_sym()
    assert canonical(x) == "-t + l[q]*t - logK[q]*t + 3*u_st^2"
    assert canonical(x) == canonical(x + const(0))
    assert canonical(t_sym(-1) * t_sym(1)) == "1"


def test_evaluate_matches_theta():
    ctx = BdRContext(3, N=2, tower=make_tower(3, 2, (Fraction(4),)))
    x = ell("a", 4, 3) * 2 + t_sym() + 1
    e = evaluate(x, ctx)
    d = e[0] - theta_sym(x, prec=ctx.field.prec)
    assert d.is_zero() or d.valuation() >= 6


def test_evaluate_divides_poles():
    ctx = BdRContext(3, N=2, tower=make_tower(3, 2, (Fraction(4),)))
    x = (ell("a", 4, 3) - log_const("a", 4, 3)) * t_sym(-1)
    e = evaluate(x, ctx)
    assert not e.is_zero_at(0)
    with pytest.raises(SymbolError):
        evaluate(ell("a", 4, 3) * t_sym(-1), ctx)
