from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from periodring.bdr import BdRContext, BdRElement, RecognitionError
from periodring.padic import PrecisionError, log_K
from periodring.tilt import make_tower
from periodring.witt import teich, witt_constant, witt_sub


def close(a, b, prec) -> bool:
    d = a - b
    return d.is_zero() or d.val_bound() >= prec or d.valuation() >= prec


@pytest.fixture(scope="module")
def ctx2():
    return BdRContext(2, N=3, tower=make_tower(2, 3, (Fraction(3),)))


@pytest.fixture(scope="module")
def ctx3():
    return BdRContext(3, N=3, tower=make_tower(3, 2, (Fraction(4),)))


def test_xi_and_constants(ctx2):
    x = ctx2.xi()
    assert x.fil_degree() == 1
    assert (x * x).fil_degree() == 2
    assert (x * x * x).fil_degree() == 3  # zero modulo F^3


def test_exp_log_inverse(ctx3):
    z = ctx3.xi() * Fraction(1, 3)
    back = ctx3.log_fil(ctx3.exp_fil(z) - 1)
    assert back.eq_at(z)


def test_inverse(ctx3):
    a = ctx3.const(4) + ctx3.xi() * 2
    one = a * a.inverse()
    assert one.eq_at(ctx3.const(1))


def test_t_lies_in_fil1_not_fil2(ctx2, ctx3):
    for ctx in (ctx2, ctx3):
        t = ctx.t_element()
        assert t.fil_degree() == 1
        assert t[1].valuation() == Fraction(1, ctx.p - 1)


def test_t_against_witt_normal_form(ctx2):
    m = ctx2.witt_length
    T = ctx2.tower
    nf = ctx2.normalize(witt_sub(teich(T.eps(), m), witt_constant(T, 1, m)), 2)
    t = ctx2.t_element(2)
    assert close(nf[0], t[0], min(nf.precisions()[0], t.precisions()[0]))
    assert close(nf[1], t[1], min(nf.precisions()[1], t.precisions()[1]))


def test_tau_depth_stability():
    """tau computed at depth 3 and at depth 2 agree to the shallower precision."""
    deep = BdRContext(3, N=2, tower=make_tower(3, 3)).tau()
    shallow = BdRContext(3, N=2, tower=make_tower(3, 2)).tau()
    emb = make_tower(3, 2).embedding(make_tower(3, 3))
    assert close(deep, emb(shallow), shallow.prec)


def test_tau_refuses_invisible_depth():
    # at p = 2 the top of [eps] - 1 has valuation 1 at depth 2
    with pytest.raises(PrecisionError):
        BdRContext(2, N=2, tower=make_tower(2, 2)).tau()


def test_log_pi_series(ctx3):
    lp = ctx3.log_pi()
    assert lp[0].is_zero()
    assert lp[1] == ctx3.field.from_fraction(Fraction(1, 3))
    assert lp[2] == ctx3.field.from_fraction(Fraction(-1, 18))


def test_teich_model_theta_is_sharp(ctx2):
    T = ctx2.tower
    for x in (T.pflat(), T.eps(), T.unit_system(3), T.root_system(12)):
        assert ctx2.teich_model(x)[0] == T.field.coerce(x.top ** (2 ** (T.depth - 1)))


def test_teich_model_is_multiplicative(ctx2):
    T = ctx2.tower
    x, y = T.pflat(), T.unit_system(3) * T.eps()
    assert (ctx2.teich_model(x) * ctx2.teich_model(y)).eq_at(ctx2.teich_model(x * y))


def test_log_unit_theta_is_log_k(ctx3):
    T = ctx3.tower
    lu = ctx3.log_unit(T.unit_system(4))
    want = log_K(T.field.from_int(4))
    assert close(lu[0], want, min(lu.precisions()[0], 8))


@given(st.integers(-3, 3), st.integers(-2, 2), st.integers(-2, 2))
def test_log_general_is_additive_on_monomials(a, b, c):
    ctx = BdRContext(3, N=2, tower=make_tower(3, 2, (Fraction(4),)))
    T = ctx.tower
    x = T.eps() ** a * T.pflat() ** b
    y = T.unit_system(4) ** c * T.eps()
    lhs = ctx.log_general(x * y)
    rhs = ctx.log_general(x) + ctx.log_general(y)
    assert lhs.eq_at(rhs)


def test_embed_algebraic_satisfies_minpoly():
    ctx = BdRContext(3, N=3, tower=make_tower(3, 2))
    z = ctx.field.zeta(1)
    e = ctx.embed_algebraic(z, minpoly=[1, 1, 1])
    assert all(ctx.polynomial_residual([1, 1, 1], e).is_zero_at(j) for j in range(3))


def test_unrecognized_input(ctx2):
    T = ctx2.tower
    with pytest.raises(RecognitionError):
        ctx2.teich_model(T.pflat() + T.one())


def test_div_fil(ctx3):
    t = ctx3.t_element()
    q = (t * ctx3.const(5)).div_fil(t)
    assert isinstance(q, BdRElement)
    assert close(q[0], ctx3.field.from_int(5), q.precisions()[0])
