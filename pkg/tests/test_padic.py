from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from periodring.padic import (PadicError, extend_by_root, hensel_lift, log_K,
                              make_base_field, split_fraction, vp)

PRIMES = st.sampled_from([2, 3, 5])


def series_log(x: Fraction, p: int, k: int) -> Fraction:
    """sum (-1)^(n+1) (x-1)^n / n, truncated once the tail is below p^k."""
    z = x - 1
    assert vp(z.numerator, p) - vp(z.denominator, p) >= 1
    total, n = Fraction(0), 1
    while n < 40 * k:
        total += Fraction((-1) ** (n + 1), n) * z ** n
        n += 1
    return total


def agree(a, b: Fraction, p: int, k: int) -> bool:
    F = a.field
    return a.eq_at(F.from_fraction(b), k)


@pytest.mark.parametrize("n,p,v", [(12, 2, 2), (250, 5, 3), (7, 7, 1), (81, 3, 4), (10, 3, 0)])
def test_vp(n, p, v):
    assert vp(n, p) == v


def test_split_fraction():
    assert split_fraction(Fraction(50, 3), 5) == (2, 2, 3)
    assert split_fraction(Fraction(7, 20), 2) == (-2, 7, 5)


@given(PRIMES, st.fractions(max_denominator=50).filter(lambda x: x != 0),
       st.fractions(max_denominator=50).filter(lambda x: x != 0))
def test_from_fraction_is_a_ring_map(p, x, y):
    F = make_base_field(p, prec=12)
    if vp(x.denominator, p) or vp(y.denominator, p):
        return
    a, b = F.from_fraction(x), F.from_fraction(y)
    assert a * b == F.from_fraction(x * y)
    assert a + b == F.from_fraction(x + y)
    assert a - b == F.from_fraction(x - y)


@given(PRIMES, st.integers(1, 10 ** 6))
def test_inverse(p, n):
    F = make_base_field(p, prec=12)
    a = F.from_int(n)
    assert (a * a.inverse()).eq_at(F.one(), 12 - 2 * vp(n, p) - 1)


@given(PRIMES, st.integers(-3, 3), st.integers(1, 500))
def test_valuation_of_rationals(p, v, u):
    F = make_base_field(p, prec=12)
    if u % p == 0:
        return
    assert F.from_fraction(Fraction(p) ** v * u).valuation() == v


@pytest.mark.parametrize("p,k", [(2, 2), (3, 1), (3, 2), (5, 1)])
def test_cyclotomic_step(p, k):
    F, _ = extend_by_root(make_base_field(p, prec=10), 1, k, cyclotomic=True, name="z")
    z = F.zeta(k)
    assert z ** (p ** k) == F.one()
    assert z ** (p ** (k - 1)) != F.one()
    assert (z - F.one()).valuation() == Fraction(1, (p - 1) * p ** (k - 1))


@pytest.mark.parametrize("p,k", [(2, 2), (3, 1), (5, 1)])
def test_kummer_step(p, k):
    F, _ = extend_by_root(make_base_field(p, prec=10), p, k, name="pi")
    pi = F.gen("pi")
    assert pi ** (p ** k) == F.from_int(p)
    assert pi.valuation() == Fraction(1, p ** k)


def test_eisenstein_base():
    F = make_base_field(3, [-3, 0, 1], prec=10)
    w = F.uniformizer()
    assert w * w == F.from_int(3)
    assert w.valuation() == Fraction(1, 2)


def test_eisenstein_rejects_bad_polynomial():
    with pytest.raises(PadicError):
        make_base_field(3, [-9, 0, 1])


@pytest.mark.parametrize("p,x", [(2, Fraction(5)), (3, Fraction(4)), (5, Fraction(6)), (5, Fraction(11, 6))])
def test_log_matches_series(p, x):
    F = make_base_field(p, prec=14)
    lg = log_K(F.from_fraction(x))
    assert agree(lg, series_log(x, p, 14), p, 10)


def test_log_of_p_is_zero():
    for p in (2, 3, 5):
        F = make_base_field(p, prec=12)
        assert log_K(F.from_int(p)).eq_at(F.zero(), 8)


@given(PRIMES, st.integers(1, 200), st.integers(1, 200), st.integers(0, 2), st.integers(0, 2))
def test_log_is_additive(p, a, b, va, vb):
    if a % p == 0 or b % p == 0:
        return
    F = make_base_field(p, prec=14)
    x, y = F.from_int(a * p ** va), F.from_int(b * p ** vb)
    assert log_K(x * y).eq_at(log_K(x) + log_K(y), 8)


def test_log_of_root_of_unity_in_tower():
    F, _ = extend_by_root(make_base_field(3, prec=10), 1, 1, cyclotomic=True, name="z")
    assert log_K(F.zeta(1)).eq_at(F.zero(), 6)


def test_hensel_square_root():
    F = make_base_field(5, prec=12)
    r = hensel_lift([-6, 0, 1], F.from_int(1))
    assert r * r == F.from_int(6)
