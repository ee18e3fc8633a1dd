"""Truncated Witt vectors over the tilt and the map theta.

Coordinates are ``TiltElement``s (or plain integers for the ghost-component
checks over Z).  The addition, subtraction and multiplication polynomials are
derived here from the ghost identities and cached per (p, length).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .padic import PadicElement, PadicError, PrecisionError, split_fraction
from .tilt import (TiltElement, TiltTower, inverse_frobenius_flat, sharp,
                   tilt_mul)


# ---------------------------------------------------------------------------
# sparse integer polynomials in X_0..X_{m-1}, Y_0..Y_{m-1}

Mono = tuple[int, ...]


class IntPoly:
    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict[Mono, int], nvars: int):
        self.terms = {k: v for k, v in terms.items() if v}
        self.nvars = nvars

    @classmethod
    def var(cls, i: int, nvars: int) -> "IntPoly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def const(cls, c: int, nvars: int) -> "IntPoly":
        return cls({(0,) * nvars: c}, nvars)

    def __add__(self, other: "IntPoly") -> "IntPoly":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return IntPoly(t, self.nvars)

    def __neg__(self) -> "IntPoly":
        return IntPoly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return IntPoly({k: v * other for k, v in self.terms.items()}, self.nvars)
        t: dict[Mono, int] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return IntPoly(t, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "IntPoly":
        out = IntPoly.const(1, self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def exact_div(self, d: int) -> "IntPoly":
        t = {}
        for k, v in self.terms.items():
            if v % d:
                raise ArithmeticError("ghost identity left a non-integral coefficient")
            t[k] = v // d
        return IntPoly(t, self.nvars)

    def evaluate(self, values: Sequence[int]) -> int:
        total = 0
        for k, c in self.terms.items():
            term = c
            for x, e in zip(values, k):
                if e:
                    term *= x ** e
            total += term
        return total

    def __len__(self) -> int:
        return len(self.terms)


def ghost_poly(p: int, n: int, offset: int, nvars: int) -> IntPoly:
    """w_n = sum_{i<=n} p^i Z_i^(p^(n-i)) in variables starting at ``offset``."""
    out = IntPoly({}, nvars)
    for i in range(n + 1):
        out = out + IntPoly.var(offset + i, nvars) ** (p ** (n - i)) * (p ** i)
    return out


@lru_cache(maxsize=None)
def witt_polys(p: int, m: int, op: str) -> tuple[IntPoly, ...]:
    """Universal polynomials S_i (op='add'), D_i ('sub') or P_i ('mul'), i < m.

    Variables are X_0..X_{m-1} (indices 0..m-1) then Y_0..Y_{m-1}.
    """
    nv = 2 * m
    out: list[IntPoly] = []
    for n in range(m):
        gx, gy = ghost_poly(p, n, 0, nv), ghost_poly(p, n, m, nv)
        if op == "add":
            target = gx + gy
        elif op == "sub":
            target = gx - gy
        elif op == "mul":
            target = gx * gy
        else:
            raise ValueError(op)
        for i, q in enumerate(out):
            target = target - (q ** (p ** (n - i))) * (p ** i)
        out.append(target.exact_div(p ** n))
    return tuple(out)


@lru_cache(maxsize=None)
def _modp_terms(p: int, m: int, op: str) -> tuple[tuple[tuple[tuple[int, int], ...], int], ...]:
    """Witt polynomials reduced mod p as sparse (var, exponent) lists."""
    res = []
    for poly in witt_polys(p, m, op):
        terms = []
        for k, c in poly.terms.items():
            r = c % p
            if r:
                if r > p // 2 or (r * 2 == p and c < 0):
                    r -= p
                c = r
                terms.append((tuple((i, e) for i, e in enumerate(k) if e), c))
        res.append(tuple(terms))
    return tuple(res)


def ghost_components(coords: Sequence[int], p: int) -> list[int]:
    return [sum(p ** i * coords[i] ** (p ** (n - i)) for i in range(n + 1))
            for n in range(len(coords))]


def witt_int_op(a: Sequence[int], b: Sequence[int], p: int, op: str) -> list[int]:
    m = len(a)
    vals = list(a) + list(b)
    return [q.evaluate(vals) for q in witt_polys(p, m, op)]


# ---------------------------------------------------------------------------
# Witt vectors over the tilt


@dataclass(frozen=True)
class WittVector:
    """p^(-den) * (a_0, ..., a_{m-1}) in W(O_C^flat)[1/p], truncated at length m."""

    coords: tuple
    p: int
    den: int = 0

    @property
    def length(self) -> int:
        return len(self.coords)

    def is_integral_coords(self) -> bool:
        return all(isinstance(c, int) for c in self.coords)

    def ghost(self) -> list:
        if not self.is_integral_coords():
            raise PadicError("ghost components are computed for integer coordinates")
        return [Fraction(g, self.p ** (self.den * 1)) for g in ghost_components(self.coords, self.p)]

    def __add__(self, other: "WittVector") -> "WittVector":
        return witt_add(self, other)

    def __sub__(self, other: "WittVector") -> "WittVector":
        return witt_sub(self, other)

    def __mul__(self, other: "WittVector") -> "WittVector":
        return witt_mul(self, other)


def _tilt_poly_eval(terms, values: list[TiltElement], depth: int) -> TiltElement:
    """Evaluate a mod-p Witt polynomial on tilt tops at a common depth."""
    tops = [v.restrict(depth).top for v in values]
    zero = [v.is_zero() and v.exact for v in values]
    F = tops[0].field
    for t in tops[1:]:
        if t.field != F and t.field.extends(F):
            F = t.field
    tops = [F.coerce(t) if t.field != F else t for t in tops]
    powers: dict[tuple[int, int], PadicElement] = {}

    def pw(i: int, e: int) -> PadicElement:
        key = (i, e)
        if key not in powers:
            if e == 1:
                powers[key] = tops[i]
            elif e % 2 == 0:
                h = pw(i, e // 2)
                powers[key] = h * h
            else:
                powers[key] = pw(i, e - 1) * tops[i]
        return powers[key]

    total = F.zero()
    nonzero_terms = 0
    exact_single = True
    for mono, c in terms:
        if any(zero[i] for i, _ in mono):
            continue
        term = None
        for i, e in mono:
            x = pw(i, e)
            term = x if term is None else term * x
        if term is None:
            term = F.one()
        total = total + term * c
        nonzero_terms += 1
        exact_single = exact_single and c == 1 and all(values[i].exact for i, _ in mono)
    exact = nonzero_terms == 0 or (nonzero_terms == 1 and exact_single)
    return TiltElement(total, depth, exact)


def _align_den(u: WittVector, v: WittVector) -> tuple[WittVector, WittVector]:
    if u.den < v.den:
        u = mul_p_power(u, v.den - u.den)
        u = WittVector(u.coords, u.p, v.den)
    elif v.den < u.den:
        v = mul_p_power(v, u.den - v.den)
        v = WittVector(v.coords, v.p, u.den)
    return u, v


def _witt_op(u: WittVector, v: WittVector, op: str) -> WittVector:
    if u.p != v.p:
        raise PadicError("Witt vectors over different primes")
    m = min(u.length, v.length)
    if op == "mul":
        den = u.den + v.den
    else:
        u, v = _align_den(u, v)
        den = u.den
    a, b = u.coords[:m], v.coords[:m]
    if u.is_integral_coords() and v.is_integral_coords():
        return WittVector(tuple(witt_int_op(a, b, u.p, op)), u.p, den)
    if op == "mul":
        if _is_teich(u):
            return WittVector(_teich_times(a[0], b), u.p, den)
        if _is_teich(v):
            return WittVector(_teich_times(b[0], a), u.p, den)
    vals = list(a) + list(b)
    polys = _modp_terms(u.p, m, op)
    out = []
    for i in range(m):
        involved = list(a[: i + 1]) + list(b[: i + 1])
        depth = min(x.depth for x in involved)
        out.append(_tilt_poly_eval(polys[i], vals, depth))
    return WittVector(tuple(out), u.p, den)


def _is_teich(w: WittVector) -> bool:
    return all(isinstance(c, TiltElement) and c.is_zero() and c.exact for c in w.coords[1:])


def _teich_times(x: TiltElement, coords) -> tuple:
    p = x.p
    return tuple(tilt_mul(x ** (p ** i), c) for i, c in enumerate(coords))


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    return _witt_op(u, v, "add")


def witt_sub(u: WittVector, v: WittVector) -> WittVector:
    return _witt_op(u, v, "sub")


def witt_mul(u: WittVector, v: WittVector) -> WittVector:
    return _witt_op(u, v, "mul")


def witt_neg(u: WittVector) -> WittVector:
    return witt_sub(zero_like(u), u)


def zero_like(u: WittVector) -> WittVector:
    return WittVector(tuple(_zero(c) for c in u.coords), u.p, 0)


def _zero(c):
    if isinstance(c, int):
        return 0
    return TiltElement(c.field.zero(), c.depth, True)


def frobenius(w: WittVector) -> WittVector:
    return WittVector(tuple(TiltElement(c.top, c.depth + 1, c.exact) for c in w.coords), w.p, w.den)


def inverse_frobenius(w: WittVector) -> WittVector:
    return WittVector(tuple(inverse_frobenius_flat(c) for c in w.coords), w.p, w.den)


def verschiebung(w: WittVector, zero: TiltElement) -> WittVector:
    """V(a_0, ..., a_{m-2}) = (0, a_0, ..., a_{m-2}); keeps the length."""
    return WittVector((zero,) + tuple(w.coords[:-1]), w.p, w.den)


def mul_p_power(w: WittVector, k: int) -> WittVector:
    """p^k * w = V^k F^k w, exact up to the truncation length."""
    if w.is_integral_coords():
        raise PadicError("p-power scaling is implemented for tilt coordinates")
    for _ in range(k):
        w = verschiebung(frobenius(w), _zero(w.coords[0]))
    return w


# ---------------------------------------------------------------------------
# constructors and theta


def teich(x: TiltElement, m: int) -> WittVector:
    z = TiltElement(x.field.zero(), x.depth, True)
    return WittVector((x,) + (z,) * (m - 1), x.p)


def teichmuller_digits(x: Fraction | int, p: int, m: int) -> tuple[int, list[int]]:
    """x = p^(-den) * sum p^i omega(d_i) with digits d_i in [0, p)."""
    v, a, b = split_fraction(Fraction(x), p)
    den = max(0, -v)
    mod = p ** (m + 4)
    u = (a * pow(b, -1, mod) * p ** (v + den)) % mod
    digits = []
    prec = m + 4
    for _ in range(m):
        d = u % p
        digits.append(d)
        w = pow(d, p ** prec, p ** prec) if d else 0
        u = ((u - w) % mod) // p
        mod //= p
    return den, digits


def witt_constant(tower: TiltTower, x: Fraction | int, m: int) -> WittVector:
    """Element of Z_(p)[1/p] as a Witt vector with Teichmuller-digit coordinates."""
    den, digits = teichmuller_digits(x, tower.p, m)
    return WittVector(tuple(tower.constant(d) for d in digits), tower.p, den)


def xi(tower: TiltTower, m: int) -> WittVector:
    """xi = [p-flat] - p."""
    return witt_sub(teich(tower.pflat(), m), witt_constant(tower, tower.p, m))


def theta(w: WittVector) -> PadicElement:
    """theta(sum p^i [a_i^(1/p^i)]) / p^den, with its absolute precision."""
    p = w.p
    total = None
    prec: int | None = w.length
    for i, a in enumerate(w.coords):
        if a.is_zero() and a.exact:
            continue
        if a.depth - i < 1:
            raise PrecisionError("coordinate too shallow for theta")
        b = TiltElement(a.top, a.depth - i, a.exact)
        term = sharp(b).scale_pow(i)
        if not a.exact:
            prec = min(prec, a.depth)
        term = PadicElement(term.field, list(term.coeffs), term.den, None)
        total = term if total is None else total + term
    if total is None:
        total = w.coords[0].field.zero()
    out = total.scale_pow(-w.den)
    return PadicElement(out.field, list(out.coeffs), out.den, prec - w.den)


def divide_by_xi(w: WittVector, tower: TiltTower) -> WittVector:
    """The unique w' with xi * w' = w, for w in ker(theta) (integral, den 0).

    Peel off the Teichmuller part: a_0 = p-flat * b_0, then
    w - xi [b_0] = V(r) = p F^{-1}(r) and recurse on F^{-1}(r).
    """
    if w.den:
        raise PadicError("divide_by_xi expects an integral Witt vector")
    m = w.length
    a0 = w.coords[0]
    b0 = TiltElement(a0.top * pflat_inverse(tower, a0.depth), a0.depth, a0.exact)
    first = teich(b0, m)
    if m == 1:
        return first
    r = witt_sub(w, witt_mul(xi(tower, m), first))
    r0 = r.coords[0].top
    if not (r0.is_zero() or r0.val_bound() >= 1):
        raise PadicError("first Witt coordinate did not cancel; is theta(w) = 0?")
    rest = WittVector(tuple(r.coords[1:]), w.p)
    q = divide_by_xi(inverse_frobenius(rest), tower)
    shifted = WittVector((_zero(b0),) + frobenius(q).coords, w.p)
    return witt_add(first, shifted)


def pflat_inverse(tower: TiltTower, depth: int) -> PadicElement:
    """Top of (p-flat)^(-1) at the given depth: pi^(p^L - 1) / p."""
    F = tower.field
    L = depth - 1
    if L == 0:
        return F.one().scale_pow(-1)
    if L == tower.level:
        pi = F.gen("pi")
    else:
        pi = F.gen("pi") ** (tower.p ** (tower.level - L))
    return (pi ** (tower.p ** L - 1)).scale_pow(-1)
