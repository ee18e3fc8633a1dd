"""Elements of the tilt of O_{C_p} as compatible p-power root sequences.

An element x = (x_0, x_1, ..., x_{n-1}) with x_{i+1}^p = x_i is stored through
its top component x_{n-1}; the others are x_i = x_{n-1}^{p^(n-1-i)}.  Root
systems of declared elements are exact.  Anything produced by an addition
lives in lim O_{C_p}/p, so its top is only meaningful modulo p and component i
is then known modulo p^(n-i); the sharp map inherits precision p^n.

The ring structure on tops is honest arithmetic in O_{C_p}/p: adding two
tilt elements adds their tops.  This is the formula
(x + y)_i = lim_k (x_{i+k} + y_{i+k})^{p^k} evaluated with the largest k
the depth allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .padic import (PadicElement, PadicError, PadicField, PrecisionError,
                    extend_by_root, make_base_field, split_fraction)


@dataclass(frozen=True)
class TiltElement:
    top: PadicElement
    depth: int
    exact: bool = True
    # exponents over the named generators when x is a monomial in them
    mono: tuple | None = None

    @property
    def field(self) -> PadicField:
        return self.top.field

    @property
    def p(self) -> int:
        return self.top.field.p

    def component(self, i: int) -> PadicElement:
        if not 0 <= i < self.depth:
            raise IndexError(i)
        return self.top ** (self.p ** (self.depth - 1 - i))

    def components(self) -> list[PadicElement]:
        out = [self.top]
        for _ in range(self.depth - 1):
            out.append(out[-1] ** self.p)
        return out[::-1]

    def component_precision(self, i: int) -> int | None:
        """Absolute precision of component i (None when exact)."""
        return None if self.exact else self.depth - i

    def restrict(self, depth: int) -> "TiltElement":
        if depth > self.depth:
            raise PrecisionError(f"need depth {depth}, have {self.depth}")
        if depth == self.depth:
            return self
        return TiltElement(self.top ** (self.p ** (self.depth - depth)), depth, self.exact, self.mono)

    def is_zero(self) -> bool:
        return self.top.is_zero()

    def v_flat(self) -> Fraction:
        """Valuation of x_0, read off the top component."""
        if self.top.is_zero():
            raise PrecisionError("flat valuation of zero")
        v = self.top.valuation() * self.p ** (self.depth - 1)
        if not self.exact and self.top.valuation() >= 1:
            raise PrecisionError("top component indistinguishable from 0 modulo p")
        return v

    def __mul__(self, other: "TiltElement") -> "TiltElement":
        return tilt_mul(self, other)

    def __add__(self, other: "TiltElement") -> "TiltElement":
        return tilt_add(self, other)

    def __neg__(self) -> "TiltElement":
        if self.p == 2:
            return self
        return TiltElement(-self.top, self.depth, self.exact, mono_mul(self.mono, (("t:-1", Fraction(1)),)))

    def __sub__(self, other: "TiltElement") -> "TiltElement":
        return tilt_add(self, -other)

    def __pow__(self, n: int) -> "TiltElement":
        if n < 0:
            return tilt_inverse(self) ** (-n)
        return TiltElement(self.top ** n, self.depth, self.exact, mono_pow(self.mono, n))


def mono_mul(a: tuple | None, b: tuple | None) -> tuple | None:
    if a is None or b is None:
        return None
    out = dict(a)
    for k, e in b:
        out[k] = out.get(k, Fraction(0)) + e
    return tuple(sorted((k, e) for k, e in out.items() if e))


def mono_pow(a: tuple | None, n) -> tuple | None:
    if a is None:
        return None
    return tuple((k, e * n) for k, e in a if e * n)


def _common(x: TiltElement, y: TiltElement) -> tuple[TiltElement, TiltElement]:
    d = min(x.depth, y.depth)
    x, y = x.restrict(d), y.restrict(d)
    if x.field != y.field:
        a, b = x.top._align(y.top)
        x, y = TiltElement(a, d, x.exact, x.mono), TiltElement(b, d, y.exact, y.mono)
    return x, y


def tilt_mul(x: TiltElement, y: TiltElement) -> TiltElement:
    x, y = _common(x, y)
    return TiltElement(x.top * y.top, x.depth, x.exact and y.exact, mono_mul(x.mono, y.mono))


def tilt_add(x: TiltElement, y: TiltElement, target_depth: int | None = None) -> TiltElement:
    """Sum in characteristic p; components are known modulo p^(depth-i)."""
    x, y = _common(x, y)
    if y.is_zero() and y.exact:
        out = x
    elif x.is_zero() and x.exact:
        out = y
    else:
        out = TiltElement(x.top + y.top, x.depth, False)
    if target_depth is not None:
        out = out.restrict(target_depth)
    return out


def tilt_inverse(x: TiltElement) -> TiltElement:
    return TiltElement(x.top.inverse(), x.depth, x.exact, mono_pow(x.mono, -1))


def tilt_div(x: TiltElement, y: TiltElement) -> TiltElement:
    x, y = _common(x, y)
    return TiltElement(x.top * _cached_inverse(y.top), x.depth, x.exact and y.exact,
                       mono_mul(x.mono, mono_pow(y.mono, -1)))


_INV_CACHE: dict = {}


def _cached_inverse(a: PadicElement) -> PadicElement:
    key = (a.field, a.coeffs, a.den)
    hit = _INV_CACHE.get(key)
    if hit is None:
        hit = a.inverse()
        if len(_INV_CACHE) > 512:
            _INV_CACHE.clear()
        _INV_CACHE[key] = hit
    return hit


def frobenius_flat(x: TiltElement) -> TiltElement:
    """x -> x^p; the top stays put and the depth grows by one."""
    return TiltElement(x.top, x.depth + 1, x.exact, mono_pow(x.mono, x.p))


def inverse_frobenius_flat(x: TiltElement) -> TiltElement:
    """x -> x^(1/p); the top stays put and the depth drops by one."""
    if x.depth < 2:
        raise PrecisionError("inverse Frobenius needs depth at least 2")
    return TiltElement(x.top, x.depth - 1, x.exact, mono_pow(x.mono, Fraction(1, x.p)))


def sharp(x: TiltElement, m: int | None = None) -> PadicElement:
    """x^sharp = lim x_k^(p^k), exact on declared root systems."""
    val = x.top ** (x.p ** (x.depth - 1))
    prec = None if x.exact else x.depth
    if m is not None:
        prec = m if prec is None else min(prec, m)
    if prec is None:
        return val
    return PadicElement(val.field, list(val.coeffs), val.den, prec)


def twist_exponent(x: TiltElement, y: TiltElement, eps: TiltElement) -> int:
    """Find k mod p^(n-1) with x = y * eps^k on exact root systems."""
    x, y = _common(x, y)
    n = x.depth
    ratio = x.top * _cached_inverse(y.top)
    z = eps.restrict(n).top
    if ratio.field != z.field:
        ratio, z = ratio._align(z)
    mod = x.p ** (n - 1)
    # distinct p-power roots of unity differ by valuation <= 1/(p-1), so
    # agreement beyond valuation 1 pins k down despite rounding in the tops
    zk = ratio.field.one()
    for k in range(mod):
        d = ratio - zk
        if d.is_zero() or d.valuation() > 1:
            return k
        zk = zk * z
    raise PadicError("elements do not differ by a power of eps")


# ---------------------------------------------------------------------------
# towers carrying the declared root systems


class TiltTower:
    """Q_p(zeta_{p^L}, p^{1/p^L}, u^{1/p^L} for declared units u), L = depth - 1.

    Root systems are read off the generators: eps has top zeta_{p^L}, p-flat
    has top p^{1/p^L} and the system over a unit u has top u^{1/p^L}.  For a
    general q = p^v * u the chosen system is (p-flat)^v times that of u.
    """

    def __init__(self, p: int, depth: int, units: Sequence = (), prec: int | None = None):
        if depth < 1:
            raise PadicError("depth must be at least 1")
        if p == 2 and depth > 3:
            # sqrt(2) = zeta_8 + zeta_8^-1, so X^8 - 2 splits over Q_2(zeta_8)
            raise PrecisionError("p = 2 towers stop at depth 3; deeper levels are not fields here")
        self.p = p
        self.depth = depth
        self.level = depth - 1
        self.prec = prec if prec is not None else max(16, 3 * depth + 10)
        units = [Fraction(u) for u in units]
        for u in units:
            if split_fraction(u, p)[0] != 0:
                raise PadicError(f"declared unit {u} is not a p-adic unit")
        self.units: tuple[Fraction, ...] = tuple(dict.fromkeys(units))
        F = make_base_field(p, prec=self.prec)
        self.base = F
        self.unit_names: dict[Fraction, str] = {}
        if self.level:
            F, _ = extend_by_root(F, 1, self.level, cyclotomic=True, name="z")
            F, _ = extend_by_root(F, p, self.level, name="pi")
            for i, u in enumerate(self.units):
                if u == 1 or (p > 2 and u == -1):
                    continue
                name = f"u{i}"
                F, _ = extend_by_root(F, F.from_fraction(u), self.level, name=name)
                self.unit_names[u] = name
        self.field = F

    def __repr__(self) -> str:
        return f"TiltTower(p={self.p}, depth={self.depth}, units={[str(u) for u in self.units]})"

    def eps(self) -> TiltElement:
        top = self.field.zeta(self.level) if self.level else self.field.one()
        return TiltElement(top, self.depth, True, (("eps", Fraction(1)),))

    def pflat(self) -> TiltElement:
        top = self.field.gen("pi") if self.level else self.field.from_int(self.p)
        return TiltElement(top, self.depth, True, (("pflat", Fraction(1)),))

    def unit_system(self, u) -> TiltElement:
        u = Fraction(u)
        if u == 1:
            return self.one()
        if self.p > 2 and u == -1:
            return TiltElement(self.field.from_int(-1), self.depth, True, (("t:-1", Fraction(1)),))
        label = ((f"u:{u}", Fraction(1)),)
        if not self.level:
            return TiltElement(self.field.from_fraction(u), self.depth, True, label)
        if u not in self.unit_names:
            raise PadicError(f"unit {u} was not declared in this tower")
        return TiltElement(self.field.gen(self.unit_names[u]), self.depth, True, label)

    def root_system(self, q) -> TiltElement:
        v, a, b = split_fraction(Fraction(q), self.p)
        if v < 0:
            raise PadicError("root systems are built for integral q")
        x = self.unit_system(Fraction(a, b))
        if v:
            x = tilt_mul(x, self.pflat() ** v)
        return x

    def constant(self, c: int) -> TiltElement:
        """Image of an element of F_p: the Teichmuller system of c."""
        c %= self.p
        if c == 0:
            return self.zero()
        if c == 1:
            return self.one()
        mod = self.p ** (self.prec + 4)
        w = pow(c, self.p ** (self.prec + 4), mod)
        return TiltElement(self.field.from_int(w), self.depth, True, ((f"t:{c}", Fraction(1)),))

    def embedding(self, other: "TiltTower"):
        """The inclusion of this tower's field into a deeper tower's field."""
        if other.p != self.p or other.level < self.level:
            raise PadicError("target tower is not deeper")
        if not self.level:
            return other.field.coerce
        k = self.p ** (other.level - self.level)
        G = other.field
        images = [G.zeta(other.level) ** k - G.one(), G.gen("pi") ** k]
        for u, name in self.unit_names.items():
            if u not in other.unit_names:
                raise PadicError(f"unit {u} missing from target tower")
            images.append(G.gen(other.unit_names[u]) ** k)
        F = self.field

        def embed(x: PadicElement) -> PadicElement:
            return F.apply_hom(x, images, G)
        return embed

    def lift(self, x: TiltElement, other: "TiltTower") -> TiltElement:
        """View x in a deeper tower, same depth."""
        return TiltElement(self.embedding(other)(x.top), x.depth, x.exact, x.mono)

    def zero(self) -> TiltElement:
        return TiltElement(self.field.zero(), self.depth, True)

    def one(self) -> TiltElement:
        return TiltElement(self.field.one(), self.depth, True, ())


@lru_cache(maxsize=64)
def make_tower(p: int, depth: int, units: tuple = (), prec: int | None = None) -> TiltTower:
    return TiltTower(p, depth, units, prec)


def gen_eps(tower: TiltTower, n: int | None = None) -> TiltElement:
    x = tower.eps()
    return x if n is None else x.restrict(n)


def gen_root_system(tower: TiltTower, q, n: int | None = None) -> TiltElement:
    x = tower.root_system(q)
    return x if n is None else x.restrict(n)
