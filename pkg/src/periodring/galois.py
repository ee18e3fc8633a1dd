"""Galois data at finite level acting on the tower, the tilt, Witt vectors and normal forms.

A datum sigma records chi(sigma) = c mod p^n and Kummer exponents: k_pi for the
system of p and k_u for each declared unit, so that
    sigma(zeta) = zeta^c,  sigma(pi) = pi * zeta^k_pi,  sigma(u^(1/p^n)) = u^(1/p^n) * zeta^k_u.
For q = p^v u the cocycle is eta_q = v * k_pi + k_u.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .padic import PadicElement, PadicError, split_fraction
from .tilt import TiltElement, TiltTower, mono_mul


@dataclass(frozen=True)
class GaloisDatum:
    p: int
    level: int
    c: int
    k_pi: int = 0
    k_units: tuple = field(default_factory=tuple)  # sorted (unit, k) pairs

    @property
    def modulus(self) -> int:
        return self.p ** self.level

    def chi(self) -> int:
        return self.c % self.modulus if self.level else 1

    def k_unit(self, u) -> int:
        u = Fraction(u)
        if u == 1 or (self.p > 2 and u == -1):
            return 0
        for v, k in self.k_units:
            if v == u:
                return k
        raise PadicError(f"no Kummer exponent declared for unit {u}")

    def eta(self, q) -> int:
        """eta_q(sigma) for the chosen system of q = p^v * u."""
        v, a, b = split_fraction(Fraction(q), self.p)
        if not self.level:
            return 0
        return (v * self.k_pi + self.k_unit(Fraction(a, b))) % self.modulus

    def units(self) -> tuple:
        return tuple(u for u, _ in self.k_units)

    def __repr__(self) -> str:
        ks = ", ".join(f"{u}:{k}" for u, k in self.k_units)
        return f"GaloisDatum(p={self.p}, n={self.level}, c={self.c}, k_pi={self.k_pi}, k_u={{{ks}}})"


def make_datum(p: int, level: int, c: int, k_pi: int = 0, k_units: dict | None = None) -> GaloisDatum:
    mod = p ** level
    ku = tuple(sorted((Fraction(u), k % mod if level else 0) for u, k in (k_units or {}).items()))
    return GaloisDatum(p, level, c % mod if level else 1, k_pi % mod if level else 0, ku)


def identity(p: int, level: int, units: Iterable = ()) -> GaloisDatum:
    return make_datum(p, level, 1, 0, {u: 0 for u in units})


def compose(s: GaloisDatum, t: GaloisDatum) -> GaloisDatum:
    """s after t: chi multiplies, eta(st) = eta(s) + chi(s) eta(t)."""
    if (s.p, s.level) != (t.p, t.level):
        raise PadicError("Galois data at different levels")
    if s.units() != t.units():
        raise PadicError("Galois data over different symbol sets")
    mod = s.modulus
    ku = {u: (k + s.c * t.k_unit(u)) % mod for u, k in s.k_units}
    return make_datum(s.p, s.level, s.c * t.c, s.k_pi + s.c * t.k_pi, ku)


def inverse(s: GaloisDatum) -> GaloisDatum:
    mod = s.modulus
    ci = pow(s.c, -1, mod) if s.level else 1
    ku = {u: (-ci * k) % mod for u, k in s.k_units}
    return make_datum(s.p, s.level, ci, -ci * s.k_pi, ku)


# ---------------------------------------------------------------------------
# action on the tower


def generator_images(s: GaloisDatum, tower: TiltTower) -> list[PadicElement]:
    """Images of the tower generators, in step order."""
    F = tower.field
    if tower.level == 0:
        return []
    if tower.level != s.level:
        raise PadicError(f"datum at level {s.level} but tower at level {tower.level}")
    zeta = F.zeta(tower.level)
    images = [zeta ** s.c - F.one(), F.gen("pi") * zeta ** s.k_pi]
    for u, name in tower.unit_names.items():
        images.append(F.gen(name) * zeta ** s.k_unit(u))
    return images


_IMAGE_CACHE: dict = {}


def _images(s: GaloisDatum, tower: TiltTower):
    key = (s, id(tower))
    if key not in _IMAGE_CACHE:
        _IMAGE_CACHE[key] = generator_images(s, tower)
    return _IMAGE_CACHE[key]


def validate(s: GaloisDatum, tower: TiltTower | None = None) -> bool:
    """True iff the generator images satisfy the defining relations of the tower."""
    if s.level and s.c % s.p == 0:
        return False
    if tower is None or tower.level == 0:
        return True
    F = tower.field
    L = tower.level
    n = s.p ** L
    images = generator_images(s, tower)
    zeta_img = images[0] + F.one()
    if zeta_img ** n != F.one():
        return False
    if L and zeta_img ** (n // s.p) == F.one():
        return False
    radicands = [F.from_int(s.p)] + [F.from_fraction(u) for u in tower.unit_names]
    return all(img ** n == r for img, r in zip(images[1:], radicands))


def act_on_field(s: GaloisDatum, tower: TiltTower, a: PadicElement) -> PadicElement:
    if tower.level == 0:
        return a
    F = tower.field
    if a.field != F:
        a = F.coerce(a)
    out = F.apply_hom(a, _images(s, tower), F)
    return out if a.prec is None else PadicElement(F, list(out.coeffs), out.den, a.prec)


def act_on_mono(s: GaloisDatum, mono):
    if mono is None:
        return None
    out: tuple = ()
    for key, e in mono:
        if key == "eps":
            term = (("eps", e * s.c),)
        elif key == "pflat":
            term = (("pflat", e), ("eps", e * s.k_pi))
        elif key.startswith("u:"):
            term = ((key, e), ("eps", e * s.k_unit(Fraction(key[2:]))))
        else:
            term = ((key, e),)
        out = mono_mul(out, term)
    return out


def act_on_tilt(s: GaloisDatum, tower: TiltTower, x: TiltElement) -> TiltElement:
    """Componentwise: apply sigma to the top component."""
    return TiltElement(act_on_field(s, tower, x.top), x.depth, x.exact, act_on_mono(s, x.mono))


def act_on_witt(s: GaloisDatum, tower: TiltTower, w):
    from .witt import WittVector
    return WittVector(tuple(act_on_tilt(s, tower, a) for a in w.coords), w.p, w.den)


def sigma_xi(s: GaloisDatum, ctx, N: int | None = None):
    """sigma(xi) = [p-flat * eps^k_pi] - p."""
    return ctx.teich_model(act_on_tilt(s, ctx.tower, ctx.tower.pflat()), N) - ctx.p


def act_on_bdr(s: GaloisDatum, ctx, b):
    """sigma(sum c_j xi^j) = sum sigma(c_j) sigma(xi)^j."""
    from .bdr import BdRElement
    N = b.N
    sx = sigma_xi(s, ctx, N)
    out = BdRElement((ctx.field.zero(),) * N)
    power = sx.one_like()
    for j in range(N):
        out = out + power * act_on_field(s, ctx.tower, b[j])
        power = power * sx
    return out


# ---------------------------------------------------------------------------
# sampling


def smallest_primitive_root(p: int, level: int) -> int:
    mod = p ** level
    if mod <= 2:
        return 1
    units = [a for a in range(1, mod) if a % p]
    order = len(units)
    for g in range(2, mod):
        if g % p == 0:
            continue
        x, k = g, 1
        while x != 1:
            x = x * g % mod
            k += 1
        if k == order:
            return g
    # (Z/2^n)^x is not cyclic for n >= 3; -1 and 5 generate, take 5
    return 5 if p == 2 else 1


def sample_data(p: int, level: int, units: Sequence = (), count: int = 8,
                seed: int = 0) -> list[GaloisDatum]:
    """Identity, the cyclotomic generator, one Kummer shift per symbol, then random composites."""
    units = [Fraction(u) for u in units if Fraction(u) != 1 and not (p > 2 and Fraction(u) == -1)]
    base = identity(p, level, units)
    out = [base]
    g = smallest_primitive_root(p, level)
    out.append(make_datum(p, level, g, 0, {u: 0 for u in units}))
    out.append(make_datum(p, level, 1, 1, {u: 0 for u in units}))
    for u in units:
        out.append(make_datum(p, level, 1, 0, {v: int(v == u) for v in units}))
    rng = random.Random(seed)
    mod = p ** level
    while len(out) < count:
        c = rng.randrange(1, max(mod, 2))
        if level and c % p == 0:
            continue
        out.append(make_datum(p, level, c, rng.randrange(mod), {u: rng.randrange(mod) for u in units}))
    return out
