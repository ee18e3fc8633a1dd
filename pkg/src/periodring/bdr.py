"""Truncated de Rham periods: normal forms sum c_j xi^j in B_dR^+/F^N.

Coefficients live in the algebraic tower of a ``TiltTower``.  Two routes lead
to normal forms:

* Witt input: c_0 = theta(w), then c_1 = theta((w - c_0)/xi), and so on while
  the coefficients found so far can be lifted back to Witt vectors (they lie
  in Q_p).  This is the honest computation and it stops as soon as a
  coefficient leaves Q_p.
* Teichmuller input: [x] for x a monomial in the declared generators
  (eps, p-flat, unit systems) is written as
      [x] = x^sharp * exp(sum_g e_g * delta_g),
  with delta_eps = tau * xi, delta_pflat = log(1 + xi/p) and
  delta_alpha = lambda_u * xi.  The numbers tau and lambda_u are obtained
  from the Witt route (divide_by_xi then theta), so every gr^1 statement is
  computed, not assumed.  Beyond gr^1 the normal form of a transcendental
  period depends on the section K-bar -> B_dR^+ and is a modelling choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .padic import PadicElement, PadicError, PrecisionError, log_K
from .tilt import TiltElement, TiltTower, make_tower, sharp
from .witt import (WittVector, divide_by_xi, teich, theta, witt_constant,
                   witt_sub)


class RecognitionError(PadicError):
    """A coefficient could not be identified at the available depth."""


def _prec(a: PadicElement) -> Fraction:
    return Fraction(a.field.prec) if a.prec is None else Fraction(a.prec)


def _with_prec(a: PadicElement, prec) -> PadicElement:
    if prec is None:
        return a
    old = a.prec
    new = prec if old is None else min(old, prec)
    return PadicElement(a.field, list(a.coeffs), a.den, new)


@dataclass(frozen=True)
class BdRElement:
    coeffs: tuple

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def field(self):
        return self.coeffs[0].field

    def __getitem__(self, j: int) -> PadicElement:
        return self.coeffs[j]

    def theta(self) -> PadicElement:
        return self.coeffs[0]

    def precisions(self) -> list[Fraction]:
        return [_prec(c) for c in self.coeffs]

    def truncate(self, N: int) -> "BdRElement":
        if N > self.N:
            raise PrecisionError(f"element only known modulo F^{self.N}")
        return BdRElement(self.coeffs[:N])

    def _binary(self, other):
        if isinstance(other, BdRElement):
            N = min(self.N, other.N)
            a = [x for x in self.coeffs[:N]]
            b = [y for y in other.coeffs[:N]]
            return a, b, N
        c = other if isinstance(other, PadicElement) else self.field.from_fraction(Fraction(other))
        b = [c] + [self.field.zero()] * (self.N - 1)
        return list(self.coeffs), b, self.N

    def __add__(self, other) -> "BdRElement":
        a, b, _ = self._binary(other)
        return BdRElement(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "BdRElement":
        return BdRElement(tuple(-x for x in self.coeffs))

    def __sub__(self, other) -> "BdRElement":
        a, b, _ = self._binary(other)
        return BdRElement(tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other) -> "BdRElement":
        return (-self) + other

    def __mul__(self, other) -> "BdRElement":
        if isinstance(other, (int, Fraction)):
            return BdRElement(tuple(c.scale(Fraction(other)) for c in self.coeffs))
        if isinstance(other, PadicElement):
            return BdRElement(tuple(c * other for c in self.coeffs))
        a, b, N = self._binary(other)
        out = []
        for k in range(N):
            acc = None
            for i in range(k + 1):
                if a[i].is_zero() and a[i].prec is None or b[k - i].is_zero() and b[k - i].prec is None:
                    continue
                term = a[i] * b[k - i]
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else a[0].field.zero())
        return BdRElement(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BdRElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.one_like()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def one_like(self) -> "BdRElement":
        F = self.field
        return BdRElement((F.one(),) + (F.zero(),) * (self.N - 1))

    def inverse(self) -> "BdRElement":
        """1/x for theta(x) != 0, by the geometric series in xi."""
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ZeroDivisionError("theta(x) = 0: not invertible in B_dR^+")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, self.N):
            acc = self.field.zero()
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(acc * inv0))
        return BdRElement(tuple(out))

    def __truediv__(self, other) -> "BdRElement":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, PadicElement):
            return self * other.inverse()
        return self * other.inverse()

    def shift_down(self) -> "BdRElement":
        """x / xi for x in F^1; the result is known modulo F^(N-1)."""
        if not self.is_zero_at(0):
            raise PrecisionError("dividing by xi needs an element of F^1")
        return BdRElement(self.coeffs[1:])

    def div_fil(self, other: "BdRElement") -> "BdRElement":
        """x / y with fil(y) = 1: both are divided by xi first."""
        return self.shift_down() / other.shift_down()

    def is_zero_at(self, j: int, tol=None) -> bool:
        c = self.coeffs[j]
        if c.is_zero():
            return True
        bound = _prec(c) if tol is None else Fraction(tol)
        return c.val_bound() >= bound

    def fil_degree(self) -> int:
        """Least j with c_j nonzero at its precision (N if none)."""
        for j in range(self.N):
            if not self.is_zero_at(j):
                return j
        return self.N

    def eq_at(self, other: "BdRElement", tol=None) -> bool:
        d = self - other
        return all(d.is_zero_at(j, tol) for j in range(d.N))

    def residual_valuations(self, other: "BdRElement") -> list:
        """Lower bounds for the valuations of coefficient differences (None for 0)."""
        d = self - other
        return [None if c.is_zero() else c.val_bound() for c in d.coeffs]

    def __repr__(self) -> str:
        return "BdRElement(" + ", ".join(repr(c) for c in self.coeffs) + ")"


# ---------------------------------------------------------------------------


class BdRContext:
    """Everything needed to produce normal forms at cutoff N over one tower."""

    def __init__(self, p: int, depth: int = 3, N: int = 3, units: Sequence = (),
                 prec: int | None = None, tower: TiltTower | None = None):
        if N < 1:
            raise ValueError("filtration cutoff must be positive")
        self.tower = tower if tower is not None else make_tower(p, depth, tuple(Fraction(u) for u in units), prec)
        self.p = self.tower.p
        self.depth = self.tower.depth
        self.N = N
        self.field = self.tower.field
        self.witt_length = self.depth
        self._cache: dict = {}

    # -- basic elements -------------------------------------------------------
    def _n(self, N):
        return self.N if N is None else N

    def const(self, a, N: int | None = None) -> BdRElement:
        N = self._n(N)
        F = self.field
        if not isinstance(a, PadicElement):
            a = F.from_fraction(Fraction(a))
        elif a.field != F:
            a = F.coerce(a)
        return BdRElement((a,) + (F.zero(),) * (N - 1))

    def xi(self, N: int | None = None) -> BdRElement:
        N = self._n(N)
        F = self.field
        if N == 1:
            return BdRElement((F.zero(),))
        return BdRElement((F.zero(), F.one()) + (F.zero(),) * (N - 2))

    def exp_fil(self, x: BdRElement) -> BdRElement:
        """exp(x) for x in F^1: a finite sum modulo F^N."""
        if not x.is_zero_at(0):
            raise PrecisionError("exp is only defined on F^1 here")
        out = x.one_like()
        power = x.one_like()
        for k in range(1, x.N):
            power = power * x
            out = out + power * Fraction(1, factorial(k))
        return out

    def log_fil(self, z: BdRElement) -> BdRElement:
        """log(1 + z) for z in F^1: a finite sum modulo F^N."""
        if not z.is_zero_at(0):
            raise PrecisionError("finite log sum needs z in F^1")
        out = z * 0
        power = z.one_like()
        for n in range(1, z.N):
            power = power * z
            out = out + power * Fraction((-1) ** (n + 1), n)
        return out

    # -- calibration by Witt division ----------------------------------------------
    def _witt_quotient(self, w: WittVector) -> PadicElement:
        # an inexact leading top that is 0 mod p carries no information about w / xi
        a0 = w.coords[0]
        if not a0.exact and (a0.top.is_zero() or a0.top.val_bound() >= 1):
            raise PrecisionError(f"leading Witt coordinate invisible at depth {self.depth}; use a deeper tower")
        q = divide_by_xi(w, self.tower)
        c = theta(q)
        return _with_prec(c, min(self.witt_length, self.depth) - 1)

    def tau(self) -> PadicElement:
        """theta(([eps] - 1) / xi)."""
        if "tau" not in self._cache:
            m = self.witt_length
            w = witt_sub(teich(self.tower.eps(), m), witt_constant(self.tower, 1, m))
            self._cache["tau"] = self._witt_quotient(w)
        return self._cache["tau"]

    def lam(self, u) -> PadicElement:
        """lambda_u with [alpha_u] = u (1 + lambda_u xi) mod F^2."""
        u = Fraction(u)
        key = ("lam", u)
        if key not in self._cache:
            if u == 1:
                self._cache[key] = self.field.zero()
            else:
                m = self.witt_length
                w = witt_sub(teich(self.tower.unit_system(u), m), witt_constant(self.tower, u, m))
                self._cache[key] = self._witt_quotient(w).scale(1 / u)
        return self._cache[key]

    def delta(self, key: str, N: int | None = None) -> BdRElement:
        """log([g] / g^sharp) for a named generator g."""
        N = self._n(N)
        F = self.field
        if key == "eps":
            return self.xi(N) * self.tau()
        if key == "pflat":
            return self.log_fil(self.xi(N) * Fraction(1, self.p))
        if key.startswith("u:"):
            return self.xi(N) * self.lam(Fraction(key[2:]))
        if key.startswith("t:"):
            return BdRElement((F.zero(),) * N)
        raise RecognitionError(f"unknown generator {key}")

    # -- Teichmuller lifts -------------------------------------------------------
    def teich_model(self, x: TiltElement, N: int | None = None) -> BdRElement:
        N = self._n(N)
        if x.mono is None:
            raise RecognitionError("Teichmuller lift needs a monomial in the declared generators")
        if x.is_zero():
            return BdRElement((self.field.zero(),) * N)
        s = sharp(x)
        if s.field != self.field:
            s = self.field.coerce(s)
        expo = BdRElement((self.field.zero(),) * N)
        for key, e in x.mono:
            expo = expo + self.delta(key, N) * e
        return self.exp_fil(expo) * s

    def normalize(self, obj, N: int | None = None) -> BdRElement:
        """Normal form of a Witt vector, a Teichmuller expression or a BdRElement.

        A Teichmuller expression is an iterable of (coefficient, TiltElement or
        None) pairs standing for sum coefficient * [x] (None means 1).
        """
        N = self._n(N)
        if isinstance(obj, BdRElement):
            return obj.truncate(N)
        if isinstance(obj, WittVector):
            return self._normalize_witt(obj, N)
        if isinstance(obj, TiltElement):
            return self.teich_model(obj, N)
        total = BdRElement((self.field.zero(),) * N)
        for coef, x in obj:
            term = self.const(1, N) if x is None else self.teich_model(x, N)
            total = total + term * (coef if isinstance(coef, PadicElement) else Fraction(coef))
        return total

    def _normalize_witt(self, w: WittVector, N: int) -> BdRElement:
        """c_0 = theta(w), c_{j+1} = theta((w - lift(c_0..c_j))/xi^(j+1)).

        Returns fewer than N coefficients when some c_j leaves Q_p, since
        such a coefficient has no Witt lift to subtract.
        """
        coeffs = []
        den = w.den
        cur = WittVector(w.coords, w.p, 0)
        m = cur.length
        for j in range(N):
            c = theta(cur)
            c = _with_prec(c.scale_pow(-den), _prec(c) - den - j)
            coeffs.append(c)
            if j == N - 1:
                break
            if c.is_zero() or c.val_bound() >= _prec(c):
                lift = None
            elif all(x == 0 for x in c.coeffs[1:]):
                lift = witt_constant(self.tower, c.scale_pow(den).rational_value(), m)
            else:
                break
            if lift is not None:
                cur = witt_sub(cur, lift)
            cur = divide_by_xi(cur, self.tower)
        return BdRElement(tuple(coeffs))

    # -- special elements ------------------------------------------------------
    def t_element(self, N: int | None = None) -> BdRElement:
        """t = log[eps] = sum (-1)^(n+1) ([eps] - 1)^n / n."""
        N = self._n(N)
        key = ("t", N)
        if key not in self._cache:
            z = self.teich_model(self.tower.eps(), N) - 1
            self._cache[key] = self.log_fil(z)
        return self._cache[key]

    def log_pi(self, N: int | None = None) -> BdRElement:
        """log[p-flat] with log p = 0: sum (-1)^(n+1) (xi/p)^n / n."""
        N = self._n(N)
        return self.log_fil(self.xi(N) * Fraction(1, self.p))

    def log_unit(self, x: TiltElement, N: int | None = None, target: int | None = None) -> BdRElement:
        """p^(-k) log [x^(p^k)] by the series, for x with unit sharp.

        When sharp(x) is not 1 mod p the exponent also absorbs p - 1; the
        torsion part contributes nothing to the logarithm.
        """
        N = self._n(N)
        F = self.field
        s = sharp(x)
        if s.field != F:
            s = F.coerce(s)
        if s.is_zero() or s.valuation() != 0:
            raise PadicError("log_unit needs v(x) = 0")
        target = target if target is not None else F.prec - 2
        mult = 1
        for extra in (1, self.p - 1):
            k = 0
            ok = False
            while k <= F.prec:
                e = extra * self.p ** k
                d = s ** e - 1
                if d.is_zero() or d.val_bound() >= (2 if self.p == 2 else 1):
                    ok = True
                    break
                k += 1
            if ok:
                mult = e
                break
        else:
            raise PrecisionError("no power of x has sharp congruent to 1")
        z = self.teich_model(x ** mult, N) - 1
        a = min(Fraction(F.prec) if z[0].is_zero() else z[0].val_bound(), Fraction(F.prec))
        b = min((Fraction(F.prec) if c.is_zero() else c.val_bound()) for c in z.coeffs[1:]) if N > 1 else a
        b = min(a, b)
        out = z * 0
        power = z.one_like()
        n = 0
        while True:
            n += 1
            power = power * z
            out = out + power * Fraction((-1) ** (n + 1), n)
            # coefficients of z^m/m have valuation >= (m-N+1)a + (N-1)b - log_p(m),
            # which is nondecreasing in m because a >= 1
            tail = (n + 1 - (N - 1)) * a + (N - 1) * b - _log_p_floor(n + 1, self.p)
            if n >= N and tail >= target + 2:
                break
            if n > 60 * (target + 2):
                raise PrecisionError("log series did not reach the target precision")
        out = out * Fraction(1, mult)
        return BdRElement(tuple(_with_prec(c, target - _vp(mult, self.p)) for c in out.coeffs))

    def log_general(self, x: TiltElement, N: int | None = None) -> BdRElement:
        """log[x] = sum e_g log[g]: t for eps, log_pi for p-flat, log_unit otherwise."""
        N = self._n(N)
        if x.mono is None:
            raise RecognitionError("log_general needs a monomial in the declared generators")
        out = BdRElement((self.field.zero(),) * N)
        for key, e in x.mono:
            if key == "eps":
                term = self.t_element(N)
            elif key == "pflat":
                term = self.log_pi(N)
            elif key.startswith("u:"):
                term = self._log_unit_gen(key, N)
            else:
                continue
            out = out + term * e
        return out

    def _log_unit_gen(self, key: str, N: int) -> BdRElement:
        ck = ("logu", key, N)
        if ck not in self._cache:
            u = Fraction(key[2:])
            self._cache[ck] = self.log_unit(self.tower.unit_system(u), N)
        return self._cache[ck]

    def embed_algebraic(self, a, N: int | None = None, minpoly: Sequence | None = None,
                        steps: int = 4) -> BdRElement:
        """The algebraic element a inside B_dR^+/F^N.

        With a minimal polynomial (coefficients low to high, in Q_p) the lift
        is refined by Newton's method starting from (a, 0, ..., 0); since a
        already satisfies its polynomial the iteration is stationary.
        """
        x = self.const(a, N)
        if minpoly is None:
            return x
        for _ in range(steps):
            f = _poly_eval(minpoly, x)
            if all(f.is_zero_at(j) for j in range(f.N)):
                break
            df = _poly_eval([Fraction(i) * Fraction(c) for i, c in enumerate(minpoly)][1:], x)
            if df[0].is_zero():
                raise PadicError("derivative vanishes at a")
            x = x - f / df
        return x

    def polynomial_residual(self, minpoly: Sequence, x: BdRElement) -> BdRElement:
        return _poly_eval(minpoly, x)


def _poly_eval(coeffs: Sequence, x: BdRElement) -> BdRElement:
    acc = x * 0
    for c in reversed(list(coeffs)):
        acc = acc * x + Fraction(c)
    return acc


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _log_p_floor(n: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


# ---------------------------------------------------------------------------
# module-level conveniences over a default context

def default_context(p: int, depth: int = 3, N: int = 3, units: Iterable = ()) -> BdRContext:
    return BdRContext(p, depth, N, tuple(units))


def normalize(ctx: BdRContext, obj, N: int | None = None) -> BdRElement:
    return ctx.normalize(obj, N)


def t_element(ctx: BdRContext, N: int | None = None) -> BdRElement:
    return ctx.t_element(N)


def log_unit(ctx: BdRContext, x: TiltElement, N: int | None = None) -> BdRElement:
    return ctx.log_unit(x, N)


def log_pi(ctx: BdRContext, N: int | None = None) -> BdRElement:
    return ctx.log_pi(N)


def log_general(ctx: BdRContext, x: TiltElement, N: int | None = None) -> BdRElement:
    return ctx.log_general(x, N)


def embed_algebraic(ctx: BdRContext, a, N: int | None = None, minpoly=None) -> BdRElement:
    return ctx.embed_algebraic(a, N, minpoly)


def log_K_check(ctx: BdRContext, x: TiltElement) -> tuple[PadicElement, PadicElement]:
    """(theta(log_unit(x)), log_K(sharp(x))) for comparison."""
    return ctx.log_unit(x).theta(), log_K(sharp(x))
