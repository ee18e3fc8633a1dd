"""Finite-precision arithmetic in p-adic fields and explicit extension towers.

A field is a tower of simple extensions of Q_p.  Each step adjoins one
generator ``g`` subject to a monic relation ``g^d = sum_{i<d} r_i g^i`` whose
coefficients live in the previous level.  Elements are stored as a flat
vector of integers over the monomial basis (first generator varies fastest)
together with a power of p in the denominator.  Everything is computed
modulo ``p^W`` where ``W`` is the working precision of the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence


class PadicError(Exception):
    """Invalid input to a p-adic construction."""


class PrecisionError(PadicError):
    """The requested result is not determined at the working precision."""


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_fraction(x: Fraction | int, p: int) -> int:
    x = Fraction(x)
    return vp(x.numerator, p) - vp(x.denominator, p)


def split_fraction(x: Fraction | int, p: int) -> tuple[int, int, int]:
    """Write x = p^v * a / b with p not dividing a*b."""
    x = Fraction(x)
    a, b, v = x.numerator, x.denominator, 0
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v, a, b


def _cyclotomic_shifted(p: int, k: int) -> list[int]:
    """Coefficients (low to high) of Phi_{p^k}(1 + X)."""
    m = p ** (k - 1)
    # Phi_{p^k}(Y) = sum_{i<p} Y^{i m}; expand at Y = 1 + X.
    out = [0] * ((p - 1) * m + 1)
    for i in range(p):
        n = i * m
        c = 1
        for j in range(n + 1):
            out[j] += c
            c = c * (n - j) // (j + 1)
    return out


def _gfp_irreducible(poly: list[int], p: int) -> bool:
    """Rabin irreducibility test for a monic polynomial over F_p (low to high)."""
    n = len(poly) - 1

    def trim(a):
        while a and a[-1] % p == 0:
            a.pop()
        return a

    def mulmod(a, b):
        r = [0] * (len(a) + len(b) - 1) if a and b else []
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    r[i + j] = (r[i + j] + x * y) % p
        return polymod(r)

    def polymod(a):
        a = trim([x % p for x in a])
        while len(a) > n:
            c = a[-1]
            s = len(a) - 1 - n
            for i in range(n + 1):
                a[s + i] = (a[s + i] - c * poly[i]) % p
            trim(a)
        return a

    def powx(e):
        result, base = [1], polymod([0, 1])
        while e:
            if e & 1:
                result = mulmod(result, base)
            base = mulmod(base, base)
            e >>= 1
        return result

    def gcd(a, b):
        a, b = trim(list(a)), trim(list(b))
        while b:
            inv = pow(b[-1], -1, p)
            while len(a) >= len(b) and a:
                c = a[-1] * inv % p
                s = len(a) - len(b)
                for i in range(len(b)):
                    a[s + i] = (a[s + i] - c * b[i]) % p
                trim(a)
            a, b = b, a
        return a

    def sub_x(a):
        a = list(a) + [0] * max(0, 2 - len(a))
        a[1] = (a[1] - 1) % p
        return trim(a)

    primes = [q for q in range(2, n + 1) if n % q == 0 and all(q % r for r in range(2, q))]
    for q in primes:
        g = gcd(list(poly), sub_x(powx(p ** (n // q))))
        if len(g) > 1:
            return False
    return not trim(sub_x(powx(p ** n)))


@dataclass(frozen=True)
class Step:
    """One simple extension in a tower."""

    kind: str  # unramified | eisenstein | cyclotomic | kummer
    name: str
    degree: int
    relation: tuple[tuple[int, ...], ...]  # X^d = sum relation[i] X^i, lower-level coefficient vectors
    valuation: Fraction
    certified: bool
    k: int = 0
    radicand: tuple[int, ...] = ()


class PadicField:
    """A tower of simple extensions of Q_p with working precision ``prec``."""

    def __init__(self, p: int, steps: Sequence[Step] = (), prec: int = 20,
                 e: int = 1, f: int = 1, log: Sequence[str] = ()):
        self.p = p
        self.steps = tuple(steps)
        self.prec = prec
        self.e = e
        self.f = f
        self.provenance = list(log)
        self.degs = [s.degree for s in self.steps]
        sizes = [1]
        for d in self.degs:
            sizes.append(sizes[-1] * d)
        self.sizes = sizes  # sizes[k] = dimension of the first k steps
        self.degree = sizes[-1]
        self._monoval = self._monomial_valuations()
        self._relnz = [[any(c) for c in s.relation] for s in self.steps]

    # -- structure ---------------------------------------------------------
    def _monomial_valuations(self) -> list[Fraction]:
        vals = [Fraction(0)]
        for s in self.steps:
            vals = [v + i * s.valuation for i in range(s.degree) for v in vals]
        return vals

    @property
    def is_field(self) -> bool:
        return all(s.certified for s in self.steps)

    def step_index(self, name: str) -> int:
        for i, s in enumerate(self.steps):
            if s.name == name:
                return i
        raise KeyError(name)

    def has_step(self, name: str) -> bool:
        return any(s.name == name for s in self.steps)

    def extends(self, other: "PadicField") -> bool:
        return (self.p == other.p and len(self.steps) >= len(other.steps)
                and self.steps[: len(other.steps)] == other.steps)

    def with_prec(self, prec: int) -> "PadicField":
        return PadicField(self.p, self.steps, prec, self.e, self.f, self.provenance)

    def __eq__(self, other) -> bool:
        return isinstance(other, PadicField) and self.p == other.p and self.steps == other.steps

    def __hash__(self) -> int:
        return hash((self.p, self.steps))

    def __repr__(self) -> str:
        names = ",".join(s.name for s in self.steps) or "-"
        return f"PadicField(p={self.p}, gens={names}, degree={self.degree}, prec={self.prec})"

    # -- element constructors ----------------------------------------------
    def element(self, coeffs: Iterable[int], den: int = 0, prec=None) -> "PadicElement":
        return PadicElement(self, list(coeffs), den, prec)

    def zero(self) -> "PadicElement":
        return PadicElement(self, [0] * self.degree, 0, None)

    def one(self) -> "PadicElement":
        return self.from_int(1)

    def from_int(self, n: int) -> "PadicElement":
        c = [0] * self.degree
        c[0] = n
        return PadicElement(self, c, 0, None)

    def from_fraction(self, x: Fraction | int) -> "PadicElement":
        v, a, b = split_fraction(Fraction(x), self.p) if x else (0, 0, 1)
        if a == 0:
            return self.zero()
        den = max(0, -v)
        mod = self.p ** (self.prec + den)
        num = a * pow(b, -1, mod) * self.p ** max(0, v) % mod
        c = [0] * self.degree
        c[0] = num
        return PadicElement(self, c, den, None)

    def coerce(self, x) -> "PadicElement":
        if isinstance(x, PadicElement):
            if x.field == self:
                return x
            if self.extends(x.field):
                pad = [0] * (self.degree - x.field.degree)
                return PadicElement(self, list(x.coeffs) + pad, x.den, x.prec)
            raise PadicError(f"cannot coerce element of {x.field} into {self}")
        return self.from_fraction(Fraction(x))

    def gen(self, name: str) -> "PadicElement":
        i = self.step_index(name)
        c = [0] * self.degree
        step = self.steps[i]
        if step.degree == 1:
            # X = relation[0] already lies in the lower level (zeta_2 - 1 = -2)
            c[: self.sizes[i]] = step.relation[0]
            return PadicElement(self, c, 0, None)
        c[self.sizes[i]] = 1
        return PadicElement(self, c, 0, None)

    def zeta(self, j: int) -> "PadicElement":
        """The chosen primitive p^j-th root of unity (j=0 gives 1)."""
        if j == 0:
            return self.one()
        step = self._cyclo_step()
        if j > step.k:
            raise PadicError(f"tower only contains zeta_{{p^{step.k}}}")
        z = self.gen(step.name) + 1
        return z ** (self.p ** (step.k - j))

    def root(self, name: str, j: int) -> "PadicElement":
        """The chosen p^j-th root of the radicand of Kummer step ``name``."""
        step = self.steps[self.step_index(name)]
        if j > step.k:
            raise PadicError(f"step {name} only has p^{step.k}-th roots")
        return self.gen(name) ** (self.p ** (step.k - j))

    def _cyclo_step(self) -> Step:
        for s in self.steps:
            if s.kind == "cyclotomic":
                return s
        raise PadicError("tower has no cyclotomic step")

    @property
    def cyclotomic_level(self) -> int:
        for s in self.steps:
            if s.kind == "cyclotomic":
                return s.k
        return 0

    def uniformizer(self) -> "PadicElement":
        for s in self.steps:
            if s.kind == "eisenstein":
                return self.gen(s.name)
        return self.from_int(self.p)

    # -- raw arithmetic on coefficient lists -----------------------------------
    def _mul_raw(self, a: list[int], b: list[int], k: int, mod: int) -> list[int]:
        if k < 0:
            return [a[0] * b[0] % mod]
        d = self.degs[k]
        s = self.sizes[k]
        rel = self.steps[k].relation
        nz = self._relnz[k]
        if s == 1:
            prod = [0] * (2 * d - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        if y:
                            prod[i + j] += x * y
            for i in range(2 * d - 2, d - 1, -1):
                c = prod[i] % mod
                if c:
                    for m in range(d):
                        if nz[m]:
                            prod[i - d + m] += c * rel[m][0]
            return [x % mod for x in prod[:d]]
        A = [a[i * s:(i + 1) * s] for i in range(d)]
        B = [b[i * s:(i + 1) * s] for i in range(d)]
        ia = [i for i in range(d) if any(A[i])]
        ib = [j for j in range(d) if any(B[j])]
        prod: list = [None] * (2 * d - 1)
        for i in ia:
            for j in ib:
                c = self._mul_raw(A[i], B[j], k - 1, mod)
                q = prod[i + j]
                prod[i + j] = c if q is None else [(x + y) % mod for x, y in zip(q, c)]
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c is None or not any(c):
                continue
            for m in range(d):
                if nz[m]:
                    t = self._mul_raw(c, list(rel[m]), k - 1, mod)
                    q = prod[i - d + m]
                    prod[i - d + m] = t if q is None else [(x + y) % mod for x, y in zip(q, t)]
        out: list[int] = []
        for i in range(d):
            out.extend(prod[i] if prod[i] is not None else [0] * s)
        return out

    def apply_hom(self, x: "PadicElement", images: Sequence["PadicElement"],
                  target: "PadicField") -> "PadicElement":
        """Evaluate x at generator images (one per step) inside ``target``."""

        def rec(coeffs: list[int], k: int) -> PadicElement:
            if k < 0:
                return target.from_int(coeffs[0])
            s = self.sizes[k]
            d = self.degs[k]
            acc = rec(coeffs[(d - 1) * s: d * s], k - 1)
            for i in range(d - 2, -1, -1):
                acc = acc * images[k] + rec(coeffs[i * s:(i + 1) * s], k - 1)
            return acc

        out = rec(list(x.coeffs), len(self.steps) - 1)
        return out.scale_pow(-x.den)


class PadicElement:
    """An element of a ``PadicField``: ``sum coeffs[i] * basis[i] / p^den``.

    ``prec`` is the absolute precision (value known modulo p^prec); ``None``
    means known to the working precision of the field.
    """

    __slots__ = ("field", "coeffs", "den", "prec")

    def __init__(self, field: PadicField, coeffs: list[int], den: int = 0, prec=None):
        p = field.p
        mod = p ** (field.prec + den)
        coeffs = [c % mod for c in coeffs]
        while den > 0 and all(c % p == 0 for c in coeffs):
            coeffs = [c // p for c in coeffs]
            den -= 1
        self.field = field
        self.coeffs = tuple(coeffs)
        self.den = den
        if prec is not None and prec >= field.prec:
            prec = None
        self.prec = prec

    # -- helpers -----------------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    def _abs_prec(self) -> Fraction:
        return Fraction(self.field.prec) if self.prec is None else Fraction(self.prec)

    def _align(self, other) -> tuple["PadicElement", "PadicElement"]:
        if not isinstance(other, PadicElement):
            return self, self.field.coerce(other)
        if other.field == self.field:
            return self, other
        if self.field.extends(other.field):
            return self, self.field.coerce(other)
        if other.field.extends(self.field):
            return other.field.coerce(self), other
        raise PadicError("elements of unrelated fields")

    @staticmethod
    def _min_prec(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other) -> "PadicElement":
        a, b = self._align(other)
        d = max(a.den, b.den)
        sa, sb = a.p ** (d - a.den), a.p ** (d - b.den)
        c = [x * sa + y * sb for x, y in zip(a.coeffs, b.coeffs)]
        return PadicElement(a.field, c, d, self._min_prec(a.prec, b.prec))

    __radd__ = __add__

    def __neg__(self) -> "PadicElement":
        return PadicElement(self.field, [-c for c in self.coeffs], self.den, self.prec)

    def __sub__(self, other) -> "PadicElement":
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other) -> "PadicElement":
        return (-self) + other

    def __mul__(self, other) -> "PadicElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        a, b = self._align(other)
        F = a.field
        d = a.den + b.den
        mod = F.p ** (F.prec + d)
        c = F._mul_raw(list(a.coeffs), list(b.coeffs), len(F.steps) - 1, mod)
        prec = None
        if a.prec is not None or b.prec is not None:
            pa, pb = a._abs_prec(), b._abs_prec()
            prec = min(pa + b.val_bound(), pb + a.val_bound())
        return PadicElement(F, c, d, prec)

    __rmul__ = __mul__

    def scale(self, x: Fraction) -> "PadicElement":
        if x == 0:
            return self.field.zero()
        v, a, b = split_fraction(x, self.p)
        mod = self.p ** (self.field.prec + self.den + max(0, -v))
        u = a * pow(b, -1, mod)
        out = PadicElement(self.field, [c * u for c in self.coeffs], self.den, self.prec)
        return out.scale_pow(v)

    def scale_pow(self, v: int) -> "PadicElement":
        """Multiply by p^v exactly."""
        prec = None if self.prec is None else self.prec + v
        if v >= 0:
            return PadicElement(self.field, [c * self.p ** v for c in self.coeffs], self.den, prec)
        return PadicElement(self.field, list(self.coeffs), self.den - v, prec)

    def __pow__(self, n: int) -> "PadicElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "PadicElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        a, b = self._align(other)
        return a * b.inverse()

    # -- valuations ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def val_bound(self) -> Fraction:
        """Lower bound for the valuation read off the coefficient vector.

        Exact for towers with a single ramified generator.
        """
        best = None
        for c, mv in zip(self.coeffs, self.field._monoval):
            if c:
                v = vp(c, self.p) + mv
                if best is None or v < best:
                    best = v
        if best is None:
            return Fraction(self.field.prec)
        return Fraction(best) - self.den

    def valuation(self) -> Fraction:
        """Valuation normalized by v(p)=1, computed from the norm."""
        if self.is_zero():
            raise PrecisionError("valuation of an element indistinguishable from 0")
        F = self.field
        if len(F.steps) <= 1 or F.degree == 1:
            return self.val_bound()
        cols = []
        for i in range(F.degree):
            b = [0] * F.degree
            b[i] = 1
            cols.append(list((self * F.element(b)).coeffs))
        shift = self.den
        vdet = _padic_det_val(cols, F.p, F.prec * F.degree)
        return Fraction(vdet, F.degree) - shift

    def eq_at(self, other, prec) -> bool:
        d = self - other
        return d.is_zero() or d.val_bound() >= prec

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PadicElement, int, Fraction)):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.coeffs, self.den))

    # -- inversion -----------------------------------------------------------
    def inverse(self) -> "PadicElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        F = self.field
        if F.degree == 1:
            v, a, _ = split_fraction(Fraction(self.coeffs[0], 1), F.p)
            mod = F.p ** (F.prec + v + self.den + 1)
            inv = pow(a, -1, mod)
            return PadicElement(F, [inv], v, None).scale_pow(self.den)
        cols = []
        for i in range(F.degree):
            b = [0] * F.degree
            b[i] = 1
            cols.append(list((self * F.element(b)).coeffs))
        rhs = [0] * F.degree
        rhs[0] = 1
        sol, den = _padic_solve(cols, rhs, F.p, 2 * F.prec + 4)
        out = PadicElement(F, sol, den, None)
        return out.scale_pow(self.den) if self.den else out

    def to_fraction(self) -> Fraction:
        if any(self.coeffs[1:]):
            raise PadicError("element is not in Q_p")
        return Fraction(self.coeffs[0], self.p ** self.den)

    def rational_value(self) -> Fraction:
        """Symmetric-residue rational representative of an element of Q_p."""
        c = self.coeffs[0]
        if any(self.coeffs[1:]):
            raise PadicError("element is not in Q_p")
        mod = self.p ** (self.field.prec + self.den)
        if c > mod // 2:
            c -= mod
        return Fraction(c, self.p ** self.den)

    def __repr__(self) -> str:
        terms = [f"{c}*b{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms[:6]) + (" + ..." if len(terms) > 6 else "") or "0"
        scale = f"/p^{self.den}" if self.den else ""
        return f"({body}){scale}"


def _padic_eliminate(cols: list[list[int]], p: int, W: int):
    """Full-pivot elimination over Z/p^W of the matrix whose columns are ``cols``."""
    n = len(cols)
    mod = p ** W
    A = [[cols[j][i] % mod for j in range(n)] for i in range(n)]
    order = list(range(n))
    pivots = []
    for r in range(n):
        best = None
        for i in range(r, n):
            for j in range(r, n):
                x = A[i][j]
                if x:
                    v = vp(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            raise PrecisionError("matrix singular at working precision")
        v, i, j = best
        A[r], A[i] = A[i], A[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        order[r], order[j] = order[j], order[r]
        piv = A[r][r]
        u = pow(piv // p ** v, -1, mod)
        for i2 in range(r + 1, n):
            x = A[i2][r]
            if x:
                f = (x // p ** v) * u % mod
                A[i2] = [(a - f * b) % mod for a, b in zip(A[i2], A[r])]
        pivots.append(v)
    return A, pivots, order


def _padic_det_val(cols: list[list[int]], p: int, W: int) -> int:
    _, pivots, _ = _padic_eliminate(cols, p, W)
    return sum(pivots)


def _padic_solve(cols: list[list[int]], rhs: list[int], p: int, W: int) -> tuple[list[int], int]:
    """Solve M x = rhs where M has the given columns; returns (x * p^den, den)."""
    n = len(cols)
    mod = p ** W
    A, pivots, order = _padic_eliminate_aug(cols, rhs, p, W)
    den = sum(pivots)
    scale = p ** den
    y = [0] * n
    for r in range(n - 1, -1, -1):
        acc = A[r][n] * scale
        for j in range(r + 1, n):
            acc -= A[r][j] * y[j]
        v = pivots[r]
        piv = A[r][r]
        u = pow(piv // p ** v, -1, mod * scale)
        acc %= mod * scale
        if acc % p ** v:
            raise PrecisionError("inexact division during back substitution")
        y[r] = (acc // p ** v) * u % (mod * scale)
    x = [0] * n
    for r in range(n):
        x[order[r]] = y[r]
    return x, den


def _padic_eliminate_aug(cols, rhs, p, W):
    n = len(cols)
    mod = p ** W
    A = [[cols[j][i] % mod for j in range(n)] + [rhs[i] % mod] for i in range(n)]
    order = list(range(n))
    pivots = []
    for r in range(n):
        best = None
        for i in range(r, n):
            for j in range(r, n):
                x = A[i][j]
                if x:
                    v = vp(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best and best[0] == 0:
                break
        if best is None:
            raise PrecisionError("matrix singular at working precision")
        v, i, j = best
        A[r], A[i] = A[i], A[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        order[r], order[j] = order[j], order[r]
        u = pow(A[r][r] // p ** v, -1, mod)
        for i2 in range(r + 1, n):
            x = A[i2][r]
            if x:
                f = (x // p ** v) * u % mod
                A[i2] = [(a - f * b) % mod for a, b in zip(A[i2], A[r])]
        pivots.append(v)
    return A, pivots, order


# ---------------------------------------------------------------------------
# constructions


def make_base_field(p: int, eisenstein_coeffs: Sequence[int] | None = None,
                    unramified_degree: int = 1, prec: int = 20) -> PadicField:
    """Build K = Q_p(unramified of degree f)(Eisenstein root).

    ``eisenstein_coeffs`` lists the coefficients of a monic polynomial from
    the constant term up, e.g. ``[-3, 0, 1]`` for X^2 - 3.  A linear
    polynomial means no ramified step.
    """
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise PadicError(f"{p} is not prime")
    steps: list[Step] = []
    log: list[str] = []
    f = unramified_degree
    if f > 1:
        poly = _first_irreducible(p, f)
        rel = tuple((-c,) for c in poly[:-1])
        steps.append(Step("unramified", "g", f, rel, Fraction(0), True))
        log.append(f"unramified step: first monic irreducible mod {p} of degree {f}: {poly}")
    e = 1
    if eisenstein_coeffs is not None and len(eisenstein_coeffs) > 2:
        coeffs = list(eisenstein_coeffs)
        if coeffs[-1] != 1:
            raise PadicError("Eisenstein polynomial must be monic")
        e = len(coeffs) - 1
        if coeffs[0] == 0 or vp(coeffs[0], p) != 1:
            raise PadicError("constant term must have valuation exactly 1")
        if any(c % p for c in coeffs[1:-1]):
            raise PadicError("non-leading coefficients must be divisible by p")
        size = f
        rel = []
        for c in coeffs[:-1]:
            v = [0] * size
            v[0] = -c
            rel.append(tuple(v))
        steps.append(Step("eisenstein", "w", e, tuple(rel), Fraction(1, e), True))
        log.append(f"eisenstein step: {coeffs}")
    return PadicField(p, steps, prec, e=e, f=f, log=log)


def _first_irreducible(p: int, f: int) -> list[int]:
    import itertools

    for tail in itertools.product(range(p), repeat=f):
        poly = list(tail) + [1]
        if poly[0] and _gfp_irreducible(poly, p):
            return poly
    raise PadicError("no irreducible polynomial found")


def extend_by_root(field: PadicField, a, k: int, cyclotomic: bool = False,
                   name: str | None = None) -> tuple[PadicField, Callable[[PadicElement], PadicElement]]:
    """Adjoin a root of X^{p^k} - a, or a primitive p^k-th root of unity.

    For the cyclotomic case the generator is ``zeta - 1`` with relation
    Phi_{p^k}(1 + X) = 0.  Returns the new field and the embedding of the
    old field.
    """
    if k < 1:
        raise PadicError("k must be at least 1")
    p = field.p
    size = field.degree
    log = list(field.provenance)
    if cyclotomic:
        if field.cyclotomic_level:
            raise PadicError("tower already has a cyclotomic step")
        poly = _cyclotomic_shifted(p, k)
        d = len(poly) - 1
        rel = []
        for c in poly[:-1]:
            v = [0] * size
            v[0] = -c
            rel.append(tuple(v))
        certified = field.e == 1
        step = Step("cyclotomic", name or "z", d, tuple(rel), Fraction(1, d), certified, k=k)
        log.append(f"cyclotomic step zeta_{{{p}^{k}}}: generator zeta-1, "
                   f"{'Eisenstein over unramified base' if certified else 'not certified irreducible'}")
        new = PadicField(p, list(field.steps) + [step], field.prec,
                         e=field.e * d, f=field.f, log=log)
    else:
        a = field.coerce(a)
        if a.is_zero():
            raise PadicError("cannot take roots of 0")
        if a.den:
            raise PadicError("radicand must be integral")
        d = p ** k
        rel = [tuple(a.coeffs)] + [tuple([0] * size)] * (d - 1)
        va = a.valuation()
        ve = va * field.e
        certified = ve.denominator == 1 and ve.numerator % p != 0
        label = name or f"r{len(field.steps)}"
        step = Step("kummer", label, d, tuple(rel), va / d, certified, k=k, radicand=tuple(a.coeffs))
        log.append(f"kummer step {label}: X^{d} - radicand, "
                   f"{'totally ramified (valuation prime to p)' if certified else 'not certified irreducible'}")
        new = PadicField(p, list(field.steps) + [step], field.prec,
                         e=field.e * d if certified or va == 0 else field.e, f=field.f, log=log)

    def embed(x: PadicElement) -> PadicElement:
        return new.coerce(x)

    return new, embed


def hensel_lift(poly: Sequence, x0: PadicElement, max_iter: int = 64) -> PadicElement:
    """Newton iteration for a root of ``poly`` (coefficients low to high)."""
    F = x0.field
    coeffs = [F.coerce(c) for c in poly]
    dcoeffs = [c * i for i, c in enumerate(coeffs)][1:]

    def ev(cs, x):
        acc = F.zero()
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    fx, dfx = ev(coeffs, x0), ev(dcoeffs, x0)
    if fx.is_zero():
        return x0
    if dfx.is_zero() or fx.val_bound() <= 2 * dfx.valuation():
        raise PadicError("Newton criterion |f(x0)| < |f'(x0)|^2 fails")
    x = x0
    for _ in range(max_iter):
        fx = ev(coeffs, x)
        if fx.is_zero() or fx.val_bound() >= F.prec:
            return x
        x = x - fx / ev(dcoeffs, x)
    raise PrecisionError("Newton iteration did not converge")


def _log_series(z: PadicElement, target: int) -> PadicElement:
    p = z.p
    v = z.val_bound()
    if v <= Fraction(1, p - 1):
        raise PrecisionError("log series outside its certified domain")
    total = z.field.zero()
    power = z
    n = 1
    while True:
        # remaining terms have valuation >= n v - log_p n
        lp = 0
        while p ** (lp + 1) <= n:
            lp += 1
        if n * v - lp >= target and n > 1:
            break
        term = power.scale(Fraction((-1) ** (n + 1), n))
        total = total + term
        power = power * z
        n += 1
    return total


def log_K(x: PadicElement, target: int | None = None) -> PadicElement:
    """Branch of the logarithm with log_K(p) = 0.

    For x of valuation k/e, log_K(x) = log((x^e / p^k)^(q-1)) / (e (q-1)) with
    q the residue field size; the inner argument is a principal unit.
    """
    F = x.field
    p = F.p
    if target is None:
        target = F.prec - 4
    v = x.valuation()
    ke = v * F.e
    if ke.denominator != 1:
        raise PadicError("valuation not compatible with the ramification index")
    y = (x ** F.e).scale_pow(-int(ke))
    q1 = p ** F.f - 1
    y = y ** q1
    boost = 0
    one = F.one()
    threshold = 1 if p > 2 else 2
    z = y - one
    while not z.is_zero() and z.val_bound() < threshold:
        y = y ** p
        boost += 1
        z = y - one
        if boost > 4 * F.degree + 8:
            raise PrecisionError("could not reach the convergence disc of log")
    if z.is_zero():
        return F.zero()
    extra = boost + vp(F.e * q1, p)
    s = _log_series(z, target + extra)
    out = s.scale(Fraction(1, F.e * q1)).scale_pow(-boost)
    prec = target - extra if target - extra < F.prec else None
    return PadicElement(F, list(out.coeffs), out.den, prec)
