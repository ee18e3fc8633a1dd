"""Symbolic periods: Laurent polynomials in t over Q with log symbols.

Symbols
  l[name]     log[gamma] for the chosen root system gamma of q (per system, not per q)
  u_st        log[p-flat], the semistable period (the base uniformizer is p)
  logK[name]  the constant log_K of the unit part of q
  free names  undetermined scalars (lambda, c1, <w3,x>, ...)

Structure maps
  galois  t -> chi t, l[q] -> l[q] + eta_q t, u_st -> u_st + eta_p t
  phi     t -> p t, l[q] -> p l[q], u_st -> p u_st, constants fixed
  N       derivation with N(t) = 0, N(l[q]) = v(q), N(u_st) = 1
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .padic import PadicError, log_K, make_base_field, split_fraction


class SymbolError(PadicError):
    pass


@dataclass(frozen=True)
class SymbolInfo:
    kind: str  # "l" | "u" | "logK" | "free"
    q: Fraction | None = None
    p: int | None = None

    def valuation(self) -> int:
        return split_fraction(self.q, self.p)[0]

    def unit_part(self) -> Fraction:
        _, a, b = split_fraction(self.q, self.p)
        return Fraction(a, b)

    def log_vanishes(self) -> bool:
        """log_K of the unit part is 0 exactly when it is a root of unity in Q_p."""
        u = self.unit_part()
        return u == 1 or u == -1


# a monomial: (t-power, ((symbol, exponent), ...)) with symbols sorted
Mono = tuple


def _mono_key(m: Mono):
    tpow, syms = m
    return (sum(e for _, e in syms), syms, -tpow)


class SymbolicPeriod:
    __slots__ = ("terms", "table")

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None,
                 table: Mapping[str, SymbolInfo] | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}
        self.table = dict(table or {})

    # -- constructors ----------------------------------------------------------
    @classmethod
    def const(cls, c) -> "SymbolicPeriod":
        return cls({(0, ()): Fraction(c)})

    @classmethod
    def t(cls, power: int = 1) -> "SymbolicPeriod":
        return cls({(power, ()): Fraction(1)})

    @classmethod
    def symbol(cls, name: str, info: SymbolInfo) -> "SymbolicPeriod":
        return cls({(0, ((name, 1),)): Fraction(1)}, {name: info})

    # -- ring structure ------------------------------------------------------------
    def _merge(self, other: "SymbolicPeriod") -> dict:
        table = dict(self.table)
        for k, v in other.table.items():
            if k in table and table[k] != v:
                raise SymbolError(f"symbol {k} declared twice with different data")
            table[k] = v
        return table

    @staticmethod
    def _lift(x) -> "SymbolicPeriod":
        if isinstance(x, SymbolicPeriod):
            return x
        if isinstance(x, (int, Fraction)):
            return SymbolicPeriod.const(x)
        raise TypeError(f"cannot use {type(x).__name__} as a symbolic period")

    def __add__(self, other) -> "SymbolicPeriod":
        other = self._lift(other)
        table = self._merge(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + v
        return SymbolicPeriod(terms, table)

    __radd__ = __add__

    def __neg__(self) -> "SymbolicPeriod":
        return SymbolicPeriod({k: -v for k, v in self.terms.items()}, self.table)

    def __sub__(self, other) -> "SymbolicPeriod":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "SymbolicPeriod":
        return self._lift(other) - self

    def __mul__(self, other) -> "SymbolicPeriod":
        other = self._lift(other)
        table = self._merge(other)
        terms: dict = {}
        for (ta, sa), ca in self.terms.items():
            for (tb, sb), cb in other.terms.items():
                k = (ta + tb, _mul_syms(sa, sb))
                terms[k] = terms.get(k, Fraction(0)) + ca * cb
        return SymbolicPeriod(terms, table)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SymbolicPeriod":
        if n < 0:
            if len(self.terms) != 1:
                raise SymbolError("only monomials are inverted")
            (tp, syms), c = next(iter(self.terms.items()))
            if syms:
                raise SymbolError("log symbols are not invertible")
            return SymbolicPeriod({(-tp * -n, ()): (1 / c) ** (-n)}, self.table)
        out = SymbolicPeriod.const(1)
        out.table = dict(self.table)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other) -> "SymbolicPeriod":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._lift(other) ** -1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymbolicPeriod.const(other)
        if not isinstance(other, SymbolicPeriod):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: repr(kv[0]))))

    def is_zero(self) -> bool:
        return not self.terms

    def symbols(self) -> set[str]:
        return {s for (_, syms) in self.terms for s, _ in syms}

    def min_tpow(self) -> int:
        return min((tp for tp, _ in self.terms), default=0)

    # -- serialization --------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_mono_key):
            c = self.terms[mono]
            tp, syms = mono
            factors = [s if e == 1 else f"{s}^{e}" for s, e in syms]
            if tp == 1:
                factors.append("t")
            elif tp:
                factors.append(f"t^{tp}")
            body = "*".join(factors)
            mag = abs(c)
            if not body:
                body = str(mag)
            elif mag != 1:
                body = f"{mag}*{body}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__


def _mul_syms(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in d.items() if e))


# ---------------------------------------------------------------------------
# declared symbols


def t_sym(power: int = 1) -> SymbolicPeriod:
    return SymbolicPeriod.t(power)


def const(c) -> SymbolicPeriod:
    return SymbolicPeriod.const(c)


def ell(name: str, q, p: int) -> SymbolicPeriod:
    """l[name] = log of the chosen root system of q."""
    q = Fraction(q)
    if q == 0:
        raise SymbolError("q must be nonzero")
    return SymbolicPeriod.symbol(f"l[{name}]", SymbolInfo("l", q, p))


def u_st(p: int) -> SymbolicPeriod:
    return SymbolicPeriod.symbol("u_st", SymbolInfo("u", Fraction(p), p))


def log_const(name: str, q, p: int) -> SymbolicPeriod:
    """logK[name]; identically 0 when the unit part of q is +-1."""
    info = SymbolInfo("logK", Fraction(q), p)
    if info.log_vanishes():
        return SymbolicPeriod()
    return SymbolicPeriod.symbol(f"logK[{name}]", info)


def free(name: str) -> SymbolicPeriod:
    return SymbolicPeriod.symbol(name, SymbolInfo("free"))


# ---------------------------------------------------------------------------
# structure maps


def _substitute(x: SymbolicPeriod, images: dict[str, SymbolicPeriod], timage: SymbolicPeriod | None) -> SymbolicPeriod:
    """Ring substitution of symbols (and of t, for nonnegative and negative powers)."""
    out = SymbolicPeriod(table=x.table)
    cache: dict = {}

    def pw(base: SymbolicPeriod, key, e: int) -> SymbolicPeriod:
        if (key, e) not in cache:
            cache[(key, e)] = base ** e
        return cache[(key, e)]

    for (tp, syms), c in x.terms.items():
        term = SymbolicPeriod.const(c)
        if tp:
            term = term * (pw(timage, "t", tp) if timage is not None else SymbolicPeriod.t(tp))
        for s, e in syms:
            if s in images:
                term = term * pw(images[s], s, e)
            else:
                term = term * SymbolicPeriod({(0, ((s, e),)): Fraction(1)}, {s: x.table[s]})
        out = out + term
    return out


def galois_act(sigma, x: SymbolicPeriod) -> SymbolicPeriod:
    """t -> chi t, l[q] -> l[q] + eta_q t, u_st -> u_st + eta_p t."""
    images = {}
    for s in x.symbols():
        info = x.table[s]
        base = SymbolicPeriod.symbol(s, info)
        if info.kind == "l":
            images[s] = base + SymbolicPeriod.t() * sigma.eta(info.q)
        elif info.kind == "u":
            images[s] = base + SymbolicPeriod.t() * sigma.eta(sigma.p)
    return _substitute(x, images, SymbolicPeriod.t() * sigma.chi())


def _prime_of(x: SymbolicPeriod, p: int | None) -> int:
    if p is not None:
        return p
    for info in x.table.values():
        if info.p is not None:
            return info.p
    raise SymbolError("p cannot be read off this expression; pass it explicitly")


def frobenius(x: SymbolicPeriod, p: int | None = None) -> SymbolicPeriod:
    """phi: each monomial scales by p^(t-power + number of log symbols)."""
    out = {}
    for (tp, syms), c in x.terms.items():
        deg = tp + sum(e for s, e in syms if x.table[s].kind in ("l", "u"))
        out[(tp, syms)] = c * Fraction(_prime_of(x, p)) ** deg if deg else c
    return SymbolicPeriod(out, x.table)


def monodromy(x: SymbolicPeriod) -> SymbolicPeriod:
    """Derivation with N(l[q]) = v(q), N(u_st) = 1, N(t) = N(constants) = 0."""
    out = SymbolicPeriod(table=x.table)
    for (tp, syms), c in x.terms.items():
        for i, (s, e) in enumerate(syms):
            info = x.table[s]
            if info.kind == "l":
                d = Fraction(info.valuation())
            elif info.kind == "u":
                d = Fraction(1)
            else:
                continue
            if not d:
                continue
            rest = list(syms)
            if e == 1:
                rest.pop(i)
            else:
                rest[i] = (s, e - 1)
            out = out + SymbolicPeriod({(tp, tuple(rest)): c * e * d}, x.table)
    return out


def _tilde(x: SymbolicPeriod) -> SymbolicPeriod:
    """Rewrite l[q] = logK[q] + (l[q] - logK[q]) with the bracket named ~l[q]."""
    images = {}
    for s in x.symbols():
        info = x.table[s]
        if info.kind == "l" and not info.log_vanishes():
            tname = "~" + s
            images[s] = (SymbolicPeriod.symbol(tname, SymbolInfo("tilde", info.q, info.p))
                         + SymbolicPeriod.symbol("logK[" + s[2:-1] + "]", SymbolInfo("logK", info.q, info.p)))
    return _substitute(x, images, None)


def fil_sym(x: SymbolicPeriod) -> int | None:
    """Filtration degree: t-power plus the degree in the F^1 symbols (None for 0)."""
    y = _tilde(x)
    best = None
    for (tp, syms), _ in y.terms.items():
        f = tp
        for s, e in syms:
            info = y.table[s]
            if info.kind in ("tilde", "u") or (info.kind == "l" and info.log_vanishes()):
                f += e
        best = f if best is None else min(best, f)
    return best


def theta_sym(x: SymbolicPeriod, p: int | None = None, prec: int = 20):
    """theta: t, u_st -> 0, l[q] -> log_K(unit part of q), logK[q] -> the same number."""
    F = make_base_field(_prime_of(x, p), prec=prec)
    total = F.zero()
    for (tp, syms), c in x.terms.items():
        if tp < 0:
            raise SymbolError("theta of an expression with a pole in t")
        if tp > 0:
            continue
        val = F.from_fraction(c)
        for s, e in syms:
            info = x.table[s]
            if info.kind == "u":
                val = F.zero()
                break
            if info.kind in ("l", "logK"):
                val = val * log_K(F.from_fraction(info.unit_part())) ** e
            else:
                raise SymbolError(f"free symbol {s} has no value")
        total = total + val
    return total


def evaluate(x: SymbolicPeriod, ctx, N: int | None = None):
    """Substitute concrete B_dR values; poles in t are divided out when fil allows."""
    from .bdr import BdRElement
    N = ctx.N if N is None else N
    k = max(0, -x.min_tpow())
    M = N + k
    F = ctx.field
    total = BdRElement((F.zero(),) * M)
    t = ctx.t_element(M)
    tpows: dict[int, BdRElement] = {}
    for (tp, syms), c in x.terms.items():
        e = tp + k
        if e not in tpows:
            tpows[e] = t ** e
        term = tpows[e] * c
        for s, ex in syms:
            info = x.table[s]
            if info.kind == "l":
                val = ctx.log_general(ctx.tower.root_system(info.q), M)
            elif info.kind == "u":
                val = ctx.log_pi(M)
            elif info.kind == "logK":
                val = ctx.const(log_K(F.from_fraction(info.unit_part())), M)
            else:
                raise SymbolError(f"free symbol {s} has no concrete value")
            term = term * val ** ex
        total = total + term
    for _ in range(k):
        if not total.is_zero_at(0):
            raise SymbolError("pole in t is not compensated by the filtration")
        total = total.div_fil(t)
    return total


def canonical(x: SymbolicPeriod) -> str:
    return str(x)


def matrix_str(rows: Iterable[Iterable[SymbolicPeriod]]) -> str:
    return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in rows) + "]"
