"""Exact constants: rational combinations of monomials in pi, log 2, zeta.

A :class:`ConstExpr` is a finite sum of monomials ``pi^a log2^b
zeta(k1)^c1 ...`` with Gaussian-rational coefficients (exact rational
real and imaginary parts).  The transcendence weight (pi and log 2 have
weight 1, zeta(k) weight k) is graded: every monomial of a nonzero
expression carries the same weight, and multiplication adds weights.
The pi exponent may be negative, so intermediate quantities like
``Omega / pi^3`` stay inside the algebra with weight bookkeeping intact.

On top of the algebra, this module provides the closed-form table of
alternating zeta values up to weight 3, the ten triangle-walk
Omega-values of weight <= 4 derived from it, and the exact area
coefficient of third order, which collapses to (9/4) zeta(3).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cdisc import CertifiedComplex, Context
from .mpl import MzvCache, MzvIndex, alternating_mzv


class UnknownIndex(KeyError):
    """The requested zeta index is outside the closed-form table."""


class WeightMismatch(ValueError):
    """Attempt to add expressions of different transcendence weights."""


def _symbol_weight(sym: str) -> int:
    if sym in ("pi", "log2"):
        return 1
    if sym == "sqrt2":
        return 0
    if sym.startswith("zeta"):
        return int(sym[4:])
    raise ValueError(f"unknown symbol {sym!r}")


_ZERO = Fraction(0)


def _coeff(re, im=0) -> tuple[Fraction, Fraction]:
    return Fraction(re), Fraction(im)


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


@dataclass(frozen=True)
class ConstExpr:
    """Sum of weight-homogeneous monomials with Gaussian-rational
    coefficients; the empty sum is zero (of indeterminate weight)."""

    terms: tuple  # sorted ((monomial, (re, im)), ...); monomial sorted tuple

    # -- constructors --------------------------------------------------
    @staticmethod
    def _build(d: dict) -> "ConstExpr":
        # fold even powers of sqrt2 into the rational coefficient
        folded: dict = {}
        for m, c in d.items():
            e = dict(m).get("sqrt2", 0)
            if e // 2 != 0:
                scale = Fraction(2) ** (e // 2)
                c = (c[0] * scale, c[1] * scale)
                m = tuple(sorted(
                    (s, k if s != "sqrt2" else e % 2) for s, k in m
                    if s != "sqrt2" or e % 2))
            a, b = folded.get(m, (_ZERO, _ZERO))
            folded[m] = (a + c[0], b + c[1])
        items = tuple(sorted(
            (m, c) for m, c in folded.items() if c != (_ZERO, _ZERO)))
        weights = {sum(_symbol_weight(s) * e for s, e in m)
                   for m, _ in items}
        if len(weights) > 1:
            raise WeightMismatch(f"mixed weights {sorted(weights)}")
        return ConstExpr(items)

    @classmethod
    def zero(cls) -> "ConstExpr":
        return cls(())

    @classmethod
    def rational(cls, re, im=0) -> "ConstExpr":
        return cls._build({(): _coeff(re, im)})

    @classmethod
    def i(cls) -> "ConstExpr":
        return cls.rational(0, 1)

    @classmethod
    def symbol(cls, name: str, exp: int = 1) -> "ConstExpr":
        _symbol_weight(name)  # validate
        if exp == 0:
            return cls.rational(1)
        return cls._build({((name, exp),): _coeff(1)})

    @classmethod
    def pi(cls, exp: int = 1) -> "ConstExpr":
        return cls.symbol("pi", exp)

    @classmethod
    def log2(cls, exp: int = 1) -> "ConstExpr":
        return cls.symbol("log2", exp)

    @classmethod
    def zeta(cls, k: int, exp: int = 1) -> "ConstExpr":
        return cls.symbol(f"zeta{k}", exp)

    @classmethod
    def sqrt2(cls, exp: int = 1) -> "ConstExpr":
        return cls.symbol("sqrt2", exp)

    # -- inspection ----------------------------------------------------
    @property
    def weight(self):
        """Common weight of the monomials; None for the zero expression."""
        if not self.terms:
            return None
        m = self.terms[0][0]
        return sum(_symbol_weight(s) * e for s, e in m)

    def coefficient(self, monomial) -> tuple[Fraction, Fraction]:
        """(re, im) coefficient of a monomial given as ((sym, exp), ...)."""
        key = tuple(sorted(monomial))
        for m, c in self.terms:
            if m == key:
                return c
        return (_ZERO, _ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def conj(self) -> "ConstExpr":
        """Complex conjugate (all basis symbols are real)."""
        return ConstExpr(tuple((m, (re, -im)) for m, (re, im) in self.terms))

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other) -> "ConstExpr":
        if isinstance(other, (int, Fraction)):
            other = ConstExpr.rational(other)
        d = {m: c for m, c in self.terms}
        for m, (re, im) in other.terms:
            a, b = d.get(m, (_ZERO, _ZERO))
            d[m] = (a + re, b + im)
        return ConstExpr._build(d)

    def __neg__(self) -> "ConstExpr":
        return ConstExpr(tuple((m, (-re, -im)) for m, (re, im) in self.terms))

    def __radd__(self, other) -> "ConstExpr":
        return self + other

    def __sub__(self, other) -> "ConstExpr":
        if isinstance(other, (int, Fraction)):
            other = ConstExpr.rational(other)
        return self + (-other)

    def __mul__(self, other) -> "ConstExpr":
        if isinstance(other, (int, Fraction)):
            c = _coeff(other)
            return ConstExpr._build(
                {m: _cmul(co, c) for m, co in self.terms})
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                e: dict = dict(m1)
                for s, k in m2:
                    e[s] = e.get(s, 0) + k
                m = tuple(sorted((s, k) for s, k in e.items() if k != 0))
                c = _cmul(c1, c2)
                a, b = d.get(m, (_ZERO, _ZERO))
                d[m] = (a + c[0], b + c[1])
        return ConstExpr._build(d)

    def __rmul__(self, other) -> "ConstExpr":
        return self * other

    def __pow__(self, n: int) -> "ConstExpr":
        if n < 0:
            raise ValueError("negative powers only via pi(exp)")
        out = ConstExpr.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, (re, im) in self.terms:
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            coef = f"({re}{'+' if im >= 0 else '-'}{abs(im)}i)"
            parts.append(f"{coef}{'*' + mono if mono else ''}")
        return " + ".join(parts)


# ----------------------------------------------------------------------
# the weight <= 3 closed-form table
# ----------------------------------------------------------------------
def _table() -> dict:
    F = Fraction
    pi2 = ConstExpr.pi(2)
    log2 = ConstExpr.log2()
    z3 = ConstExpr.zeta(3)
    t = {
        (-1,): -log2,
        (2,): pi2 * F(1, 6),
        (-2,): pi2 * F(-1, 12),
        (3,): z3,
        (-3,): z3 * F(-3, 4),
        (-1, -1): ConstExpr.log2(2) * F(1, 2) + pi2 * F(-1, 12),
        (-1, -1, -1): (ConstExpr.log2(3) * F(-1, 6)
                       + pi2 * log2 * F(1, 12) + z3 * F(-1, 4)),
        (-1, 2): pi2 * log2 * F(-1, 4) + z3,
        (2, -1): pi2 * log2 * F(1, 12) + z3 * F(-1, 4),
        (1, -2): z3 * F(1, 8),
        (1, 2): z3,
        (-1, -2): pi2 * log2 * F(1, 4) + z3 * F(-13, 8),
        (-2, -1): pi2 * log2 * F(-1, 6) + z3 * F(5, 8),
    }
    return {MzvIndex.from_signed(*k).key(): v for k, v in t.items()}


_TABLE = _table()


def closed_form(idx: MzvIndex) -> ConstExpr:
    """Exact expression for an alternating zeta value of weight <= 3."""
    try:
        return _TABLE[idx.key()]
    except KeyError:
        raise UnknownIndex(f"no closed form tabulated for zeta({idx.key()})")


def omega_closed_form(word) -> ConstExpr:
    """Exact Omega-value at endpoint 1, angle pi/4, for a valid word
    whose zeta image is in the weight <= 3 table (all words of weight
    <= 4 qualify)."""
    from .omega import OmegaWord, omega_to_mzv

    sign, idx = omega_to_mzv(OmegaWord(tuple(word)))
    if idx.entries == ():
        base = ConstExpr.rational(1)
    else:
        base = closed_form(idx)
    return ConstExpr.i() * ConstExpr.pi() * base * sign


# ----------------------------------------------------------------------
# the exact third area coefficient
# ----------------------------------------------------------------------
def alpha3_parts() -> tuple[ConstExpr, ConstExpr, ConstExpr]:
    """The three groups of the third-order coefficient formula:
    a cubic depth-2 term, a product of depth 2 with depth 3, and a
    linear combination of depth-4 values."""
    F = Fraction
    om = omega_closed_form
    o21 = om((2, 1))
    t1 = -ConstExpr.i() * ConstExpr.pi(-3) * o21 ** 3
    t2 = (ConstExpr.pi(-2) * F(1, 2) * o21 *
          (om((2, 2, 3)) - om((3, 1, 1)) * 6 - om((3, 3, 3)) * 3))
    t3 = (ConstExpr.i() * ConstExpr.pi(-1) * F(1, 2) *
          (om((2, 1, 1, 1)) * 6 + om((2, 2, 2, 1)) - om((3, 1, 2, 3))
           + om((2, 1, 3, 3)) + om((3, 3, 2, 1))))
    return t1, t2, t3


def alpha3_exact() -> ConstExpr:
    """Exact third coefficient of the area expansion: (9/4) zeta(3).

    The pi^2 log2 and log^3 2 contributions of the three parts cancel
    identically in exact arithmetic.
    """
    t1, t2, t3 = alpha3_parts()
    return t1 + t2 + t3


# ----------------------------------------------------------------------
# certified numeric image
# ----------------------------------------------------------------------
def numeric(e: ConstExpr, ctx: Context,
            cache: MzvCache | None = None) -> CertifiedComplex:
    """Certified disc containing the value of an exact expression."""
    total = ctx.zero()
    for m, (re, im) in e.terms:
        v = ctx.from_rational(re.numerator, re.denominator).add(
            ctx.i().mul(ctx.from_rational(im.numerator, im.denominator)))
        for sym, exp in m:
            if sym == "pi":
                base = ctx.pi()
            elif sym == "log2":
                base = ctx.from_int(2).log()
            elif sym == "sqrt2":
                base = ctx.from_int(2).sqrt()
            else:
                base = alternating_mzv(
                    MzvIndex.from_signed(_symbol_weight(sym)), ctx, cache)
            p = base.pow_int(abs(exp))
            v = v.mul(p) if exp > 0 else v.div(p)
        total = total.add(v)
    return total
