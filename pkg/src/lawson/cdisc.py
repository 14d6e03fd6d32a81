"""Complex disc ("ball") arithmetic.

Every numeric value in the engine is a :class:`CertifiedComplex`: a
high-precision complex center together with a nonnegative double radius.
The contract is *containment*: the result disc of any operation contains
every exact value attainable from points of the operand discs, including
the rounding of the center itself.

Centers are gmpy2 (MPFR/MPC) numbers; all center arithmetic goes through
the gmpy2 context object held by :class:`Context`, so precision is an
explicit parameter and there is no hidden global state.  Radii live in
double precision and are propagated with the standard ball rules plus a
multiplicative outward inflation and a ulp term for center rounding.

A Context with ``certified=False`` keeps all radii at zero and skips the
bound computations; it is meant for optimizer inner loops only.
"""

from __future__ import annotations

import math

import gmpy2

__all__ = [
    "Context",
    "CertifiedComplex",
    "DiscError",
    "DivisorContainsZero",
    "BranchCutViolation",
    "DomainError",
]

# Multiplicative outward slack applied to every propagated radius.  One
# factor absorbs the (at most relative 2^-50) rounding of the double
# radius arithmetic itself.
_INFL = 1.0 + 2.0 ** -40


def _up(x: float) -> float:
    """Round a nonnegative double outward (toward +inf) by inflation."""
    return x * _INFL


class DiscError(ArithmeticError):
    """Base class for disc-arithmetic failures."""


class DivisorContainsZero(DiscError):
    """The divisor disc contains 0, so no containment disc exists."""


class BranchCutViolation(DiscError):
    """The operand disc meets the branch cut of the requested function."""


class DomainError(DiscError):
    """The operand disc leaves the domain of the requested function."""


class Context:
    """Explicit precision context for disc arithmetic.

    Parameters
    ----------
    digits:
        Working precision of the centers, in decimal digits (>= 20).
    certified:
        When False, radii are not tracked (all zero); results are plain
        high-precision approximations.  Acceptance-grade numbers must be
        produced with ``certified=True``.
    """

    __slots__ = ("digits", "certified", "prec", "g", "_eps", "_zero", "_one")

    def __init__(self, digits: int = 60, certified: bool = True):
        if digits < 20:
            raise ValueError("working precision must be at least 20 digits")
        self.digits = int(digits)
        self.certified = bool(certified)
        # ~3.33 bits per digit plus guard bits.
        self.prec = int(math.ceil(digits * math.log2(10))) + 20
        self.g = gmpy2.context(precision=self.prec, allow_complex=True)
        # Center rounding is bounded by one ulp of the result, i.e. a
        # relative 2^(1-prec) on each real part; 2^(3-prec) on the cheap
        # magnitude bound |re|+|im| is comfortably outward.
        self._eps = 2.0 ** (3 - self.prec)
        self._zero = gmpy2.mpc(0, precision=(self.prec, self.prec))
        self._one = gmpy2.mpc(1, precision=(self.prec, self.prec))

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    def make(self, center, radius: float = 0.0) -> "CertifiedComplex":
        """Wrap a gmpy2/number center and a radius into a disc."""
        c = self.g.add(self._zero, gmpy2.mpc(center, precision=(self.prec, self.prec)))
        return CertifiedComplex(self, c, float(radius) if self.certified else 0.0)

    def from_int(self, n: int) -> "CertifiedComplex":
        c = gmpy2.mpc(n, precision=(self.prec, self.prec))
        return CertifiedComplex(self, c, 0.0)

    def from_rational(self, p: int, q: int = 1) -> "CertifiedComplex":
        return self.from_int(p).div_int(q)

    def from_str(self, re: str, im: str = "0") -> "CertifiedComplex":
        """Exactly representable decimal strings give radius-0 discs only
        when the binary conversion is exact; otherwise one ulp is added."""
        r = gmpy2.mpfr(re, self.prec)
        i = gmpy2.mpfr(im, self.prec)
        c = gmpy2.mpc(r, i, precision=(self.prec, self.prec))
        rad = 0.0
        if self.certified:
            mag = abs(float(r)) + abs(float(i))
            rad = _up(self._eps * (mag if mag > 0.0 else 1.0))
        return CertifiedComplex(self, c, rad)

    def from_float(self, z) -> "CertifiedComplex":
        """A Python float/complex is binary-exact, so radius 0."""
        z = complex(z)
        c = gmpy2.mpc(z.real, z.imag, precision=(self.prec, self.prec))
        return CertifiedComplex(self, c, 0.0)

    def zero(self) -> "CertifiedComplex":
        return CertifiedComplex(self, self._zero, 0.0)

    def one(self) -> "CertifiedComplex":
        return CertifiedComplex(self, self._one, 0.0)

    def i(self) -> "CertifiedComplex":
        return CertifiedComplex(self, gmpy2.mpc(0, 1, precision=(self.prec, self.prec)), 0.0)

    def pi(self) -> "CertifiedComplex":
        c = gmpy2.mpc(self.g.const_pi(), precision=(self.prec, self.prec))
        return CertifiedComplex(self, c, self._ulp_of(c))

    def _ulp_of(self, c) -> float:
        if not self.certified:
            return 0.0
        mag = abs(float(c.real)) + abs(float(c.imag))
        if mag == 0.0:
            # an exactly-zero center carries no rounding error (MPFR's
            # exponent range makes underflow to zero impossible here)
            return 0.0
        if math.isinf(mag) or math.isnan(mag):
            mag = 1.0
        return _up(self._eps * mag)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Context(digits={self.digits}, certified={self.certified})"


class CertifiedComplex:
    """A complex disc ``center +- radius`` with guaranteed containment."""

    __slots__ = ("ctx", "c", "r", "_mh")

    def __init__(self, ctx: Context, center, radius: float):
        if radius < 0.0 or math.isnan(radius) or math.isinf(radius):
            raise ValueError("radius must be finite and nonnegative")
        self.ctx = ctx
        self.c = center
        self.r = radius
        self._mh = -1.0  # lazy |re|+|im| upper bound

    # ------------------------------------------------------------------
    # cheap bounds
    # ------------------------------------------------------------------
    def _mag_hi(self) -> float:
        """Upper bound for |center| as a double (|re|+|im| >= |c|)."""
        if self._mh >= 0.0:
            return self._mh
        m = abs(float(self.c.real)) + abs(float(self.c.imag))
        self._mh = _up(m) if not math.isinf(m) else math.inf
        return self._mh

    def abs_lower(self) -> float:
        """Certified lower bound for |z| over the disc (>= 0)."""
        m = float(self.ctx.g.abs(self.c)) * (1.0 - 1e-13) - self.r
        return m if m > 0.0 else 0.0

    def abs_upper(self) -> float:
        """Certified upper bound for |z| over the disc."""
        return _up(float(self.ctx.g.abs(self.c)) * (1.0 + 1e-13) + self.r)

    def disc_abs_interval(self) -> tuple[float, float]:
        """Outward-rounded interval enclosing { |z| : z in disc }."""
        return (self.abs_lower(), self.abs_upper())

    def contains_zero(self) -> bool:
        return self.abs_lower() == 0.0

    def contains(self, value) -> bool:
        """Whether a point (exactly representable input) lies in the disc.

        The test itself is performed with a small outward slack so that a
        true containment is never reported as False due to the distance
        rounding; it is meant for oracles and tests, not for proofs of
        *non*-containment.
        """
        other = value if isinstance(value, CertifiedComplex) else self.ctx.make(value)
        d = (self - other).abs_lower()
        return d <= _up(self.r + other.r) + 1e-300

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------
    def add(self, other: "CertifiedComplex") -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.add(self.c, other.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        return CertifiedComplex(ctx, c, _up(self.r + other.r + ctx._ulp_of(c)))

    def sub(self, other: "CertifiedComplex") -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.sub(self.c, other.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        return CertifiedComplex(ctx, c, _up(self.r + other.r + ctx._ulp_of(c)))

    def mul(self, other: "CertifiedComplex") -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.mul(self.c, other.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        ra, rb = self.r, other.r
        if ra == 0.0 and rb == 0.0:
            return CertifiedComplex(ctx, c, ctx._ulp_of(c))
        rad = self._mag_hi() * rb + other._mag_hi() * ra + ra * rb + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def neg(self) -> "CertifiedComplex":
        return CertifiedComplex(self.ctx, self.ctx.g.minus(self.c), self.r)

    def conj(self) -> "CertifiedComplex":
        """Complex conjugate (exact on the center)."""
        c = gmpy2.mpc(self.c.real, self.ctx.g.minus(self.c.imag),
                      precision=(self.ctx.prec, self.ctx.prec))
        return CertifiedComplex(self.ctx, c, self.r)

    def inverse(self) -> "CertifiedComplex":
        ctx = self.ctx
        lo = self.abs_lower()
        if lo == 0.0:
            raise DivisorContainsZero("disc contains zero")
        c = ctx.g.div(ctx._one, self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        # |1/z - 1/c| <= r / (|c| |z|) <= r / ((lo + r) lo)  outward.
        cabs = lo + self.r  # certified lower bound for |center|
        rad = self.r / (cabs * lo) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def div(self, other: "CertifiedComplex") -> "CertifiedComplex":
        ctx = self.ctx
        lo = other.abs_lower()
        if lo == 0.0:
            raise DivisorContainsZero("divisor disc contains zero")
        c = ctx.g.div(self.c, other.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        # a/b = a * (1/b): bound through the product rule.
        inv_hi = 1.0 / lo
        inv_rad = other.r / ((lo + other.r) * lo)
        rad = (self._mag_hi() * inv_rad + inv_hi * self.r + self.r * inv_rad
               + ctx._ulp_of(c))
        return CertifiedComplex(ctx, c, _up(rad))

    # -- integer scalings (exact scalars, cheap radius rules) -----------
    def mul_int(self, k: int) -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.mul(self.c, k)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        return CertifiedComplex(ctx, c, _up(abs(k) * self.r + ctx._ulp_of(c)))

    def div_int(self, k: int) -> "CertifiedComplex":
        if k == 0:
            raise DivisorContainsZero("division by integer zero")
        ctx = self.ctx
        c = ctx.g.div(self.c, k)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        return CertifiedComplex(ctx, c, _up(self.r / abs(k) + ctx._ulp_of(c)))

    def pow_int(self, n: int) -> "CertifiedComplex":
        """Integer power by repeated squaring (n may be negative)."""
        if n == 0:
            return self.ctx.one()
        base = self.inverse() if n < 0 else self
        n = abs(n)
        acc = None
        while n:
            if n & 1:
                acc = base if acc is None else acc.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return acc

    # ------------------------------------------------------------------
    # elementary functions (mean-value bounds: sup |f'| over the disc)
    # ------------------------------------------------------------------
    def _cut_distance_neg(self) -> float:
        """Distance from the center to the ray (-inf, 0]."""
        re = float(self.c.real)
        im = float(self.c.imag)
        if re >= 0.0:
            return math.hypot(re, im)
        return abs(im)

    def _cut_distance_pos(self) -> float:
        """Distance from the center to the ray [0, +inf)."""
        re = float(self.c.real)
        im = float(self.c.imag)
        if re <= 0.0:
            return math.hypot(re, im)
        return abs(im)

    def exp(self) -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.exp(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        if self.r == 0.0:
            return CertifiedComplex(ctx, c, ctx._ulp_of(c))
        # sup |exp| over the disc <= exp(Re c + r)
        sup = math.exp(min(float(self.c.real) + self.r, 700.0))
        return CertifiedComplex(ctx, c, _up(sup * self.r * math.exp(self.r) + ctx._ulp_of(c)))

    def log(self, cut: str = "neg") -> "CertifiedComplex":
        """Complex logarithm.

        ``cut="neg"`` is the principal branch on C \\ (-inf, 0];
        ``cut="pos"`` puts the cut on [0, +inf) instead (argument in
        (0, 2*pi)), which is the branch a few closed forms need.
        """
        ctx = self.ctx
        dist = self._cut_distance_neg() if cut == "neg" else self._cut_distance_pos()
        if ctx.certified and dist * (1.0 - 1e-13) <= self.r:
            raise BranchCutViolation("log: disc meets the branch cut / zero")
        c = ctx.g.log(self.c)
        if cut == "pos" and float(self.c.imag) < 0.0:
            two_pi_i = ctx.g.mul(gmpy2.mpc(0, 2), ctx.g.const_pi())
            c = ctx.g.add(c, two_pi_i)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        lo = self.abs_lower()
        rad = (self.r / lo if self.r else 0.0) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def sqrt(self) -> "CertifiedComplex":
        ctx = self.ctx
        if ctx.certified and self._cut_distance_neg() * (1.0 - 1e-13) <= self.r:
            raise BranchCutViolation("sqrt: disc meets the branch cut / zero")
        c = ctx.g.sqrt(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        lo = self.abs_lower()
        rad = (self.r / (2.0 * math.sqrt(lo)) if self.r else 0.0) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def _trig_deriv_sup(self) -> float:
        # |cos z|, |sin z| <= cosh(|Im z|) <= cosh(|Im c| + r)
        return math.cosh(min(abs(float(self.c.imag)) + self.r, 700.0))

    def cos(self) -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.cos(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        rad = self._trig_deriv_sup() * self.r * math.exp(self.r) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def sin(self) -> "CertifiedComplex":
        ctx = self.ctx
        c = ctx.g.sin(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        rad = self._trig_deriv_sup() * self.r * math.exp(self.r) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def arccos(self) -> "CertifiedComplex":
        ctx = self.ctx
        # domain check: stay away from the cuts (-inf,-1] and [1,+inf)
        one = ctx.one()
        w = one.sub(self.mul(self))  # 1 - z^2
        lo = w.abs_lower()
        if ctx.certified and lo == 0.0:
            raise DomainError("arccos: disc touches +-1")
        # |1 - z^2| over the disc >= |1-c^2| - (2|c|+r) r
        lo_disc = float(ctx.g.abs(w.c)) * (1.0 - 1e-13) - (2.0 * self._mag_hi() + self.r) * self.r
        if ctx.certified and lo_disc <= 0.0:
            raise DomainError("arccos: derivative unbounded on disc")
        re, im = float(self.c.real), float(self.c.imag)
        if ctx.certified and abs(im) * (1.0 - 1e-13) <= self.r and (abs(re) + self.r) >= 1.0:
            raise BranchCutViolation("arccos: disc meets the branch cut")
        c = ctx.g.acos(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        rad = (self.r / math.sqrt(lo_disc) if self.r else 0.0) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def arctan(self) -> "CertifiedComplex":
        ctx = self.ctx
        di = math.hypot(float(self.c.real), float(self.c.imag) - 1.0)
        dmi = math.hypot(float(self.c.real), float(self.c.imag) + 1.0)
        lo = (di - self.r) * (dmi - self.r)
        if ctx.certified and (di <= self.r or dmi <= self.r or lo <= 0.0):
            raise DomainError("arctan: disc touches +-i")
        re, im = float(self.c.real), float(self.c.imag)
        if ctx.certified and abs(re) * (1.0 - 1e-13) <= self.r and (abs(im) + self.r) >= 1.0:
            raise BranchCutViolation("arctan: disc meets the branch cut")
        c = ctx.g.atan(self.c)
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        rad = (self.r / lo if self.r else 0.0) + ctx._ulp_of(c)
        return CertifiedComplex(ctx, c, _up(rad))

    def abs_disc(self) -> "CertifiedComplex":
        """|z| as a real disc (the absolute-value map is 1-Lipschitz)."""
        ctx = self.ctx
        a = ctx.g.abs(self.c)
        c = gmpy2.mpc(a, precision=(ctx.prec, ctx.prec))
        if not ctx.certified:
            return CertifiedComplex(ctx, c, 0.0)
        return CertifiedComplex(ctx, c, _up(self.r + ctx._ulp_of(c)))

    def pow_real(self, s) -> "CertifiedComplex":
        """z**s for real s through exp(s log z) (principal branch)."""
        sd = s if isinstance(s, CertifiedComplex) else self.ctx.make(s)
        return self.log().mul(sd).exp()

    # ------------------------------------------------------------------
    # accessors and conveniences
    # ------------------------------------------------------------------
    def real(self) -> "CertifiedComplex":
        c = gmpy2.mpc(self.c.real, precision=(self.ctx.prec, self.ctx.prec))
        return CertifiedComplex(self.ctx, c, self.r)

    def imag(self) -> "CertifiedComplex":
        c = gmpy2.mpc(self.c.imag, precision=(self.ctx.prec, self.ctx.prec))
        return CertifiedComplex(self.ctx, c, self.r)

    def to_complex(self) -> complex:
        return complex(float(self.c.real), float(self.c.imag))

    def is_zero(self) -> bool:
        return self.r == 0.0 and self.c == 0

    def __add__(self, other):
        return self.add(self._coerce(other))

    def __radd__(self, other):
        return self._coerce(other).add(self)

    def __sub__(self, other):
        return self.sub(self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other).sub(self)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.mul_int(other)
        return self.mul(self._coerce(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, int):
            return self.div_int(other)
        return self.div(self._coerce(other))

    def __rtruediv__(self, other):
        return self._coerce(other).div(self)

    def __neg__(self):
        return self.neg()

    def __pow__(self, n):
        if not isinstance(n, int):
            return self.pow_real(n)
        return self.pow_int(n)

    def _coerce(self, other) -> "CertifiedComplex":
        if isinstance(other, CertifiedComplex):
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return self.ctx.make(other)

    def __repr__(self) -> str:
        return f"({self.c} ± {self.r:.3g})"
