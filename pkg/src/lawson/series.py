"""Order-by-order Taylor coefficients of the deformation family.

The monodromy problem pins down a family of surfaces parametrized by a
small parameter t and an angle phi.  Its solution is described by three
Laurent-polynomial parameters x_1, x_2, x_3 (in the loop variable
lambda), an angle theta(t), and the conserved quantity
K(t) = x_1^2 + x_2^2 + x_3^2, a constant in lambda.  This module fills
their Taylor coefficients in t order by order:

  1. expand the period integrals: the coefficient of t^n is
     2 pi x_{j,n} plus a sum over walks on the triangle graph of
     products of earlier coefficients weighted by the walk integrals
     from the omega module (``phat_lower``);
  2. the reality constraint determines the positive-degree parts
     x_{3,n}^+ (endpoint 1) and x_{2,n}^+ (endpoint i);
  3. the closing conditions at lambda = e^{i theta(t)} determine
     theta_n and the constant terms x_{j,n}^0;
  4. euclidean division of lambda * K_lower,n by (lambda^2 - 1) yields
     x_{1,n}, and the lambda-coefficient of the remainder is K_n.

Two modes: "general" (any angle; needs walk integrals at both endpoints
1 and i) and "minimal" (phi = pi/4; theta stays pi/2, x_{2,n} =
(-1)^n x_{3,n}, only endpoint 1 is needed).  Coefficients are certified
discs by default; the minimal mode can alternatively run over the exact
constant algebra for orders <= 3, reproducing the closed forms of the
low-order coefficients.

Derived outputs: the area/Willmore coefficients alpha_k and the mean
curvature coefficients as series in s = 1/(2g + 2), obtained from the
t-series through the reparametrization s = t sqrt(K(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cdisc import Context
from .mpl import MzvCache
from .omega import PI4, OmegaWord, _phi_disc, omega_eval
from .symbolic import ConstExpr, omega_closed_form
from .wiener import LaurentPoly

__all__ = [
    "MissingLowerOrder", "InvariantViolation", "ScalarSeries",
    "ParamSeries", "build_series", "reparametrize", "area_coefficients",
    "willmore_mean_curvature_coefficients",
]


class MissingLowerOrder(RuntimeError):
    """A step was requested before the previous orders were filled."""


class InvariantViolation(AssertionError):
    """A structural invariant (degree, parity, vanishing) failed."""


#: (vertex, letter) -> (next vertex, sign); a walk of length d starting
#: at e3 contributes prod(sign) * (2i)^d times its integral
_SIGN_STEP = {
    (3, 2): (2, 1), (3, 3): (1, -1),
    (2, 1): (1, -1), (2, 2): (3, -1),
    (1, 1): (2, 1), (1, 3): (3, 1),
}

#: directed edges (from, letter, to, effective sign); the effective
#: sign folds the per-letter sign of the walk integral into the step,
#: so a walk's total weight is prod(eff) * (2i)^d * (i pi) * I(word)
#: with I the plain iterated integral of the one-forms attached to the
#: interior vertices (dz/(z-1), dz/(z+1), dz/z for vertices 1, 2, 3)
_EDGES = (
    (3, 2, 2, +1), (3, 3, 1, -1),
    (2, 1, 1, +1), (2, 2, 3, -1),
    (1, 1, 2, -1), (1, 3, 3, +1),
)


# ----------------------------------------------------------------------
# scalar rings: certified discs or exact constants
# ----------------------------------------------------------------------
class _NumericRing:
    """Certified-disc scalars at a fixed angle and working precision."""

    symbolic = False

    def __init__(self, ctx: Context, phi, cache=None):
        self.ctx = ctx
        self.phi = phi
        self.cache = cache
        ph = _phi_disc(phi, ctx)
        self.sin_phi = ph.sin()
        self.cos_phi = ph.cos()
        self.zero = ctx.zero()
        self.one = ctx.one()
        self.i = ctx.i()
        self.two_i = ctx.i().mul_int(2)
        self.two_pi = ctx.pi().mul_int(2)
        self.inv_2pi = ctx.one().div(self.two_pi)
        self.half_pi = ctx.pi().div_int(2)

    def rational(self, p, q=1):
        f = Fraction(p, q)
        return self.ctx.from_rational(f.numerator, f.denominator)

    def conj(self, c):
        return c.conj()

    def omega(self, word, endpoint):
        return omega_eval(OmegaWord(tuple(word), endpoint, self.phi),
                          self.ctx, self.cache)

    def is_negligible(self, c) -> bool:
        return c.contains_zero()


class _SymbolicRing:
    """Exact constants at phi = pi/4 (minimal mode, low orders)."""

    symbolic = True

    def __init__(self):
        self.phi = PI4
        half_sqrt2 = ConstExpr.sqrt2() * Fraction(1, 2)
        self.sin_phi = half_sqrt2
        self.cos_phi = half_sqrt2
        self.zero = ConstExpr.zero()
        self.one = ConstExpr.rational(1)
        self.i = ConstExpr.i()
        self.two_i = ConstExpr.i() * 2
        self.two_pi = ConstExpr.pi() * 2
        self.inv_2pi = ConstExpr.pi(-1) * Fraction(1, 2)
        self.half_pi = ConstExpr.pi() * Fraction(1, 2)

    def rational(self, p, q=1):
        return ConstExpr.rational(Fraction(p, q))

    def conj(self, c):
        return c.conj()

    def omega(self, word, endpoint):
        if endpoint != "1":
            raise ValueError("exact mode only covers endpoint 1")
        return omega_closed_form(word)

    def is_negligible(self, c) -> bool:
        return c.is_zero()


# ----------------------------------------------------------------------
# truncated scalar t-series helpers (plain lists of ring elements)
# ----------------------------------------------------------------------
def _ts_mul(a: list, b: list, order: int, ring) -> list:
    out = [ring.zero] * (order + 1)
    for i, ai in enumerate(a[:order + 1]):
        for j, bj in enumerate(b[:order + 1 - i]):
            out[i + j] = out[i + j] + ai * bj
    return out


def _ts_scale(a: list, c, order: int, ring) -> list:
    return [ai * c for ai in a[:order + 1]]


def _ts_add(a: list, b: list, order: int, ring) -> list:
    out = []
    for k in range(order + 1):
        ak = a[k] if k < len(a) else ring.zero
        bk = b[k] if k < len(b) else ring.zero
        out.append(ak + bk)
    return out


def _ts_exp(delta: list, order: int, ring) -> list:
    """exp of a series with zero constant term (finite exact Taylor)."""
    out = [ring.one] + [ring.zero] * order
    power = [ring.one] + [ring.zero] * order
    fact = 1
    for j in range(1, order + 1):
        power = _ts_mul(power, delta, order, ring)
        fact *= j
        out = _ts_add(out, _ts_scale(power, ring.rational(1, fact),
                                     order, ring), order, ring)
    return out


def _ts_sin(delta: list, order: int, ring) -> list:
    """sin of a series with zero constant term."""
    out = [ring.zero] * (order + 1)
    power = [ring.one] + [ring.zero] * order
    fact = 1
    for j in range(1, order + 1):
        power = _ts_mul(power, delta, order, ring)
        fact *= j
        if j % 2 == 1:
            sgn = 1 if j % 4 == 1 else -1
            out = _ts_add(out, _ts_scale(power, ring.rational(sgn, fact),
                                         order, ring), order, ring)
    return out


def _ts_cos(delta: list, order: int, ring) -> list:
    """cos of a series with zero constant term."""
    out = [ring.one] + [ring.zero] * order
    power = [ring.one] + [ring.zero] * order
    fact = 1
    for j in range(1, order + 1):
        power = _ts_mul(power, delta, order, ring)
        fact *= j
        if j % 2 == 0:
            sgn = 1 if j % 4 == 0 else -1
            out = _ts_add(out, _ts_scale(power, ring.rational(sgn, fact),
                                         order, ring), order, ring)
    return out


def _ts_inv(a: list, order: int, ring) -> list:
    """Reciprocal of a series with unit constant term."""
    out = [ring.one] + [ring.zero] * order
    for n in range(1, order + 1):
        acc = ring.zero
        for k in range(1, n + 1):
            ak = a[k] if k < len(a) else ring.zero
            acc = acc + ak * out[n - k]
        out[n] = -acc
    return out


def _ts_sqrt(a: list, order: int, ring) -> list:
    """Square root of a series with unit constant term."""
    out = [ring.one] + [ring.zero] * order
    half = ring.rational(1, 2)
    for n in range(1, order + 1):
        acc = a[n] if n < len(a) else ring.zero
        for k in range(1, n):
            acc = acc - out[k] * out[n - k]
        out[n] = acc * half
    return out


def _ts_compose(outer: list, inner: list, order: int, ring) -> list:
    """outer(inner(t)) truncated; inner must have zero constant term."""
    out = [outer[0] if outer else ring.zero] + [ring.zero] * order
    power = [ring.one] + [ring.zero] * order
    for m in range(1, min(len(outer), order + 1)):
        power = _ts_mul(power, inner, order, ring)
        out = _ts_add(out, _ts_scale(power, outer[m], order, ring),
                      order, ring)
    return out


def _star_conj(p: LaurentPoly, ring) -> LaurentPoly:
    """The reality involution: lambda -> 1/lambda with conjugated
    coefficients."""
    return LaurentPoly({-k: ring.conj(c) for k, c in p.coeffs.items()},
                       prune=False)


# ----------------------------------------------------------------------
# fast walk sums by series solutions of the transport equation
# ----------------------------------------------------------------------
class _WalkTransport:
    """Walk sums in polynomial time (minimal mode, endpoint 1).

    Grouping partial walks by their current vertex turns the sum over
    all walks into three unknown functions of the integration variable
    that satisfy a linear first-order system driven by the one-forms
    dz/(z-1), dz/(z+1), dz/z.  Solving the system by truncated power
    series about both endpoints of [0, 1] (each leg converges at rate
    1/2 towards the midpoint) and pairing prefix values with suffix
    values at z = 1/2 yields the same walk sums as the depth-first
    enumeration, but with cost polynomial in the t-order instead of
    exponential.  Truncation tails of the two legs are bounded by a
    uniform coefficient bound carried alongside the series and added to
    the certified radii.
    """

    def __init__(self, state: "ParamSeries"):
        self.state = state
        ring = state.ring
        self.ring = ring
        digits = ring.ctx.digits
        #: number of kept powers per leg; both legs are evaluated at
        #: 1/2, so the tail after K terms is below bound * 2^-K
        self.K = int(math.ceil((digits + 10) * math.log2(10))) + 40
        self._half_pow = None
        self._inv = {}
        self._cfac = {}
        self._cnorm = {}
        self._legA = {}  # m -> {"S", "aux", "E", "Eedge", "seeded", "bound"}
        self._legF = {}  # m -> {"P", "aux", "F", "bound"}
        self.i_pi = ring.i * (ring.two_pi * ring.rational(1, 2))

    # -- shared small caches -------------------------------------------
    def _halves(self):
        if self._half_pow is None:
            self._half_pow = [self.ring.rational(1, 2 ** k)
                              for k in range(self.K + 1)]
        return self._half_pow

    def _invk(self, k: int):
        v = self._inv.get(k)
        if v is None:
            v = self.ring.rational(1, k)
            self._inv[k] = v
        return v

    def _factor(self, letter: int, b: int, sgn: int) -> LaurentPoly:
        key = (letter, b, sgn)
        p = self._cfac.get(key)
        if p is None:
            c = self.ring.two_i if sgn > 0 else -self.ring.two_i
            p = self.state.x[letter][b].scale(c)
            self._cfac[key] = p
        return p

    def _factor_norm(self, letter: int, b: int) -> float:
        key = (letter, b)
        v = self._cnorm.get(key)
        if v is None:
            v = 2.0 * sum(c.abs_upper()
                          for c in self.state.x[letter][b].coeffs.values())
            self._cnorm[key] = v
        return v

    def _eval_mid(self, coeffs: list) -> LaurentPoly:
        halves = self._halves()
        out = LaurentPoly.zero()
        for k, p in enumerate(coeffs):
            if not p.is_zero():
                out = out.add(p.scale(halves[k]))
        return out

    def _tail_poly(self, m: int, bound: float) -> LaurentPoly:
        """Zero-centred discs of the leg truncation tail, spread over
        the lambda-degrees the order can populate (parity of m)."""
        tau = bound * 2.0 ** (1 - self.K)
        if tau == 0.0:
            return LaurentPoly.zero()
        disc = self.ring.ctx.make(0, tau)
        return LaurentPoly({k: disc for k in range(-m, m + 1, 2)},
                           prune=False)

    # -- prefix-type partial sums --------------------------------------
    @staticmethod
    def _aux_plain(series: list) -> list:
        """aux[k] = sum_{k' <= k-1} h_{k'} (convolution with 1/(1-z))."""
        out = [LaurentPoly.zero()]
        for k in range(1, len(series)):
            out.append(out[-1].add(series[k - 1]))
        return out

    @staticmethod
    def _aux_alternating(series: list) -> list:
        """aux[k] = sum_{k' <= k-1} (-1)^{k-1-k'} h_{k'}
        (convolution with 1/(1+z))."""
        out = [LaurentPoly.zero()]
        for k in range(1, len(series)):
            out.append(series[k - 1].sub(out[-1]))
        return out

    def _aux_geometric(self, series: list) -> list:
        """aux[k] = sum_{k' <= k-1} h_{k'} / 2^{k-k'}
        (convolution with 1/(2-w))."""
        half = self._invk(2)
        out = [LaurentPoly.zero()]
        for k in range(1, len(series)):
            out.append(out[-1].add(series[k - 1]).scale(half))
        return out

    # -- prefix leg: series about z = 0 --------------------------------
    def _seed(self, m: int, u: int) -> LaurentPoly:
        """First-step constants: the walk leaves e3 without a form."""
        if u == 2:
            return self._factor(2, m - 1, +1)
        if u == 1:
            return self._factor(3, m - 1, -1)
        return LaurentPoly.zero()

    def _legA_order(self, m: int) -> dict:
        x = self.state.x
        have_seed = len(x[2]) >= m
        ent = self._legA.get(m)
        if ent is not None and (ent["seeded"] or not have_seed):
            return ent
        K = self.K
        zero = LaurentPoly.zero()
        S = {u: [zero] * (K + 1) for u in (1, 2, 3)}
        bound = {u: 0.0 for u in (1, 2, 3)}
        if ent is None:
            lower = {mp: self._legA_order(mp) for mp in range(1, m)}
            acc = {u: [zero] * (K + 1) for u in (1, 2, 3)}
            for u_from, letter, u_to, sgn in _EDGES:
                for b in range(0, m - 1):
                    mp = m - 1 - b
                    src = lower[mp]
                    fac = self._factor(letter, b, sgn)
                    if fac.is_zero():
                        continue
                    aux = self._legA_aux(src, u_from)
                    dst = acc[u_to]
                    for k in range(1, K + 1):
                        a = aux[k]
                        if not a.is_zero():
                            dst[k] = dst[k].add(a.mul(fac))
                    bound[u_to] += (self._factor_norm(letter, b)
                                    * src["bound"][u_from])
            for u in (1, 2, 3):
                row = S[u]
                for k in range(1, K + 1):
                    p = acc[u][k]
                    if not p.is_zero():
                        row[k] = p.scale(self._invk(k))
            e_edge = {u: self._eval_mid(S[u]) for u in (1, 2, 3)}
        else:
            S = ent["S"]
            bound = ent["bound"]
            e_edge = ent["Eedge"]
        seeded = False
        E = dict(e_edge)
        if have_seed:
            seeded = True
            for u in (1, 2):
                seed = self._seed(m, u)
                if not seed.is_zero():
                    S[u][0] = seed
                    E[u] = e_edge[u].add(seed)
                    bound[u] += sum(c.abs_upper()
                                    for c in seed.coeffs.values())
            for u in (1, 2, 3):
                tail = self._tail_poly(m, bound[u])
                if not tail.is_zero():
                    E[u] = E[u].add(tail)
        ent = {"S": S, "aux": {}, "E": E, "Eedge": e_edge,
               "seeded": seeded, "bound": bound}
        self._legA[m] = ent
        return ent

    def _legA_aux(self, ent: dict, u_from: int) -> list:
        """The density of the vertex being left, convolved with its
        series: vertex 3 carries dz/z (plain coefficients), vertex 1
        carries dz/(z-1), vertex 2 carries dz/(z+1)."""
        aux = ent["aux"].get(u_from)
        if aux is None:
            series = ent["S"][u_from]
            if u_from == 3:
                aux = series
            elif u_from == 1:
                aux = [p.neg() for p in self._aux_plain(series)]
            else:
                aux = self._aux_alternating(series)
            ent["aux"][u_from] = aux
        return aux

    # -- suffix leg: series about z = 1 in w = 1 - z -------------------
    def _legF_order(self, m: int) -> dict:
        ent = self._legF.get(m)
        if ent is not None:
            return ent
        K = self.K
        zero = LaurentPoly.zero()
        ring = self.ring
        P = {u: [zero] * (K + 1) for u in (1, 2, 3)}
        bound = {u: 0.0 for u in (1, 2, 3)}
        if m == 0:
            P[1][0] = LaurentPoly.monomial(ring.one)
            bound[1] = 1.0
            ent = {"P": P, "aux": {}, "F": {1: P[1][0], 2: zero, 3: zero},
                   "bound": bound}
            self._legF[m] = ent
            return ent
        lower = {mp: self._legF_order(mp) for mp in range(m)}
        acc = {u: [zero] * (K + 1) for u in (1, 2, 3)}
        for u_from, letter, u_to, sgn in _EDGES:
            # on this leg the walk runs through its remaining steps, so
            # the transport matrix is transposed: P_{u_from} collects
            # suffixes that continue to u_to, weighted by the density
            # of the vertex being left (u_from), rewritten in w = 1 - z
            for b in range(0, m):
                mp = m - 1 - b
                src = lower[mp]
                fac = self._factor(letter, b, sgn)
                if fac.is_zero():
                    continue
                aux = self._legF_aux(src, u_to, u_from)
                dst = acc[u_from]
                for k in range(1, K + 1):
                    a = aux[k]
                    if not a.is_zero():
                        dst[k] = dst[k].add(a.mul(fac))
                bound[u_from] += (self._factor_norm(letter, b)
                                  * src["bound"][u_to])
        for u in (1, 2, 3):
            row = P[u]
            for k in range(1, K + 1):
                p = acc[u][k]
                if not p.is_zero():
                    row[k] = p.scale(self._invk(k))
        F = {}
        for u in (1, 2, 3):
            val = self._eval_mid(P[u])
            tail = self._tail_poly(m, bound[u])
            if not tail.is_zero():
                val = val.add(tail)
            F[u] = val
        ent = {"P": P, "aux": {}, "F": F, "bound": bound}
        self._legF[m] = ent
        return ent

    def _legF_aux(self, ent: dict, u_src: int, u_leaving: int) -> list:
        """Density of the vertex being left, in the w-coordinate:
        vertex 1 carries -dw/w (plain coefficients, negated), vertex 3
        carries dw/(1-w), vertex 2 carries dw/(2-w)."""
        key = (u_src, u_leaving)
        aux = ent["aux"].get(key)
        if aux is None:
            series = ent["P"][u_src]
            if u_leaving == 1:
                aux = [p.neg() for p in series]
            elif u_leaving == 3:
                aux = self._aux_plain(series)
            else:
                aux = self._aux_geometric(series)
            ent["aux"][key] = aux
        return aux

    # -- pairing -------------------------------------------------------
    def phat(self, n: int) -> LaurentPoly:
        """The t^n walk sum (endpoint 1): prefix values times suffix
        values at the midpoint, summed over the split vertex, at total
        t-order n + 1 (each step carries one power of t)."""
        total = LaurentPoly.zero()
        for m in range(1, n + 1):
            pre = self._legA_order(m)
            suf = self._legF_order(n + 1 - m)
            for u in (1, 2, 3):
                e, f = pre["E"][u], suf["F"][u]
                if not (e.is_zero() or f.is_zero()):
                    total = total.add(e.mul(f))
        # the t-order n+1 prefix enters only through complete walks
        # (empty suffix); its seed would be the not-yet-known order-n
        # parameter, which the walk sum excludes by definition
        top = self._legA_order(n + 1)
        if not top["Eedge"][1].is_zero():
            total = total.add(top["Eedge"][1])
        return total.scale(self.i_pi)


# ----------------------------------------------------------------------
# the parameter series
# ----------------------------------------------------------------------
@dataclass
class ScalarSeries:
    """Coefficients of a one-variable power series, tagged by variable."""

    coeffs: list
    var: str = "t"

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]


@dataclass
class ParamSeries:
    """State of the iterative scheme, filled up to order ``N``."""

    phi: object
    mode: str  # "general" | "minimal"
    ring: object
    N: int = 0
    x: dict = field(default_factory=dict)  # j -> [LaurentPoly per order]
    theta: list = field(default_factory=list)
    K: list = field(default_factory=list)
    engine: str = "auto"  # "auto" | "walks": how to form the walk sums
    _plower: dict = field(default_factory=dict)  # (endpoint, n) -> poly
    _omega_cache: dict = field(default_factory=dict)
    _transport: object = None

    # -- construction --------------------------------------------------
    @classmethod
    def start(cls, phi, mode: str, ring) -> "ParamSeries":
        half = ring.rational(1, 2)
        x1 = LaurentPoly({-1: ring.i * half, 1: -(ring.i * half)})
        x2 = LaurentPoly({-1: -(ring.sin_phi * half),
                          1: -(ring.sin_phi * half)})
        x3 = LaurentPoly({-1: -(ring.cos_phi * half),
                          1: -(ring.cos_phi * half)})
        return cls(phi=phi, mode=mode, ring=ring,
                   x={1: [x1], 2: [x2], 3: [x3]},
                   theta=[ring.half_pi], K=[ring.one])

    # -- walk sums -----------------------------------------------------
    def _omega(self, word, endpoint):
        key = (word, endpoint)
        v = self._omega_cache.get(key)
        if v is None:
            v = self.ring.omega(word, endpoint)
            self._omega_cache[key] = v
        return v

    def _two_i_pow(self, m: int):
        p = self.ring.one
        for _ in range(m):
            p = p * self.ring.two_i
        return p

    def phat_lower(self, n: int, endpoint: str = "1") -> LaurentPoly:
        """t^n coefficient of the lower-order walk sum of a period.

        In minimal mode (numeric ring, endpoint 1) the sum is formed by
        the polynomial-time transport solver unless ``engine`` forces
        the enumeration; otherwise by depth-first search over walks
        (:meth:`phat_lower_walks`).
        """
        cached = self._plower.get((endpoint, n))
        if cached is not None:
            return cached
        for j in (1, 2, 3):
            if len(self.x[j]) < n:  # needs orders 0 .. n-1
                raise MissingLowerOrder(f"orders < {n} not filled")
        if (self.engine != "walks" and self.mode == "minimal"
                and endpoint == "1" and not self.ring.symbolic):
            if self._transport is None:
                self._transport = _WalkTransport(self)
            total = self._transport.phat(n)
            self._plower[(endpoint, n)] = total
            return total
        return self.phat_lower_walks(n, endpoint)

    def phat_lower_walks(self, n: int, endpoint: str = "1") -> LaurentPoly:
        """The same walk sum by explicit enumeration.

        Depth-first search over walks on the triangle graph starting at
        e3 and ending at the endpoint's vertex.  Each node carries the
        truncated t-series of the running product of parameter series;
        a walk of length d >= 2 needs the product only to t-order
        n - d + 1, so the carried order shrinks with depth.  The cost
        grows exponentially with the order; the search is the reference
        implementation and stays practical through t-order ~13.
        """
        ring = self.ring
        target = 1 if endpoint == "1" else 2
        total = LaurentPoly.zero()

        def descend(vertex, word, sign, series):
            nonlocal total
            depth = len(word)
            if depth >= 2 and vertex == target:
                idx = n - depth + 1
                if idx < len(series) and not series[idx].is_zero():
                    factor = self._two_i_pow(depth) * self._omega(
                        word, endpoint)
                    if sign < 0:
                        factor = -factor
                    total = total.add(series[idx].scale(factor))
            if depth == n + 1:
                return
            order = n - depth  # t-orders the next product can still use
            for letter in (1, 2, 3):
                step = _SIGN_STEP.get((vertex, letter))
                if step is None:
                    continue
                nxt, s = step
                xs = self.x[letter]
                new = [LaurentPoly.zero() for _ in range(order + 1)]
                for a, pa in enumerate(series[:order + 1]):
                    if pa.is_zero():
                        continue
                    for b in range(min(order + 1 - a, len(xs))):
                        if not xs[b].is_zero():
                            new[a + b] = new[a + b].add(pa.mul(xs[b]))
                descend(nxt, word + (letter,), sign * s, new)

        descend(3, (), 1, [LaurentPoly.monomial(ring.one)])
        self._plower[(endpoint, n)] = total
        return total

    # -- evaluation along lambda = e^{i theta(t)} -----------------------
    def _exp_itheta(self, order: int) -> tuple[list, list]:
        """Truncated series of e^{i theta(t)} and its reciprocal.

        theta_0 = pi/2 exactly by the ansatz, so with
        delta = theta - pi/2 one has e^{i theta} = i e^{i delta}.
        """
        ring = self.ring
        delta = [ring.zero] + [
            self.theta[k] if k < len(self.theta) else ring.zero
            for k in range(1, order + 1)]
        e_pos = _ts_scale(_ts_exp(_ts_scale(delta, ring.i, order, ring),
                                  order, ring), ring.i, order, ring)
        e_neg = _ts_scale(_ts_exp(_ts_scale(delta, -ring.i, order, ring),
                                  order, ring), -ring.i, order, ring)
        return e_pos, e_neg

    def _poly_at_series(self, poly: LaurentPoly, e_pos: list, e_neg: list,
                        order: int) -> list:
        """Truncated t-series of poly(e^{i theta(t)})."""
        ring = self.ring
        out = [ring.zero] * (order + 1)
        pow_cache: dict = {0: [ring.one] + [ring.zero] * order}

        def power(k: int) -> list:
            p = pow_cache.get(k)
            if p is None:
                base = e_pos if k > 0 else e_neg
                p = _ts_mul(power(k - 1 if k > 0 else k + 1), base,
                            order, ring)
                pow_cache[k] = p
            return p

        for k, c in poly.coeffs.items():
            out = _ts_add(out, _ts_scale(power(k), c, order, ring),
                          order, ring)
        return out

    def _closing_coeff(self, n: int, j: int, endpoint: str, trig,
                       xp: LaurentPoly):
        """t^n coefficient of the closing-condition function for x_j.

        The function is  -2 pi trig cos(theta(t))
        + 2 pi sum_{k>=1} x_{j,k}(e^{i theta(t)}) t^k  (x_{j,n} entering
        only through its known positive part) + the walk sums evaluated
        at e^{i theta(t)}; its t^n coefficient involves theta only up to
        order n - 1.
        """
        ring = self.ring
        e_pos, e_neg = self._exp_itheta(n - 1)
        delta = [ring.zero] + [
            self.theta[k] if k < len(self.theta) else ring.zero
            for k in range(1, n)]
        # cos(pi/2 + delta) = -sin(delta)
        cos_theta = _ts_scale(_ts_sin(delta, n, ring), -ring.one, n, ring)
        acc = -(trig * cos_theta[n])
        for k in range(1, n):
            ser = self._poly_at_series(self.x[j][k], e_pos, e_neg, n - k)
            acc = acc + ser[n - k]
        acc = acc + xp.eval(ring.i)
        word = ring.zero
        for m in range(1, n + 1):
            pm = self.phat_lower(m, endpoint)
            if pm.is_zero():
                continue
            ser = self._poly_at_series(pm, e_pos, e_neg, n - m)
            word = word + ser[n - m]
        return acc * ring.two_pi + word

    # -- one step of the scheme ----------------------------------------
    def step(self) -> None:
        """Fill the next order n = N + 1."""
        n = self.N + 1
        ring = self.ring
        neg_inv_2pi = -ring.inv_2pi

        p_low = self.phat_lower(n, "1")
        x3p = p_low.sub(_star_conj(p_low, ring)).project("pos") \
                   .scale(neg_inv_2pi)
        if self.mode == "minimal":
            x2p = x3p if n % 2 == 0 else x3p.neg()
        else:
            q_low = self.phat_lower(n, "i")
            x2p = q_low.sub(_star_conj(q_low, ring)).project("pos") \
                       .scale(neg_inv_2pi)

        # euclidean division of lambda * K_lower,n by (lambda^2 - 1)
        two = ring.rational(2)
        k_low = self.x[2][0].mul(x2p).scale(two) \
                    .add(self.x[3][0].mul(x3p).scale(two))
        for j in (1, 2, 3):
            for k in range(1, n):
                k_low = k_low.add(self.x[j][k].mul(self.x[j][n - k]))
        lam_k_low = k_low.shift(1)
        if not lam_k_low.is_zero() and lam_k_low.min_degree() < 0:
            raise InvariantViolation("lambda K_lower has negative degrees")
        q_n, r_n = lam_k_low.divide_by_roots([1, -1])
        r0 = r_n.coeff(0, ring.zero)
        k_n = r_n.coeff(1, ring.zero)

        # closing conditions: theta_n and the constant terms
        if n % 2 == 0:
            theta_n = ring.zero
            x3_0 = ring.zero
            x2_0 = ring.zero
        elif self.mode == "minimal":
            theta_n = ring.zero
            h1 = self._closing_coeff(n, 3, "1", ring.cos_phi, x3p)
            x3_0 = h1 * neg_inv_2pi
            x2_0 = -x3_0
        else:
            h1 = self._closing_coeff(n, 3, "1", ring.cos_phi, x3p)
            h2 = self._closing_coeff(n, 2, "i", ring.sin_phi, x2p)
            half = ring.rational(1, 2)
            theta_n = (ring.sin_phi * h2 + ring.cos_phi * h1) \
                * neg_inv_2pi - r0 * half
            x3_0 = -(ring.cos_phi * theta_n) + h1 * neg_inv_2pi
            x2_0 = -(ring.sin_phi * theta_n) + h2 * neg_inv_2pi

        half_i = ring.i * ring.rational(1, 2)
        x1_n = q_n.scale(-ring.i).add(LaurentPoly.monomial(r0 * half_i))
        x3_n = x3p.add(LaurentPoly.monomial(x3_0))
        x2_n = x2p.add(LaurentPoly.monomial(x2_0))

        self.x[1].append(x1_n)
        self.x[2].append(x2_n)
        self.x[3].append(x3_n)
        self.theta.append(theta_n)
        self.K.append(k_n)
        self.N = n
        self._check_invariants(n)

    # -- invariants ----------------------------------------------------
    def _check_invariants(self, n: int) -> None:
        ring = self.ring
        for j in (1, 2, 3):
            p = self.x[j][n]
            if p.is_zero():
                continue
            if p.min_degree() < 0 or p.max_degree() > n + 1:
                raise InvariantViolation(
                    f"x[{j}][{n}] degree range {p.min_degree()}.."
                    f"{p.max_degree()} exceeds 0..{n + 1}")
            want = (n + 1) % 2
            for k, c in p.coeffs.items():
                if k % 2 != want and not ring.is_negligible(c):
                    raise InvariantViolation(
                        f"x[{j}][{n}] has a parity-violating "
                        f"lambda^{k} coefficient")
        if n % 2 == 0 and not ring.is_negligible(self.theta[n]):
            raise InvariantViolation(f"theta[{n}] nonzero at even order")
        if n % 2 == 1 and not ring.is_negligible(self.K[n]):
            raise InvariantViolation(f"K[{n}] nonzero at odd order")


# ----------------------------------------------------------------------
# public driver
# ----------------------------------------------------------------------
def build_series(phi, order: int, ctx: Context | None = None,
                 mode: str = "general", symbolic: bool = False,
                 cache: MzvCache | None = None,
                 engine: str = "auto") -> ParamSeries:
    """Fill the parameter series up to the requested t-order.

    ``symbolic=True`` runs the exact-constant ring (minimal mode only;
    supported up to order 3 by the closed-form zeta table).
    ``engine="walks"`` forces the enumerative walk sums even where the
    transport solver applies.
    """
    if mode not in ("general", "minimal"):
        raise ValueError("mode must be 'general' or 'minimal'")
    if engine not in ("auto", "walks"):
        raise ValueError("engine must be 'auto' or 'walks'")
    if mode == "minimal" and phi != PI4:
        raise ValueError("minimal mode requires phi = pi/4")
    if symbolic:
        if mode != "minimal":
            raise ValueError("the exact ring only supports minimal mode")
        ring = _SymbolicRing()
    else:
        if ctx is None:
            raise ValueError("numeric mode needs a Context")
        ring = _NumericRing(ctx, phi, cache)
    state = ParamSeries.start(phi, mode, ring)
    state.engine = engine
    for _ in range(order):
        state.step()
    return state


# ----------------------------------------------------------------------
# derived series
# ----------------------------------------------------------------------
def reparametrize(series_in_t: ScalarSeries, K: ScalarSeries,
                  ring) -> ScalarSeries:
    """Compose a t-series with the inverse of psi(t) = t sqrt(K(t)).

    K must have unit constant term; then psi is invertible order by
    order and the result is the same quantity as a series in s = psi(t).
    """
    order = len(series_in_t.coeffs) - 1
    sq = _ts_sqrt(list(K.coeffs), order, ring)
    psi = [ring.zero] + sq[:order]  # psi_k = sqrt(K)_{k-1}
    T = [ring.zero, ring.one] + [ring.zero] * max(order - 1, 0)
    for k in range(2, order + 1):
        # with T_k still zero, psi(T) misses only the T_k term at order k
        comp = _ts_compose(psi, T, k, ring)
        T[k] = -comp[k]
    out = _ts_compose(list(series_in_t.coeffs), T, order, ring)
    return ScalarSeries(out, var="s")


def _const_coeff_series(state: ParamSeries, j: int, order: int) -> list:
    ring = state.ring
    return [state.x[j][k].coeff(0, ring.zero) for k in range(order + 1)]


def area_coefficients(state: ParamSeries, order: int | None = None
                      ) -> ScalarSeries:
    """Coefficients alpha_k with  area / (8 pi) = 1 - sum_k alpha_k s^k.

    The same coefficients give the Willmore energy of the associated
    constrained-Willmore family.
    """
    ring = state.ring
    if order is None:
        order = state.N
    x2_0 = _const_coeff_series(state, 2, order)
    x3_0 = _const_coeff_series(state, 3, order)
    w = [ring.cos_phi * a - ring.sin_phi * b for a, b in zip(x2_0, x3_0)]
    inv_sqrt_k = _ts_inv(_ts_sqrt(list(state.K[:order + 1]), order, ring),
                         order, ring)
    w = _ts_mul(w, inv_sqrt_k, order, ring)
    return reparametrize(ScalarSeries(w, var="t"),
                         ScalarSeries(list(state.K[:order + 1])), ring)


def willmore_mean_curvature_coefficients(state: ParamSeries,
                                         order: int | None = None
                                         ) -> tuple[ScalarSeries,
                                                    ScalarSeries]:
    """(W, H): Willmore coefficients and mean curvature, both in s.

    W is the alpha-series of :func:`area_coefficients`; H is the series
    of cot(theta(t)) = -tan(theta(t) - pi/2) rewritten in s.
    """
    ring = state.ring
    if order is None:
        order = state.N
    W = area_coefficients(state, order)
    delta = [ring.zero] + [state.theta[k] for k in range(1, order + 1)]
    sin_d = _ts_sin(delta, order, ring)
    cos_d = _ts_cos(delta, order, ring)
    h_t = _ts_mul(_ts_scale(sin_d, -ring.one, order, ring),
                  _ts_inv(cos_d, order, ring), order, ring)
    H = reparametrize(ScalarSeries(h_t, var="t"),
                      ScalarSeries(list(state.K[:order + 1])), ring)
    return W, H
