"""Omega-values: iterated integrals of the triangle-graph forms.

The three 1-forms on the four-punctured sphere,

    omega_1 = ( 1/(z-p1) - 1/(z-p2) + 1/(z-p3) - 1/(z-p4) ) dz
    omega_2 = ( 1/(z-p1) - 1/(z-p2) - 1/(z-p3) + 1/(z-p4) ) dz
    omega_3 = ( 1/(z-p1) + 1/(z-p2) - 1/(z-p3) - 1/(z-p4) ) dz

with p1 = e^{i phi}, p2 = -e^{-i phi}, p3 = -e^{i phi}, p4 = e^{-i phi},
give the values Omega_{i_1..i_n}(end) = int_0^end omega_{i_1} ... omega_{i_n}
(first form innermost).  A word contributes only when it labels a walk on
the triangle graph with vertices e1, e2, e3 and edges 1: e1-e2,
2: e2-e3, 3: e1-e3, starting at e3 and ending at e1 (endpoint z=1) or at
e2 (endpoint z=i).

Two evaluation routes, both certified:

* Route A (phi = pi/4, endpoint 1): Omega_w = (-1)^{#1s} i pi
  int_0^1 eta_{f(v_1)} ... eta_{f(v_{n-1})} over the interior vertex
  trail with f(e1)=1, f(e2)=-1, f(e3)=0, i.e. a single alternating MZV.
* Route B (any phi, either endpoint): distribute the pole decomposition
  into at most 4^n iterated words over {p1..p4} and integrate each along
  the subdivided on-axis path (0, 1/3, 2/3, 1) resp. (0, i/3, 2i/3, i).

``omega_abs`` integrates |omega_{i_1}| ... |omega_{i_n}| over the
simplex; since each omega_j has constant argument on [0,1] this equals
|Omega_w(1)|.  It is computed by iterated Chebyshev quadrature of the
explicit real integrands with a padded coefficient-tail error estimate
(these feed only coarse norm constants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .cdisc import CertifiedComplex, Context
from .mpl import (
    ALPHA_OMEGA,
    IteratedWord,
    MzvCache,
    MzvIndex,
    alternating_mzv,
    evaluate_iterated_integral,
)

__all__ = [
    "OmegaWord", "InvalidWord", "is_valid_word", "vertex_trail",
    "depth1_closed_form", "depth2_closed_form", "omega_to_mzv",
    "omega_eval", "endpoint_i_reduction", "omega_abs", "valid_words",
    "PI4",
]

#: marker for the exactly-representable angle pi/4 (Route A eligible)
PI4 = "pi/4"

# triangle graph: edge label -> {vertex: opposite vertex}
_ADJ = {
    1: {(1, 2), (2, 1)},
    2: {(2, 3), (3, 2)},
    3: {(1, 3), (3, 1)},
}
_STEP = {lab: dict(pairs) for lab, pairs in _ADJ.items()}

#: signs of 1/(z - p_k) in omega_j, k = 1..4
_POLE_SIGNS = {
    1: (1, -1, 1, -1),
    2: (1, -1, -1, 1),
    3: (1, 1, -1, -1),
}

#: vertex -> pole of the corresponding eta form in the pi/4 dictionary
_VERTEX_POLE = {1: 1, 2: -1, 3: 0}


class InvalidWord(ValueError):
    """The index word does not label a walk of the required shape."""


@dataclass(frozen=True)
class OmegaWord:
    """An Omega-value index: word over {1,2,3}, endpoint, angle.

    ``endpoint`` is "1" (z = 1) or "i" (z = i); ``phi`` is a float in
    (0, pi/2) or the marker PI4 for the exact angle pi/4.
    """

    word: tuple
    endpoint: str = "1"
    phi: object = PI4

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(i) for i in self.word))
        if any(i not in (1, 2, 3) for i in self.word):
            raise ValueError("word letters must be in {1,2,3}")
        if self.endpoint not in ("1", "i"):
            raise ValueError("endpoint must be '1' or 'i'")
        if self.phi != PI4 and not 0.0 < float(self.phi) < math.pi / 2:
            raise ValueError("phi must lie in (0, pi/2)")

    def phi_float(self) -> float:
        return math.pi / 4 if self.phi == PI4 else float(self.phi)

    def target_vertex(self) -> int:
        return 1 if self.endpoint == "1" else 2


def vertex_trail(word) -> list | None:
    """Vertices e3 = v0, v1, ..., v_n of the walk, or None if invalid."""
    v = 3
    trail = [3]
    for lab in word:
        v = _STEP[lab].get(v)
        if v is None:
            return None
        trail.append(v)
    return trail


def is_valid_word(w: OmegaWord) -> tuple[bool, list | None]:
    """Whether the word walks e3 -> target vertex; returns the trail."""
    trail = vertex_trail(w.word)
    if trail is None or trail[-1] != w.target_vertex():
        return False, trail
    return True, trail


def valid_words(n: int, endpoint: str = "1"):
    """All valid words of length n for the given endpoint (DFS order)."""
    target = 1 if endpoint == "1" else 2
    out = []

    def go(v, prefix):
        if len(prefix) == n:
            if v == target:
                out.append(tuple(prefix))
            return
        for lab in (1, 2, 3):
            nxt = _STEP[lab].get(v)
            if nxt is not None:
                prefix.append(lab)
                go(nxt, prefix)
                prefix.pop()

    go(3, [])
    return out


# ----------------------------------------------------------------------
# closed forms at depth <= 2
# ----------------------------------------------------------------------
def _phi_disc(phi, ctx: Context) -> CertifiedComplex:
    if phi == PI4:
        return ctx.pi().div_int(4)
    return ctx.from_float(float(phi))


def depth1_closed_form(j: int, endpoint: str, phi, ctx: Context
                       ) -> CertifiedComplex:
    """The six depth-1 values.

    At z=1: Omega_1 = i(pi - 2 phi), Omega_2 = log((1-cos)/(1+cos)),
    Omega_3 = i pi.  At z=i: Omega_1 = -2 i phi, Omega_2 = -i pi,
    Omega_3 = log((1-sin)/(1+sin)).
    """
    ph = _phi_disc(phi, ctx)
    ipi = ctx.i().mul(ctx.pi())
    if endpoint == "1":
        if j == 1:
            return ctx.i().mul(ctx.pi().sub(ph.mul_int(2)))
        if j == 2:
            c = ph.cos()
            return (ctx.one().sub(c)).div(ctx.one().add(c)).log()
        return ipi
    if j == 1:
        return ctx.i().mul(ph).mul_int(-2)
    if j == 2:
        return ipi.neg()
    s = ph.sin()
    return (ctx.one().sub(s)).div(ctx.one().add(s)).log()


def depth2_closed_form(which: str, phi, ctx: Context) -> CertifiedComplex:
    """'21@1': Omega_{2,1}(1) = 2 pi i log sin phi;
    '31@i': Omega_{3,1}(i) = -2 pi i log cos phi."""
    ph = _phi_disc(phi, ctx)
    two_pi_i = ctx.i().mul(ctx.pi()).mul_int(2)
    if which == "21@1":
        return two_pi_i.mul(ph.sin().log())
    if which == "31@i":
        return two_pi_i.mul(ph.cos().log()).neg()
    raise ValueError(f"unknown depth-2 form {which!r}")


# ----------------------------------------------------------------------
# Route A: the pi/4 dictionary
# ----------------------------------------------------------------------
def omega_to_mzv(w: OmegaWord) -> tuple[int, MzvIndex]:
    """(sign, idx) with Omega_w(1) = sign * i*pi * zeta(idx) at phi=pi/4.

    The interior vertex trail maps to an integral word via
    f(e1)=1, f(e2)=-1, f(e3)=0; the word converts to a zeta index by
    grouping each nonzero pole with its run of eta_0's, and the sign is
    (-1)^{#letters equal to 1} * (-1)^depth.
    """
    if w.endpoint != "1" or w.phi != PI4:
        raise InvalidWord("the MZV dictionary applies at phi=pi/4, endpoint 1")
    ok, trail = is_valid_word(w)
    if not ok:
        raise InvalidWord(f"word {w.word} is not a walk e3 -> e1")
    interior = [_VERTEX_POLE[v] for v in trail[1:-1]]
    groups: list = []  # [delta_j, n_j]
    for pole in interior:
        if pole == 0:
            groups[-1][1] += 1
        else:
            groups.append([pole, 1])
    d = len(groups)
    entries = []
    for j, (delta, n) in enumerate(groups):
        nxt = groups[j + 1][0] if j + 1 < d else 1
        entries.append((n, delta * nxt))
    sign = (-1) ** sum(1 for i in w.word if i == 1) * (-1) ** d
    return sign, MzvIndex(tuple(entries))


def endpoint_i_reduction(w: OmegaWord) -> tuple[int, OmegaWord]:
    """(sign, w') with Omega_w(i)(phi) = sign * Omega_{w'}(1)(pi/2 - phi).

    The rotation z -> iz maps letters 1 -> 1 (sign -1), 2 -> 3
    (sign -1), 3 -> 2 (sign +1); the total sign is the product.
    """
    if w.endpoint != "i":
        raise InvalidWord("reduction applies to endpoint-i words")
    ok, _ = is_valid_word(w)
    if not ok:
        raise InvalidWord(f"word {w.word} is not a walk e3 -> e2")
    mapping = {1: (1, -1), 2: (3, -1), 3: (2, 1)}
    sign = 1
    new_word = []
    for lab in w.word:
        nl, s = mapping[lab]
        new_word.append(nl)
        sign *= s
    phi = PI4 if w.phi == PI4 else math.pi / 2 - float(w.phi)
    return sign, OmegaWord(tuple(new_word), "1", phi)


# ----------------------------------------------------------------------
# generic evaluation
# ----------------------------------------------------------------------
_EVAL_MEMO: dict = {}


def omega_eval(w: OmegaWord, ctx: Context,
               cache: MzvCache | None = None,
               route: str = "auto") -> CertifiedComplex:
    """Certified Omega_w at the word's endpoint and angle.

    Route "A" (single alternating MZV) applies when phi = pi/4, the
    endpoint is 1 and the word is a walk on the triangle graph; route
    "B" (pole-decomposition into iterated words) always applies.  The
    default "auto" picks A when available, B otherwise.
    """
    # the integral exists for any word; graph validity only decides
    # whether the matrix product (M_{i_1}..M_{i_n})_{31} is nonzero
    a_ok = w.endpoint == "1" and w.phi == PI4 and is_valid_word(w)[0]
    if route == "A" and not a_ok:
        raise InvalidWord(
            "route A needs endpoint 1, phi = pi/4 and a valid word")
    use_a = a_ok if route == "auto" else route == "A"
    memo_key = (w.word, w.endpoint, w.phi, ctx.digits, use_a)
    hit = _EVAL_MEMO.get(memo_key)
    if hit is not None:
        return hit
    if use_a:
        sign, idx = omega_to_mzv(w)
        val = ctx.i().mul(ctx.pi()).mul(alternating_mzv(idx, ctx, cache))
        if sign < 0:
            val = val.neg()
    else:
        val = _route_b(w, ctx)
    _EVAL_MEMO[memo_key] = val
    return val


def _route_b(w: OmegaWord, ctx: Context) -> CertifiedComplex:
    ph = _phi_disc(w.phi, ctx)
    c, s = ph.cos(), ph.sin()
    i = ctx.i()
    poles = (
        c.add(i.mul(s)),          # p1 = e^{i phi}
        c.neg().add(i.mul(s)),    # p2 = -e^{-i phi}
        c.neg().sub(i.mul(s)),    # p3 = -e^{i phi}
        c.sub(i.mul(s)),          # p4 = e^{-i phi}
    )
    # distribute the product of 4-term sums; aggregate repeated words
    terms: dict = {(): 1}
    for lab in w.word:
        signs = _POLE_SIGNS[lab]
        new: dict = {}
        for key, coeff in terms.items():
            for k in range(4):
                kk = key + (k,)
                new[kk] = new.get(kk, 0) + coeff * signs[k]
        terms = {k: v for k, v in new.items() if v != 0}
    if w.endpoint == "1":
        path = (ctx.zero(), ctx.from_rational(1, 3),
                ctx.from_rational(2, 3), ctx.one())
        q = ctx.one()
    else:
        third = i.div_int(3)
        path = (ctx.zero(), third, third.mul_int(2), i)
        q = i
    total = ctx.zero()
    for key, coeff in terms.items():
        word = IteratedWord(
            poles=tuple(poles[k] for k in key),
            p=ctx.zero(), q=q, path=path,
            labels=tuple((k, w.phi) for k in key))
        val = evaluate_iterated_integral(word, alpha_max=ALPHA_OMEGA)
        total = total.add(val.mul_int(coeff))
    return total


# ----------------------------------------------------------------------
# absolute values |Omega_w(1)| by iterated quadrature
# ----------------------------------------------------------------------
def _abs_form(j: int, t: np.ndarray, phi: float) -> np.ndarray:
    """|omega_j(t)| / dt for t in [0,1]; all three have constant argument."""
    den = t ** 4 - 2.0 * math.cos(2 * phi) * t ** 2 + 1.0
    if j == 1:
        return 4.0 * math.sin(2 * phi) * t / den
    if j == 2:
        return 4.0 * math.cos(phi) * (1.0 - t ** 2) / den
    return 4.0 * math.sin(phi) * (1.0 + t ** 2) / den


def omega_abs(word, phi, degree: int = 200) -> tuple[float, float]:
    """Interval for int_{0<=t_1<=..<=t_n<=1} prod |omega_{i_j}(t_j)|.

    Requires the word to label a walk starting at e3 (any end vertex).
    Iterated Clenshaw-Curtis: represent each partial integral
    F_k(t) = int_0^t |omega_{i_k}| F_{k-1} by a Chebyshev series; the
    enclosure is padded by the (geometrically decaying) coefficient
    tail.  Coarse by design: these feed the norm constants only.
    """
    word = tuple(int(i) for i in word)
    if any(i not in (1, 2, 3) for i in word):
        raise InvalidWord(f"{word} has letters outside {{1,2,3}}")
    phi = math.pi / 4 if phi == PI4 else float(phi)
    # Chebyshev points on [-1,1], mapped to t in [0,1]
    x = np.cos(np.pi * np.arange(degree + 1) / degree)
    t = (x + 1.0) / 2.0
    F = np.ones_like(t)
    pad = 0.0
    val = 1.0
    # prior error in F is amplified by at most int_0^1 |omega_j| at each
    # later step; bound that by the crude sup below
    amp = 4.0 * (1.0 + 1.0 / math.sin(2 * phi))
    for lab in word:
        g = _abs_form(lab, t, phi) * F
        coeffs = _cheb.chebfit(x, g, degree)
        tail = float(np.abs(coeffs[-8:]).sum())
        anti = _cheb.chebint(coeffs, lbnd=-1.0) * 0.5  # dt = dx/2
        F = _cheb.chebval(x, anti)
        val = float(_cheb.chebval(1.0, anti))
        pad = pad * amp + tail + 1e-13 * float(np.max(np.abs(F)))
    pad = pad * 50.0 + 1e-10 * max(1.0, abs(val))
    return (val - pad, val + pad)
