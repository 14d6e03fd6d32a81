"""Certified multiple polylogarithms and iterated integrals.

The evaluation pipeline, bottom to top:

* ``truncated_mpl`` — the O(N d) vector recursion for the truncated
  multiple polylogarithm  Li_{N; a_1..a_d}(x_1..x_d)
  = sum_{0 < n_1 < ... < n_d <= N} prod x_j^{n_j} / n_j^{a_j}.
* ``tail_bound`` — for geometrically convergent arguments (all partial
  products delta_j = x_j x_{j+1} ... x_d bounded by alpha < 1) the
  truncation error is at most
  alpha^N sum_{i=1}^d N^{i-1} / N^{a_i+..+a_d} (alpha/(1-alpha))^{d-i+1}.
* ``evaluate_iterated_integral`` — a word of simple-pole forms
  eta_y(t) = dt/(t - y) integrated along a piecewise-linear path, by
  path composition (Chen's formula), automatic subdivision until every
  leg converges at rate <= alpha_max, path reversal when the endpoint is
  itself a pole, and per-leg reduction to truncated MPLs through the
  affine normalization b_i = (y_i - p)/(q - p) and the dictionary
  Li_{a}(x) = (-1)^d int_0^1 eta_{1/delta_1} eta_0^{a_1-1} ...
* ``alternating_mzv`` — zeta(n_1..n_d; eps_1..eps_d)
  = sum_{0<k_1<...<k_d} prod eps_j^{k_j} / k_j^{n_j}, evaluated through
  its integral word on the split path 0 -> 1/2 -> 1 (the final leg
  reversed, since 1 is a pole), memoized in-process and optionally on
  disk.
"""

from __future__ import annotations

import base64
import math
import os
import threading
from dataclasses import dataclass

import gmpy2

from .cdisc import CertifiedComplex, Context

__all__ = [
    "MzvIndex", "IteratedWord", "MplArgs", "MzvCache",
    "truncated_mpl", "tail_bound", "choose_truncation", "convergence_rate",
    "evaluate_iterated_integral", "alternating_mzv", "mzv_naive_sum",
    "MplError", "AlphaOutOfRange", "DivergentIndex", "PoleOnPath",
    "NonIntegrableEndpoint",
    "ALPHA_MZV", "ALPHA_OMEGA", "default_cache_dir",
]

#: default geometric-rate targets: 1/2 for zeta values (split at 1/2),
#: 0.55 for the on-axis Omega-value routes.
ALPHA_MZV = 0.5
ALPHA_OMEGA = 0.55

CACHE_ENV_VAR = "LAWSON_CACHE_DIR"


class MplError(ArithmeticError):
    """Base class for polylogarithm-evaluation failures."""


class AlphaOutOfRange(MplError):
    """The geometric rate alpha is not in (0, 1)."""


class DivergentIndex(MplError):
    """The requested zeta index has (n_d, eps_d) = (1, +1)."""


class PoleOnPath(MplError):
    """A pole of the integrand lies on the integration polyline."""


class NonIntegrableEndpoint(MplError):
    """The first (last) form has its pole at the start (end) point."""


# ----------------------------------------------------------------------
# index and word types
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class MzvIndex:
    """An alternating zeta index: entries (n_j, eps_j) with eps_j = +-1.

    The value is sum over 0 < k_1 < ... < k_d of
    prod_j eps_j^{k_j} / k_j^{n_j}; it converges iff the outermost entry
    (n_d, eps_d) differs from (1, +1).
    """

    entries: tuple

    def __post_init__(self):
        es = tuple((int(n), int(e)) for n, e in self.entries)
        for n, e in es:
            if n < 1 or e not in (-1, 1):
                raise ValueError(f"bad index entry {(n, e)}")
        object.__setattr__(self, "entries", es)

    @classmethod
    def from_signed(cls, *signed: int) -> "MzvIndex":
        """Build from signed integers: -n means (n, -1), n means (n, +1)."""
        return cls(tuple((abs(s), 1 if s > 0 else -1) for s in signed))

    @property
    def depth(self) -> int:
        return len(self.entries)

    @property
    def weight(self) -> int:
        return sum(n for n, _ in self.entries)

    @property
    def convergent(self) -> bool:
        return self.depth == 0 or self.entries[-1] != (1, 1)

    def key(self) -> str:
        """Canonical cache key, e.g. zeta(bar1, 2) -> '-1,2'."""
        return ",".join(str(n * e) for n, e in self.entries)

    def integral_word(self) -> list:
        """Poles of the integral representation over the path 0 -> 1.

        zeta(n; eps) = (-1)^d int_0^1 eta_{d_1} eta_0^{n_1-1} ...
        eta_{d_d} eta_0^{n_d-1} with d_j = eps_j eps_{j+1} ... eps_d;
        the first form is the innermost one (at the start point 0).
        """
        deltas = []
        acc = 1
        for _, e in reversed(self.entries):
            acc *= e
            deltas.append(acc)
        deltas.reverse()
        poles: list = []
        for (n, _), dj in zip(self.entries, deltas):
            poles.append(dj)
            poles.extend([0] * (n - 1))
        return poles

    def __repr__(self) -> str:
        return f"MzvIndex({self.key()})"


@dataclass(frozen=True)
class IteratedWord:
    """A word of forms eta_{y_i} with endpoints and optional waypoints.

    ``poles`` are CertifiedComplex; ``path`` (when given) must start at
    ``p`` and end at ``q``.  Convention: the first form is the innermost
    one, attached to the start point ``p``.

    ``labels``, when given, are hashable identifiers for the poles (one
    per form, equal labels meaning equal pole values); they enable the
    process-wide memo of per-leg integrals, which is what makes large
    families of words sharing contiguous subwords affordable.
    """

    poles: tuple
    p: CertifiedComplex
    q: CertifiedComplex
    path: tuple | None = None
    labels: tuple | None = None

    def waypoints(self) -> tuple:
        return self.path if self.path is not None else (self.p, self.q)


@dataclass(frozen=True)
class MplArgs:
    """Geometrically convergent MPL arguments with certificate alpha.

    ``indices`` are the a_j >= 1; ``args`` the x_j as CertifiedComplex.
    ``alpha`` is an upper bound for max_j |delta_j|, delta_j =
    prod_{i>=j} x_i, and must be < 1.
    """

    indices: tuple
    args: tuple
    alpha: float

    @classmethod
    def build(cls, indices, args) -> "MplArgs":
        indices = tuple(int(a) for a in indices)
        args = tuple(args)
        if len(indices) != len(args):
            raise ValueError("indices/arguments length mismatch")
        if any(a < 1 for a in indices):
            raise ValueError("MPL indices must be >= 1")
        alpha = 0.0
        delta_hi = 1.0
        for x in reversed(args):
            delta_hi *= x.abs_upper()
            alpha = max(alpha, delta_hi)
        if not alpha < 1.0:
            raise AlphaOutOfRange(f"|delta_j| reaches {alpha} >= 1")
        return cls(indices, args, alpha)

    @property
    def depth(self) -> int:
        return len(self.indices)


# ----------------------------------------------------------------------
# truncated MPLs and tails
# ----------------------------------------------------------------------
def truncated_mpl(args: MplArgs, N: int) -> CertifiedComplex:
    """Li_{N; a}(x) by the O(N d) vector recursion.

    v_r accumulates Li_{i; a_1..a_r}(x_1..x_r); at step i every slot is
    updated (outermost first) by v_r += v_{r-1} * x_r^i / i^{a_r}.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    d = args.depth
    if d == 0:
        raise ValueError("empty MPL has no truncation")
    ctx = args.args[0].ctx
    v = [ctx.one()] + [ctx.zero()] * d
    powers = [ctx.one() for _ in range(d)]  # x_r^i, updated per step
    xs = args.args
    a = args.indices
    for i in range(1, N + 1):
        for r in range(d, 0, -1):
            powers[r - 1] = powers[r - 1].mul(xs[r - 1])
            term = v[r - 1].mul(powers[r - 1]).div_int(i ** a[r - 1])
            v[r] = v[r].add(term)
    return v[d]


def tail_bound(indices, alpha: float, N: int) -> float:
    """Upper bound for |Li - Li_N| when all |delta_j| <= alpha < 1."""
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha = {alpha} not in (0,1)")
    if N < 1:
        raise ValueError("N must be >= 1")
    d = len(indices)
    if d == 0:
        return 0.0
    ratio = alpha / (1.0 - alpha)
    # work in logs: alpha^N underflows long before the bound matters
    log_alpha_N = N * math.log(alpha)
    total = 0.0
    suffix = 0  # a_i + ... + a_d, built from the right
    terms = []
    for i in range(d, 0, -1):
        suffix += indices[i - 1]
        terms.append((i, suffix))
    for i, suf in terms:
        lg = (log_alpha_N + (i - 1 - suf) * math.log(N)
              + (d - i + 1) * math.log(ratio))
        total += math.exp(min(lg, 700.0))
    return total * (1.0 + 1e-12)


def choose_truncation(indices, alpha: float, digits: int) -> int:
    """Least N with tail_bound <= 10^-(digits+5)."""
    if digits > 280:
        raise ValueError("tail bounds are computed in double precision; "
                         "digits must be <= 280")
    target = 10.0 ** (-(digits + 5))
    # rough starting point from alpha^N ~ target, then walk
    N = max(len(indices) + 1,
            int((digits + 5) * math.log(10) / -math.log(alpha)) - 5, 1)
    while tail_bound(indices, alpha, N) > target:
        N += max(1, N // 20)
    while N > 1 and tail_bound(indices, alpha, N - 1) <= target:
        N -= 1
    return N


def convergence_rate(poles, p, q) -> float:
    """alpha = |q - p| / min over poles y != p of |y - p|.

    Geometry decision only, computed in doubles.  With no pole distinct
    from p the conventional value 1/2 is returned; p == q gives 0.
    """
    pc, qc = _to_c(p), _to_c(q)
    leg = abs(qc - pc)
    if leg == 0.0:
        return 0.0
    tol = 1e-12 * max(1.0, leg)
    nearest = math.inf
    for y in poles:
        d = abs(_to_c(y) - pc)
        if d > tol:
            nearest = min(nearest, d)
    if math.isinf(nearest):
        return 0.5
    return leg / nearest * (1.0 + 1e-12)


def _to_c(z) -> complex:
    if isinstance(z, CertifiedComplex):
        return z.to_complex()
    return complex(z)


# ----------------------------------------------------------------------
# single-leg evaluation
# ----------------------------------------------------------------------
def _leg_mpl(poles, a, b, alpha_max: float, digits: int) -> CertifiedComplex:
    """int_a^b over consecutive forms, as one geometrically convergent MPL.

    Normalizes to 0 -> 1 via b_i = (y_i - a)/(b - a); zeros (forms with
    pole at ``a``) are grouped behind the preceding nonzero pole as the
    eta_0^{a_j - 1} blocks.  Returns (-1)^d Li with the tail bound added
    to the radius.
    """
    ctx = a.ctx
    if not poles:
        return ctx.one()
    span = b.sub(a)
    normalized = []
    for y in poles:
        num = y.sub(a)
        if num.contains_zero():
            if num.c != 0:
                raise PoleOnPath("pole indistinguishable from a leg endpoint")
            normalized.append(None)  # an eta_0 form after normalization
        else:
            normalized.append(num.div(span))
    if normalized[0] is None:
        raise NonIntegrableEndpoint("first form has its pole at the start")
    # group: each nonzero pole followed by its run of zeros
    groups: list = []  # (pole disc, weight)
    for bn in normalized:
        if bn is None:
            groups[-1][1] += 1
        else:
            groups.append([bn, 1])
    d = len(groups)
    indices = tuple(g[1] for g in groups)
    # delta_j = 1/b_j, x_j = b_{j+1}/b_j (j < d), x_d = 1/b_d
    xs = []
    for j in range(d - 1):
        xs.append(groups[j + 1][0].div(groups[j][0]))
    xs.append(groups[d - 1][0].inverse())
    args = MplArgs.build(indices, xs)
    # the float geometry guaranteed rate <= alpha_max; the certified
    # alpha may exceed it by rounding slack only
    if args.alpha > min(alpha_max * 1.05, 0.999):
        raise AlphaOutOfRange(
            f"leg converges at rate {args.alpha} > {alpha_max}")
    N = choose_truncation(indices, args.alpha, digits)
    val = truncated_mpl(args, N)
    tail = tail_bound(indices, args.alpha, N)
    val = CertifiedComplex(ctx, val.c, val.r + tail if ctx.certified else 0.0)
    return val.neg() if d % 2 else val


def _split_leg(poles, a, b, alpha_max: float, depth: int = 0) -> list:
    """Waypoints a=..=b such that each sub-leg has rate <= alpha_max."""
    rate = convergence_rate(poles, a, b)
    if rate <= alpha_max:
        return [a, b]
    if depth > 40:
        raise PoleOnPath("subdivision does not converge; pole on the path?")
    mid = a.ctx.from_float((_to_c(a) + _to_c(b)) / 2.0)
    left = _split_leg(poles, a, mid, alpha_max, depth + 1)
    right = _split_leg(poles, mid, b, alpha_max, depth + 1)
    return left[:-1] + right


#: process-wide memo of single-leg integrals, keyed by
#: (pole labels, leg endpoints, digits); only used for labelled words.
_LEG_MEMO: dict = {}


def _leg_mpl_memo(poles, labels, a, b, alpha_max, digits):
    if labels is None:
        return _leg_mpl(poles, a, b, alpha_max, digits)
    key = (labels, str(a.c), str(b.c), alpha_max, digits)
    hit = _LEG_MEMO.get(key)
    if hit is None:
        hit = _leg_mpl(poles, a, b, alpha_max, digits)
        _LEG_MEMO[key] = hit
    return hit


def _prefix_states(poles, waypoints, alpha_max: float, digits: int,
                   labels=None) -> list:
    """Chen states F[k] = int over the polyline of the length-k prefix.

    The start point may be a pole of interior forms (only prefixes are
    integrated on the first leg, and their normalized interior zeros are
    legitimate eta_0 blocks); interior waypoints must not be poles.
    """
    ctx = waypoints[0].ctx
    n = len(poles)
    pts = [waypoints[0]]
    for a, b in zip(waypoints, waypoints[1:]):
        pts.extend(_split_leg(poles, a, b, alpha_max)[1:])
    F = [ctx.one()] + [ctx.zero()] * n
    for a, b in zip(pts, pts[1:]):
        new = [ctx.one()]
        for k in range(1, n + 1):
            total = F[k]  # m = k contributes the empty leg integral = 1
            for m in range(0, k):
                if F[m].is_zero():
                    continue
                total = total.add(F[m].mul(_leg_mpl_memo(
                    poles[m:k], None if labels is None else labels[m:k],
                    a, b, alpha_max, digits)))
            new.append(total)
        F = new
    return F


def evaluate_iterated_integral(word: IteratedWord, alpha_max: float = ALPHA_MZV,
                               ) -> CertifiedComplex:
    """int over the word's path of eta_{y_1} ... eta_{y_n}.

    Handles an endpoint pole at ``q`` by reversing the final leg
    ( int_s^q w = (-1)^n int_q^s reversed(w) ), splitting at distance
    eps = min(nearest-other-pole distance, |q-p|/2) from q.
    """
    poles = tuple(word.poles)
    n = len(poles)
    p, q = word.p, word.q
    ctx = p.ctx
    if n == 0:
        return ctx.one()
    path = list(word.waypoints())
    if alpha_max <= 0.0 or alpha_max >= 1.0:
        raise AlphaOutOfRange(f"alpha_max = {alpha_max}")
    pc, qc = _to_c(p), _to_c(q)
    scale = max(abs(qc - pc), 1.0)
    tol = 1e-10 * scale
    _check_poles_off_path(poles, path, tol)
    if abs(_to_c(poles[0]) - pc) <= tol:
        raise NonIntegrableEndpoint("first form has its pole at p")
    labels = word.labels
    q_is_pole = any(abs(_to_c(y) - qc) <= tol for y in poles)
    if not q_is_pole:
        return _prefix_states(poles, path, alpha_max, ctx.digits, labels)[n]
    if abs(_to_c(poles[-1]) - qc) <= tol:
        raise NonIntegrableEndpoint("last form has its pole at q")
    # reversal split: make sure the last waypoint s is close enough to q
    other = [abs(_to_c(y) - qc) for y in poles if abs(_to_c(y) - qc) > tol]
    eps = min(min(other) if other else math.inf, abs(qc - pc) / 2.0)
    s = path[-2]
    if abs(_to_c(s) - qc) > eps * (1.0 + 1e-9):
        sc = qc + (_to_c(s) - qc) * (0.5 * eps / abs(_to_c(s) - qc))
        s = ctx.from_float(sc)
        path = path[:-1] + [s, q]
    F = _prefix_states(poles, path[:-1], alpha_max, ctx.digits, labels)
    G = _prefix_states(tuple(reversed(poles)), (q, s), alpha_max, ctx.digits,
                       None if labels is None else tuple(reversed(labels)))
    total = ctx.zero()
    for m in range(0, n + 1):
        if F[m].is_zero() or G[n - m].is_zero():
            continue
        term = F[m].mul(G[n - m])
        if (n - m) % 2:
            term = term.neg()
        total = total.add(term)
    return total


def _check_poles_off_path(poles, path, tol: float) -> None:
    pts = [_to_c(t) for t in path]
    ends = (pts[0], pts[-1])
    for y in poles:
        yc = _to_c(y)
        if any(abs(yc - e) <= tol for e in ends):
            continue  # endpoint poles are handled by reversal / grouping
        for a, b in zip(pts, pts[1:]):
            if _dist_to_segment(yc, a, b) <= tol:
                raise PoleOnPath(f"pole {yc} lies on the integration path")


def _dist_to_segment(z: complex, a: complex, b: complex) -> float:
    ab = b - a
    den = abs(ab) ** 2
    if den == 0.0:
        return abs(z - a)
    t = ((z - a) * ab.conjugate()).real / den
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * ab))


# ----------------------------------------------------------------------
# alternating multiple zeta values, with memoization
# ----------------------------------------------------------------------
def default_cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV_VAR)


class MzvCache:
    """Append-only persistent store of certified zeta values.

    One record per line: ``key digits <base64 center> <radius hex>``
    where the center is gmpy2's binary serialization.  The file starts
    with a version header.  Loads are last-writer-wins, so concurrent
    appenders (idempotent values) are safe.
    """

    MAGIC = "lawson-mzv-cache 1"

    def __init__(self, path: str | None = None):
        self._lock = threading.Lock()
        self._data: dict = {}
        self._path = path
        if path is not None and os.path.exists(path):
            self._load(path)

    @classmethod
    def at_dir(cls, directory: str | None) -> "MzvCache":
        if directory is None:
            return cls(None)
        os.makedirs(directory, exist_ok=True)
        return cls(os.path.join(directory, "mzv-cache.txt"))

    def _load(self, path: str) -> None:
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != self.MAGIC:
                raise ValueError(f"unrecognized cache header {header!r}")
            for line in fh:
                parts = line.split()
                if len(parts) != 4:
                    continue  # torn concurrent write; drop the record
                key, digits, center64, radhex = parts
                try:
                    center = gmpy2.from_binary(base64.b64decode(center64))
                    radius = float.fromhex(radhex)
                except (ValueError, TypeError):
                    continue
                self._data[(key, int(digits))] = (center, radius)

    def get(self, key: str, ctx: Context) -> CertifiedComplex | None:
        with self._lock:
            rec = self._data.get((key, ctx.digits))
        if rec is None:
            return None
        center, radius = rec
        c = gmpy2.mpc(center, precision=(ctx.prec, ctx.prec))
        return CertifiedComplex(ctx, c, radius if ctx.certified else 0.0)

    def put(self, key: str, value: CertifiedComplex) -> None:
        ctx = value.ctx
        with self._lock:
            self._data[(key, ctx.digits)] = (value.c, value.r)
            if self._path is None:
                return
            fresh = not os.path.exists(self._path)
            with open(self._path, "a", encoding="ascii") as fh:
                if fresh:
                    fh.write(self.MAGIC + "\n")
                center64 = base64.b64encode(gmpy2.to_binary(value.c)).decode()
                fh.write(f"{key} {ctx.digits} {center64} "
                         f"{float(value.r).hex()}\n")

    def __len__(self) -> int:
        return len(self._data)


#: process-wide memo used when no explicit cache is supplied
_MEMO = MzvCache(None)


def alternating_mzv(idx: MzvIndex, ctx: Context,
                    cache: MzvCache | None = None) -> CertifiedComplex:
    """zeta(n_1..n_d; eps_1..eps_d) as a certified disc.

    Evaluated through the integral word on the path 0 -> 1/2 -> 1 with
    the final leg reversed (1 is a pole whenever some partial sign
    product is +1); both legs converge at rate 1/2.
    """
    if not idx.convergent:
        raise DivergentIndex(f"{idx} diverges: outermost entry is (1, +1)")
    if idx.depth == 0:
        return ctx.one()
    store = cache if cache is not None else _MEMO
    key = idx.key()
    hit = store.get(key, ctx)
    if hit is not None:
        return hit
    poles = tuple(ctx.from_int(s) for s in idx.integral_word())
    word = IteratedWord(
        poles=poles, p=ctx.zero(), q=ctx.one(),
        path=(ctx.zero(), ctx.from_rational(1, 2), ctx.one()),
        labels=tuple(idx.integral_word()))
    val = evaluate_iterated_integral(word, alpha_max=ALPHA_MZV)
    if idx.depth % 2:
        val = val.neg()
    store.put(key, val)
    if cache is not None:
        _MEMO.put(key, val)
    return val


def mzv_naive_sum(idx: MzvIndex, N: int, ctx: Context) -> CertifiedComplex:
    """Partial sum over 0 < k_1 < ... < k_d <= N of prod eps^k / k^n.

    Brute-force O(N^d) oracle; no tail bound is attached.
    """
    if not idx.convergent:
        raise DivergentIndex(str(idx))
    d = idx.depth
    if d == 0:
        return ctx.one()

    def layer(j: int, lo: int) -> CertifiedComplex:
        n, e = idx.entries[j]
        total = ctx.zero()
        for k in range(lo + 1, N + 1 - (d - 1 - j)):
            term = ctx.from_rational(e ** k, k ** n)
            if j + 1 < d:
                term = term.mul(layer(j + 1, k))
            total = total.add(term)
        return total

    return layer(0, 0)
