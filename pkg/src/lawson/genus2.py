"""Spherical triangle geometry on S^3 and the genus-2 area bound.

The genus-2 surface is built from 48 congruent pieces, each bounded by
a geodesic 4-gon star around a central vertex.  Replacing one piece by
four geodesic triangles with vertices on the symmetry sets of the
boundary polygon gives, by the least-area property of the piece, the
upper bound

    Area <= 48 [ area(Q1 A C) + area(A M B) + area(A B C)
                 + area(B C P2) ],

where the five movable vertices M, A, B, C are parametrized by six
angles.  Triangle areas come from Gauss-Bonnet: angle sum minus pi,
with angles measured between unit tangents of the arc-length geodesics
at each vertex.  The computation runs in gmpy2 multiprecision (default
40 digits); the optimizer works on floats and the returned parameters
are re-evaluated at full precision.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import gmpy2

__all__ = [
    "AntipodalOrEqual", "DegenerateTriangle", "S3Point",
    "TriangulationParams", "PAPER_PARAMS", "CENTER_PARAMS",
    "vertex_angle", "triangle_area", "geodesic_point", "sigma_P",
    "sigma_Q", "triangulation_vertices", "bound", "optimize_bound",
]

_DIGITS = 40
_PREC = int(math.ceil(_DIGITS * math.log2(10))) + 20


def _mp(fn):
    """Run a function under the module's multiprecision context."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with gmpy2.context(precision=_PREC):
            return fn(*args, **kwargs)
    return wrapper


class AntipodalOrEqual(ValueError):
    """No unique geodesic: the two points coincide or are antipodal."""


class DegenerateTriangle(ValueError):
    """The three vertices do not span a proper geodesic triangle."""


@dataclass(frozen=True)
class S3Point:
    """Unit vector in R^4 = C^2, coordinates as gmpy2 reals."""

    vec: tuple

    def __post_init__(self):
        norm = sum(x * x for x in self.vec)
        if abs(norm - 1) > gmpy2.mpfr("1e-30"):
            raise ValueError(f"not a unit vector: |v|^2 = {norm}")

    @classmethod
    @_mp
    def normalized(cls, *coords) -> "S3Point":
        v = [gmpy2.mpfr(c) for c in coords]
        n = gmpy2.sqrt(sum(x * x for x in v))
        return cls(tuple(x / n for x in v))

    @classmethod
    def from_complex_pair(cls, z, w) -> "S3Point":
        return cls.normalized(z.real, z.imag, w.real, w.imag)

    def dot(self, other: "S3Point"):
        return sum(a * b for a, b in zip(self.vec, other.vec))

    def __neg__(self) -> "S3Point":
        return S3Point(tuple(-x for x in self.vec))

    def to_floats(self) -> tuple:
        return tuple(float(x) for x in self.vec)


def _tangent(a: S3Point, b: S3Point) -> tuple:
    """Unit tangent at a of the geodesic towards b."""
    c = a.dot(b)
    disc = 1 - c * c
    if disc <= gmpy2.mpfr("1e-40"):
        raise AntipodalOrEqual("points coincide or are antipodal")
    s = gmpy2.sqrt(disc)
    return tuple((x - c * y) / s for x, y in zip(b.vec, a.vec))


@_mp
def vertex_angle(a: S3Point, b: S3Point, c: S3Point):
    """Angle at a between the geodesics towards b and c."""
    u = _tangent(a, b)
    v = _tangent(a, c)
    d = sum(x * y for x, y in zip(u, v))
    one = gmpy2.mpfr(1)
    d = max(-one, min(one, d))
    return gmpy2.acos(d)


@_mp
def triangle_area(a: S3Point, b: S3Point, c: S3Point):
    """Gauss-Bonnet area of the geodesic triangle: angle sum - pi."""
    try:
        total = (vertex_angle(a, b, c) + vertex_angle(b, c, a)
                 + vertex_angle(c, a, b))
    except AntipodalOrEqual as exc:
        raise DegenerateTriangle(str(exc)) from exc
    return total - gmpy2.const_pi()


@_mp
def geodesic_point(a: S3Point, b: S3Point, fraction) -> S3Point:
    """Point at the given arc-length fraction from a to b."""
    f = gmpy2.mpfr(fraction)
    theta = gmpy2.acos(max(gmpy2.mpfr(-1), min(gmpy2.mpfr(1), a.dot(b))))
    if theta == 0:
        return a
    s = gmpy2.sin(theta)
    ca = gmpy2.sin((1 - f) * theta) / s
    cb = gmpy2.sin(f * theta) / s
    return S3Point.normalized(*(ca * x + cb * y
                                for x, y in zip(a.vec, b.vec)))


# ----------------------------------------------------------------------
# the symmetries and the parametrized vertices
# ----------------------------------------------------------------------
@_mp
def sigma_P(p: S3Point) -> S3Point:
    """(z, w) -> (z, e^{i pi/3} conj(w)): reflection fixing the P_i."""
    x1, x2, x3, x4 = p.vec
    third = gmpy2.const_pi() / 3
    c, s = gmpy2.cos(third), gmpy2.sin(third)
    return S3Point((x1, x2, c * x3 + s * x4, s * x3 - c * x4))


@_mp
def sigma_Q(p: S3Point) -> S3Point:
    """(z, w) -> (i conj(z), w): reflection fixing the Q_i."""
    x1, x2, x3, x4 = p.vec
    return S3Point((x2, x1, x3, x4))


@dataclass(frozen=True)
class TriangulationParams:
    """The six angles placing M, A, B, C; all in [0, pi/2)."""

    s0: float
    s1: float
    s2: float
    s3: float
    t1: float
    t2: float

    def in_range(self) -> bool:
        return all(0 <= v < math.pi / 2 for v in self.as_tuple())

    def as_tuple(self) -> tuple:
        return (self.s0, self.s1, self.s2, self.s3, self.t1, self.t2)


#: the six angles found by the reference minimization
PAPER_PARAMS = TriangulationParams(1.13641, 1.27441, 0.848594, 1.06941,
                                   0.134219, 1.4755)
#: neutral seed at the center of the parameter box
CENTER_PARAMS = TriangulationParams(*(math.pi / 4,) * 6)


@_mp
def triangulation_vertices(params: TriangulationParams) -> dict:
    """The fixed polygon corners and the parametrized M, A, B, C.

    M sits on the common fixed geodesic of both reflections, A on the
    fixed set of sigma_Q, B on the fixed set of sigma_P, and C on the
    edge between Q_1 and P_2.
    """
    pi = gmpy2.const_pi()
    s0, s1, s2, s3, t1, t2 = (gmpy2.mpfr(v) for v in params.as_tuple())

    def polar(angle):
        return gmpy2.cos(angle), gmpy2.sin(angle)

    c4, s4 = polar(pi / 4)
    c6, s6 = polar(pi / 6)
    c3, s3_ = polar(pi / 3)
    cs0, ss0 = polar(s0)
    m = S3Point.normalized(cs0 * c4, cs0 * s4, ss0 * c6, ss0 * s6)
    cs1, ss1 = polar(s1)
    ct1, st1 = polar(t1)
    a = S3Point.normalized(cs1 * c4, cs1 * s4, ss1 * ct1, ss1 * st1)
    cs2, ss2 = polar(s2)
    ct2, st2 = polar(t2)
    # convention: s2 measures the arc from the z-circle, so that the
    # reference parameter set is a minimum of the bound
    b = S3Point.normalized(cs2 * ct2, cs2 * st2, ss2 * c6, ss2 * s6)
    cs3, ss3 = polar(s3)
    c = S3Point.normalized(0, cs3, ss3, 0)
    return {
        "P1": S3Point.normalized(1, 0, 0, 0),
        "P2": S3Point.normalized(0, 1, 0, 0),
        "Q1": S3Point.normalized(0, 0, 1, 0),
        "Q2": S3Point.normalized(0, 0, c3, s3_),
        "M": m, "A": a, "B": b, "C": c,
    }


@_mp
def bound(params: TriangulationParams) -> float:
    """48 x (sum of the four triangle areas), outward-rounded."""
    if not params.in_range():
        raise ValueError("parameters outside [0, pi/2)")
    v = triangulation_vertices(params)
    total = (triangle_area(v["Q1"], v["A"], v["C"])
             + triangle_area(v["A"], v["M"], v["B"])
             + triangle_area(v["A"], v["B"], v["C"])
             + triangle_area(v["B"], v["C"], v["P2"]))
    return float(48 * total) * (1.0 + 1e-12)


def optimize_bound(seed: TriangulationParams | None = None,
                   restarts: int = 4, maxiter: int = 4000,
                   rng_seed: int = 0
                   ) -> tuple[TriangulationParams, float]:
    """Simplex minimization of the bound over the parameter box, with
    jittered restarts, followed by a full-precision re-evaluation of
    the best parameters found."""
    import numpy as np
    from scipy.optimize import minimize

    if seed is None:
        seed = CENTER_PARAMS
    eps = 1e-9
    hi = math.pi / 2 - eps

    def objective(x):
        p = TriangulationParams(*(min(max(v, 0.0), hi) for v in x))
        try:
            return bound(p)
        except DegenerateTriangle:
            return 1e6

    rng = np.random.default_rng(rng_seed)
    best_x = np.array(seed.as_tuple(), dtype=float)
    best_f = objective(best_x)
    for trial in range(restarts):
        x0 = np.array(seed.as_tuple(), dtype=float)
        if trial > 0:
            x0 = np.clip(x0 + rng.normal(0.0, 0.15, size=6), 0.0, hi)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-12,
                                "fatol": 1e-12})
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    params = TriangulationParams(*(min(max(float(v), 0.0), hi)
                                   for v in best_x))
    return params, bound(params)
