"""Spherical triangles on S^3 and the genus-2 triangulation bound."""

import math
import random

import gmpy2
import pytest

from lawson.genus2 import (
    CENTER_PARAMS,
    PAPER_PARAMS,
    AntipodalOrEqual,
    DegenerateTriangle,
    S3Point,
    TriangulationParams,
    bound,
    geodesic_point,
    optimize_bound,
    sigma_P,
    sigma_Q,
    triangle_area,
    triangulation_vertices,
    vertex_angle,
)

E1 = S3Point.normalized(1, 0, 0, 0)
E2 = S3Point.normalized(0, 1, 0, 0)
E3 = S3Point.normalized(0, 0, 1, 0)
E4 = S3Point.normalized(0, 0, 0, 1)


def _random_point(rng):
    return S3Point.normalized(*(rng.gauss(0, 1) for _ in range(4)))


def _dist(a, b):
    return float(gmpy2.acos(max(gmpy2.mpfr(-1),
                                min(gmpy2.mpfr(1), a.dot(b)))))


# ----------------------------------------------------------------------
# points and angles
# ----------------------------------------------------------------------
def test_unit_norm_enforced():
    with pytest.raises(ValueError):
        S3Point((1.0, 1.0, 0.0, 0.0))
    p = S3Point.normalized(3, 4, 0, 0)
    assert abs(sum(float(x) ** 2 for x in p.vec) - 1) < 1e-30


def test_orthonormal_frame_angle():
    assert abs(float(vertex_angle(E1, E2, E3)) - math.pi / 2) < 1e-35


def test_degenerate_direction_angle_zero():
    rng = random.Random(3)
    a, b = _random_point(rng), _random_point(rng)
    assert abs(float(vertex_angle(a, b, b))) < 1e-17


def test_angle_at_first_polygon_corner():
    # tangents towards Q1 and Q2 lie in the w-plane; the angle is the
    # phase difference pi/3
    v = triangulation_vertices(PAPER_PARAMS)
    ang = vertex_angle(v["P1"], v["Q1"], v["Q2"])
    with gmpy2.context(precision=200):
        assert abs(float(ang - gmpy2.const_pi() / 3)) < 1e-35


def test_coincident_and_antipodal_rejected():
    with pytest.raises(AntipodalOrEqual):
        vertex_angle(E1, E1, E2)
    with pytest.raises(AntipodalOrEqual):
        vertex_angle(E1, -E1, E2)


# ----------------------------------------------------------------------
# triangle areas
# ----------------------------------------------------------------------
def test_octant_triangle():
    assert abs(float(triangle_area(E1, E2, E3)) - math.pi / 2) < 1e-35


def test_needle_limit():
    rng = random.Random(5)
    a, b = _random_point(rng), _random_point(rng)
    c = geodesic_point(b, a, 1e-8)
    assert 0 <= float(triangle_area(a, b, c)) < 1e-7


def test_degenerate_triangle_raises():
    with pytest.raises(DegenerateTriangle):
        triangle_area(E1, E2, E2)


def test_area_nonnegative_random():
    rng = random.Random(11)
    for _ in range(25):
        a, b, c = (_random_point(rng) for _ in range(3))
        assert float(triangle_area(a, b, c)) >= -1e-35


def test_split_additivity():
    rng = random.Random(17)
    for _ in range(10):
        a, b, c = (_random_point(rng) for _ in range(3))
        f = rng.uniform(0.2, 0.8)
        d = geodesic_point(b, c, f)
        with gmpy2.context(precision=200):
            whole = triangle_area(a, b, c)
            parts = triangle_area(a, b, d) + triangle_area(a, d, c)
            assert abs(float(whole - parts)) < 1e-20


# ----------------------------------------------------------------------
# symmetries and vertex placement
# ----------------------------------------------------------------------
def test_reflections_are_involutions():
    rng = random.Random(23)
    p = _random_point(rng)
    for sigma in (sigma_P, sigma_Q):
        q = sigma(sigma(p))
        assert max(abs(float(x - y))
                   for x, y in zip(p.vec, q.vec)) < 1e-35


def test_vertices_sit_on_their_fixed_sets():
    v = triangulation_vertices(PAPER_PARAMS)
    for point, sigmas in (("M", (sigma_P, sigma_Q)), ("A", (sigma_Q,)),
                          ("B", (sigma_P,))):
        for sigma in sigmas:
            moved = sigma(v[point])
            assert max(abs(float(x - y)) for x, y in
                       zip(v[point].vec, moved.vec)) < 1e-35, point
    # C lies on the edge between Q1 and P2
    gap = _dist(v["Q1"], v["C"]) + _dist(v["C"], v["P2"]) \
        - _dist(v["Q1"], v["P2"])
    assert abs(gap) < 1e-15
    # the polygon corners are swapped/fixed appropriately
    q2 = sigma_P(v["Q1"])
    assert max(abs(float(x - y)) for x, y in zip(q2.vec, v["Q2"].vec)) \
        < 1e-35


def test_isometry_invariance_of_triangle_areas():
    v = triangulation_vertices(PAPER_PARAMS)
    triangles = [("Q1", "A", "C"), ("A", "M", "B"), ("A", "B", "C"),
                 ("B", "C", "P2")]
    for names in triangles:
        orig = triangle_area(*(v[n] for n in names))
        moved = triangle_area(*(sigma_Q(v[n]) for n in names))
        assert abs(float(orig - moved)) < 1e-20, names


# ----------------------------------------------------------------------
# the bound and the optimizer
# ----------------------------------------------------------------------
def test_reference_parameters_beat_threshold():
    assert bound(PAPER_PARAMS) < 22.45


def test_bound_nonnegative_and_box_checked():
    rng = random.Random(31)
    for _ in range(5):
        p = TriangulationParams(*(rng.uniform(0.2, 1.3) for _ in range(6)))
        assert bound(p) >= 0.0
    with pytest.raises(ValueError):
        bound(TriangulationParams(1.7, 0.5, 0.5, 0.5, 0.5, 0.5))


def test_optimizer_from_center_seed():
    params, value = optimize_bound(CENTER_PARAMS, restarts=2)
    assert value <= 22.57
    assert params.in_range()


def test_optimizer_from_reference_seed():
    params, value = optimize_bound(PAPER_PARAMS, restarts=1)
    assert value <= 22.45 + 1e-3
    assert params.in_range()
