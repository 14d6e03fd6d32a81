"""Disc arithmetic: containment against a higher-precision oracle.

Every operation on CertifiedComplex must return a disc containing the
exact image of the inputs.  For point inputs (radius 0 up to rounding)
the exact image is computable to many more digits, which gives an
independent oracle: recompute at 4x the precision and check the
high-precision point lies inside the returned disc.
"""

import math
import random

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from lawson.cdisc import (
    BranchCutViolation,
    CertifiedComplex,
    Context,
    DivisorContainsZero,
    DomainError,
)

CTX = Context(digits=30)
HI = Context(digits=140)


def _hi_point(z: CertifiedComplex) -> gmpy2.mpc:
    return gmpy2.mpc(z.c, precision=(HI.prec, HI.prec))


def _contains_point(disc: CertifiedComplex, w: gmpy2.mpc) -> bool:
    d = HI.g.abs(gmpy2.mpc(disc.c, precision=(HI.prec, HI.prec)) - w)
    return float(d) <= disc.r * (1 + 1e-12) + 1e-300


def _rand_disc(rng: random.Random, ctx=CTX) -> CertifiedComplex:
    re = rng.uniform(-3, 3)
    im = rng.uniform(-3, 3)
    return ctx.from_str(f"{re!r}", f"{im!r}")


# ----------------------------------------------------------------------
# field operations against the 4x-precision oracle
# ----------------------------------------------------------------------
def test_field_ops_contain_high_precision_result():
    rng = random.Random(7)
    for _ in range(200):
        a = _rand_disc(rng)
        b = _rand_disc(rng)
        wa, wb = _hi_point(a), _hi_point(b)
        assert _contains_point(a + b, HI.g.add(wa, wb))
        assert _contains_point(a - b, HI.g.sub(wa, wb))
        assert _contains_point(a * b, HI.g.mul(wa, wb))
        if not b.contains_zero():
            assert _contains_point(a / b, HI.g.div(wa, wb))


def test_elementary_functions_contain_high_precision_result():
    rng = random.Random(11)
    checked = 0
    for _ in range(200):
        a = _rand_disc(rng)
        wa = _hi_point(a)
        assert _contains_point(a.exp(), HI.g.exp(wa))
        assert _contains_point(a.cos(), HI.g.cos(wa))
        assert _contains_point(a.sin(), HI.g.sin(wa))
        if abs(float(a.c.imag)) > 1e-6 or float(a.c.real) > 1e-6:
            assert _contains_point(a.log(), HI.g.log(wa))
            assert _contains_point(a.sqrt(), HI.g.sqrt(wa))
            checked += 1
    assert checked > 50


def test_inverse_trig_contain_high_precision_result():
    rng = random.Random(13)
    for _ in range(200):
        a = _rand_disc(rng)
        wa = _hi_point(a)
        try:
            d = a.arccos()
        except (DomainError, BranchCutViolation):
            pass
        else:
            assert _contains_point(d, HI.g.acos(wa))
        try:
            d = a.arctan()
        except (DomainError, BranchCutViolation):
            pass
        else:
            assert _contains_point(d, HI.g.atan(wa))


def test_integer_scaling_and_powers():
    rng = random.Random(17)
    for _ in range(100):
        a = _rand_disc(rng)
        wa = _hi_point(a)
        n = rng.randrange(1, 9)
        assert _contains_point(a.mul_int(n), HI.g.mul(wa, n))
        assert _contains_point(a.div_int(n), HI.g.div(wa, n))
        wpow = wa
        for _ in range(n - 1):
            wpow = HI.g.mul(wpow, wa)
        assert _contains_point(a.pow_int(n), wpow)


# ----------------------------------------------------------------------
# containment is preserved for fat discs, not only points
# ----------------------------------------------------------------------
@settings(max_examples=60, deadline=None)
@given(
    re=st.floats(-2, 2), im=st.floats(-2, 2),
    dre=st.floats(-1, 1), dim=st.floats(-1, 1),
)
def test_fat_disc_image_containment(re, im, dre, dim):
    """A point sampled inside a disc maps into the image disc of exp/mul."""
    center = CTX.from_str(f"{re!r}", f"{im!r}")
    fat = CertifiedComplex(CTX, center.c, 0.25)
    # a concrete point of the fat disc (offset norm <= 0.15*sqrt(2) < 0.25)
    pt = CTX.from_str(f"{re + 0.15 * dre!r}", f"{im + 0.15 * dim!r}")
    assert fat.contains(pt)
    w = _hi_point(pt)
    assert _contains_point(fat.exp(), HI.g.exp(w))
    assert _contains_point(fat * fat, HI.g.mul(w, w))
    assert _contains_point(fat + fat, HI.g.add(w, w))


# ----------------------------------------------------------------------
# guard rails
# ----------------------------------------------------------------------
def test_division_by_disc_containing_zero_raises():
    tiny = CertifiedComplex(CTX, CTX.from_int(0).c, 1e-10)
    with pytest.raises(DivisorContainsZero):
        CTX.one() / tiny


def test_log_branch_cut_guard():
    near_cut = CertifiedComplex(CTX, CTX.from_int(-2).c, 0.5)
    with pytest.raises(BranchCutViolation):
        near_cut.log()
    # same disc is fine on the positive-cut branch
    near_cut.log(cut="pos")
    with pytest.raises(BranchCutViolation):
        CertifiedComplex(CTX, CTX.from_int(2).c, 0.5).log(cut="pos")


def test_sqrt_branch_cut_guard():
    with pytest.raises(BranchCutViolation):
        CertifiedComplex(CTX, CTX.from_int(-1).c, 0.25).sqrt()


def test_reference_values():
    ctx = Context(digits=50)
    pi = ctx.pi()
    assert (ctx.i() * pi).exp().contains(ctx.from_int(-1))
    assert pi.sin().contains_zero()
    two = ctx.from_int(2)
    s = two.sqrt()
    assert (s * s).contains(two)
    assert s.r < 1e-45
    lo, hi = ctx.from_str("3", "4").disc_abs_interval()
    assert lo <= 5.0 <= hi and hi - lo < 1e-10


def test_radius_grows_with_operand_radius():
    a = CertifiedComplex(CTX, CTX.from_str("1.25", "-0.5").c, 1e-9)
    b = CertifiedComplex(CTX, a.c, 1e-3)
    for op in (lambda z: z.exp(), lambda z: z * z, lambda z: z.sqrt()):
        assert op(a).r < op(b).r


def test_abs_disc_is_one_lipschitz():
    a = CertifiedComplex(CTX, CTX.from_str("3", "4").c, 0.125)
    d = a.abs_disc()
    assert d.contains(CTX.from_int(5))
    assert d.r <= 0.125 * (1 + 1e-9) + 1e-12
