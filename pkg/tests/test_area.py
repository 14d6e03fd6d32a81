"""Area table, Cauchy tail bounds, and the monotonicity certificate."""

import math

import pytest

from lawson.area import (
    SOutsideRadius,
    TailConfig,
    area_approx,
    area_error_bound,
    area_table,
    monotonicity_certificate,
    rows_to_csv,
)
from lawson.cdisc import Context
from lawson.omega import PI4
from lawson.series import area_coefficients, build_series

CTX = Context(digits=40)


@pytest.fixture(scope="module")
def alphas7():
    state = build_series(PI4, 7, CTX, mode="minimal")
    return area_coefficients(state)


@pytest.fixture(scope="module")
def tail7(alphas7):
    # valid for every directly computed order: C_A = max |alpha_k| T'^k
    t_prime = 0.2
    c_a = max(alphas7[k].disc_abs_interval()[1] * t_prime ** k
              for k in range(1, 8))
    return TailConfig(C_A=c_a, T_prime=t_prime, N_derivatives=7)


# ----------------------------------------------------------------------
# the truncated sum
# ----------------------------------------------------------------------
def test_area_approx_manual_sum(alphas7):
    g = 4
    s = 1.0 / (2 * g + 2)
    want = 8 * math.pi * (1 - sum(
        alphas7[k].to_complex().real * s ** k for k in range(1, 4)))
    got = area_approx(g, alphas7, CTX, K=3)
    assert abs(got.to_complex().real - want) < 1e-12
    assert abs(got.to_complex().imag) <= got.r + 1e-30


def test_area_approx_rejects_bad_genus(alphas7):
    with pytest.raises(ValueError):
        area_approx(0, alphas7, CTX)


def test_area_approx_trivial_bracket(alphas7):
    # 8 pi (1 - sum |a_k| s^k) <= approx <= 8 pi
    for g in range(3, 11):
        s = 1.0 / (2 * g + 2)
        lo = 8 * math.pi * (1 - sum(
            alphas7[k].disc_abs_interval()[1] * s ** k for k in range(1, 8)))
        v = area_approx(g, alphas7, CTX).to_complex().real
        assert lo - 1e-12 <= v <= 8 * math.pi


# ----------------------------------------------------------------------
# the tail bound
# ----------------------------------------------------------------------
def test_error_bound_formula(tail7):
    g, K = 5, 7
    s = 1.0 / (2 * g + 2)
    q = s / tail7.T_prime
    want = 8 * math.pi * tail7.C_A * q ** (K + 2) / (1 - q * q)
    assert abs(area_error_bound(g, K, tail7) - want) < 1e-9 * want


def test_error_bound_decreases_in_genus(tail7):
    vals = [area_error_bound(g, 7, tail7) for g in range(3, 11)]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_error_bound_outside_radius():
    cfg = TailConfig(C_A=1.0, T_prime=0.1)
    with pytest.raises(SOutsideRadius):
        area_error_bound(3, 21, cfg)  # s = 1/8 > 0.1


def test_tail_dominates_truncation_difference(alphas7, tail7):
    # |approx(K') - approx(K)| <= error_bound(K) for any valid config
    for g in range(3, 11):
        full = area_approx(g, alphas7, CTX, K=7).to_complex().real
        trunc = area_approx(g, alphas7, CTX, K=3).to_complex().real
        assert abs(full - trunc) <= area_error_bound(g, 3, tail7)


# ----------------------------------------------------------------------
# monotonicity certificate
# ----------------------------------------------------------------------
def test_monotonicity_holds(alphas7, tail7):
    bound, holds = monotonicity_certificate(alphas7, tail7)
    assert holds
    assert bound < -0.6


def test_monotonicity_fails_for_huge_tail(alphas7):
    cfg = TailConfig(C_A=1e9, T_prime=0.2, N_derivatives=7)
    bound, holds = monotonicity_certificate(alphas7, cfg)
    assert not holds and bound > 0


def test_monotonicity_needs_room(alphas7, tail7):
    with pytest.raises(SOutsideRadius):
        monotonicity_certificate(alphas7, tail7, T_second=0.25)


def test_monotonicity_checks_sign_preconditions(tail7):
    log2 = CTX.from_int(2).log()
    fake = [CTX.zero(), log2, CTX.zero(), CTX.from_int(-1), CTX.zero(),
            CTX.one(), CTX.zero(), CTX.one()]
    with pytest.raises(ValueError):
        monotonicity_certificate(fake, tail7)


# ----------------------------------------------------------------------
# the table
# ----------------------------------------------------------------------
def test_table_rows_and_csv(alphas7, tail7):
    rows = area_table(alphas7, 3, 10, K=7, cfg=tail7, ctx=CTX)
    assert [r.genus for r in rows] == list(range(3, 11))
    vals = [r.approx.to_complex().real for r in rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    errs = [r.error_bound for r in rows]
    assert all(e > 0 for e in errs)
    assert all(b < a for a, b in zip(errs, errs[1:]))
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "genus,approx,error_bound,K"
    assert len(lines) == 9
    first = lines[1].split(",")
    assert first[0] == "3" and first[3] == "7"
    assert abs(float(first[1]) - vals[0]) < 1e-8


def test_table_without_config(alphas7):
    rows = area_table(alphas7, 3, 4, K=7, ctx=CTX)
    assert all(r.error_bound is None for r in rows)
    line = rows_to_csv(rows).strip().split("\n")[1]
    assert line.split(",")[2] == ""
