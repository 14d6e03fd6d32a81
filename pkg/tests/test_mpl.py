"""Polylogarithm engine: truncation, tails, paths, zeta values."""

import math
import random

import pytest

from lawson.cdisc import Context
from lawson.mpl import (
    ALPHA_MZV,
    AlphaOutOfRange,
    DivergentIndex,
    IteratedWord,
    MplArgs,
    MzvCache,
    MzvIndex,
    NonIntegrableEndpoint,
    alternating_mzv,
    choose_truncation,
    convergence_rate,
    evaluate_iterated_integral,
    mzv_naive_sum,
    tail_bound,
    truncated_mpl,
)

CTX = Context(digits=40)

LOG2 = 0.693147180559945309417232121458176568
ZETA2 = math.pi ** 2 / 6
ZETA3 = 1.202056903159594285399738161511449990


def _close(disc, value, slack=5e-15):
    """The reference is a double, so compare at double accuracy."""
    return abs(disc.to_complex() - value) <= disc.r + slack


# ----------------------------------------------------------------------
# truncated MPLs
# ----------------------------------------------------------------------
def test_truncated_li1_half_approaches_log2():
    args = MplArgs.build([1], [CTX.from_rational(1, 2)])
    v = truncated_mpl(args, 60)
    assert abs(v.to_complex().real - LOG2) < tail_bound([1], 0.5, 60)


def test_truncated_li2_at_one_is_partial_sum():
    # |delta| = 1 is outside the geometric certificate, but the finite
    # sum itself is still well-defined; bypass the certificate check.
    args = MplArgs(indices=(2,), args=(CTX.one(),), alpha=1.0)
    v = truncated_mpl(args, 10)
    expect = sum(1.0 / k ** 2 for k in range(1, 11))
    assert abs(v.to_complex().real - expect) < 1e-15


def test_truncated_depth2_matches_naive_double_sum():
    rng = random.Random(2)
    for _ in range(10):
        x = CTX.from_str(f"{rng.uniform(-0.9, 0.9)!r}")
        y = CTX.from_str(f"{rng.uniform(-0.9, 0.9)!r}")
        N = rng.randrange(5, 50)
        args = MplArgs(indices=(1, 1), args=(x, y), alpha=0.9)
        fast = truncated_mpl(args, N)
        naive = CTX.zero()
        for n in range(1, N + 1):
            for m in range(n + 1, N + 1):
                naive = naive + (x ** n) * (y ** m) / (n * m)
        assert fast.contains(CTX.make(naive.c))


def test_fast_recursion_vs_naive_depth3():
    rng = random.Random(4)
    for _ in range(5):
        xs = [CTX.from_str(f"{rng.uniform(0.1, 0.95)!r}",
                           f"{rng.uniform(-0.3, 0.3)!r}") for _ in range(3)]
        a = [rng.randrange(1, 4) for _ in range(3)]
        N = 20
        args = MplArgs(indices=tuple(a), args=tuple(xs), alpha=0.99)
        fast = truncated_mpl(args, N)
        naive = CTX.zero()
        for n1 in range(1, N + 1):
            for n2 in range(n1 + 1, N + 1):
                for n3 in range(n2 + 1, N + 1):
                    t = (xs[0] ** n1) * (xs[1] ** n2) * (xs[2] ** n3)
                    naive = naive + t / (n1 ** a[0] * n2 ** a[1] * n3 ** a[2])
        assert fast.contains(CTX.make(naive.c))


# ----------------------------------------------------------------------
# tail bounds
# ----------------------------------------------------------------------
def test_tail_bound_reference_value():
    # d=1, a=(1), alpha=1/2, N=10: (1/2)^10 / 10 * (1/2)/(1/2)
    assert tail_bound([1], 0.5, 10) == pytest.approx(2 ** -10 / 10, rel=1e-9)


def test_tail_bound_vanishes_with_alpha():
    prev = math.inf
    for alpha in (0.5, 0.1, 1e-3, 1e-8):
        b = tail_bound([2, 1], alpha, 25)
        assert b < prev
        prev = b
    assert prev < 1e-190


def test_tail_bound_rejects_bad_alpha():
    for alpha in (0.0, 1.0, -0.3, 2.0):
        with pytest.raises(AlphaOutOfRange):
            tail_bound([1], alpha, 10)


def test_tail_bound_dominates_truncation_error():
    """|Li_{2N} - Li_N| <= tail_bound(N) on random geometric arguments."""
    rng = random.Random(8)
    for _ in range(100):
        d = rng.randrange(1, 4)
        a = [rng.randrange(1, 4) for _ in range(d)]
        # draw arguments with all partial products bounded by alpha
        alpha = rng.uniform(0.2, 0.8)
        deltas = [rng.uniform(0.05, alpha) *
                  complex(math.cos(t := rng.uniform(0, 2 * math.pi)),
                          math.sin(t)) for _ in range(d)]
        xs = []
        for j in range(d):
            nxt = deltas[j + 1] if j + 1 < d else 1.0
            xs.append(CTX.from_float(deltas[j] / nxt))
        args = MplArgs(indices=tuple(a), args=tuple(xs), alpha=alpha)
        N = rng.randrange(d + 1, 25)
        diff = truncated_mpl(args, 2 * N) - truncated_mpl(args, N)
        lo, hi = diff.disc_abs_interval()
        assert lo <= tail_bound(a, alpha, N) * (1 + 1e-9)


def test_choose_truncation_is_minimal():
    N = choose_truncation([2, 1], 0.5, 30)
    assert tail_bound([2, 1], 0.5, N) <= 1e-35
    assert tail_bound([2, 1], 0.5, N - 1) > 1e-35


# ----------------------------------------------------------------------
# convergence rate
# ----------------------------------------------------------------------
def test_rate_standard_mzv_split():
    assert convergence_rate([0, 1, -1], 0.0, 0.5) == pytest.approx(0.5)
    assert convergence_rate([0, 1, -1], 1.0, 0.5) == pytest.approx(0.5)


def test_rate_off_axis_reference():
    # the r2 -> r1 leg of the deformed path through the lower half plane
    poles = [0, 1, -1]
    r1 = 0.3 - 0.5625j
    r2 = 0.5 - 0.3125j
    assert convergence_rate(poles, r2, r1) == pytest.approx(0.542984, abs=1e-6)
    assert convergence_rate(poles, -1j, r1) == pytest.approx(0.530477, abs=1e-6)


def test_rate_degenerate_cases():
    assert convergence_rate([0, 1], 0.5, 0.5) == 0.0
    assert convergence_rate([0.3], 0.3, 0.9) == 0.5  # no pole besides p


# ----------------------------------------------------------------------
# iterated integrals
# ----------------------------------------------------------------------
def _word(poles, p=0, q=1, path=None):
    mk = lambda z: CTX.from_float(complex(z))
    return IteratedWord(
        poles=tuple(mk(y) for y in poles), p=mk(p), q=mk(q),
        path=None if path is None else tuple(mk(t) for t in path))


def test_integral_eta_minus1_is_log2():
    v = evaluate_iterated_integral(_word([-1]))
    assert _close(v, LOG2)


def test_integral_eta1_eta0_is_minus_zeta2():
    v = evaluate_iterated_integral(_word([1, 0], path=[0, 0.5, 1]))
    assert _close(v, -ZETA2)


def test_nonintegrable_endpoints_raise():
    with pytest.raises(NonIntegrableEndpoint):
        evaluate_iterated_integral(_word([0, 1], path=[0, 0.5, 1]))
    with pytest.raises(NonIntegrableEndpoint):
        evaluate_iterated_integral(_word([-1, 1], path=[0, 0.5, 1]))


def test_subdivision_invariance_random_words():
    rng = random.Random(12)
    done = 0
    while done < 50:
        n = rng.randrange(1, 5)
        poles = [complex(rng.uniform(-2, 2), rng.choice([1, -1]) *
                         rng.uniform(0.4, 2)) for _ in range(n)]
        w = _word(poles)
        coarse = evaluate_iterated_integral(w, alpha_max=0.5)
        fine = evaluate_iterated_integral(w, alpha_max=0.3)
        delta = coarse - fine
        lo, _ = delta.disc_abs_interval()
        assert lo <= coarse.r + fine.r
        done += 1


def test_path_reversal_agreement():
    rng = random.Random(19)
    for _ in range(20):
        n = rng.randrange(1, 4)
        poles = [complex(rng.uniform(-2, 2), rng.choice([1, -1]) *
                         rng.uniform(0.4, 2)) for _ in range(n)]
        fwd = evaluate_iterated_integral(_word(poles))
        rev = evaluate_iterated_integral(_word(list(reversed(poles)), p=1, q=0))
        if n % 2:
            rev = rev.neg()
        diff = fwd - rev
        lo, _ = diff.disc_abs_interval()
        assert lo <= fwd.r + rev.r


# ----------------------------------------------------------------------
# alternating zeta values
# ----------------------------------------------------------------------
def test_zeta_bar2():
    v = alternating_mzv(MzvIndex.from_signed(-2), CTX)
    assert _close(v, -math.pi ** 2 / 12)


def test_zeta_bar1_bar1():
    v = alternating_mzv(MzvIndex.from_signed(-1, -1), CTX)
    assert _close(v, 0.5 * LOG2 ** 2 - math.pi ** 2 / 12)


def test_zeta_2_bar1():
    v = alternating_mzv(MzvIndex.from_signed(2, -1), CTX)
    assert _close(v, math.pi ** 2 / 12 * LOG2 - ZETA3 / 4)


def test_stuffle_relation():
    z = lambda *s: alternating_mzv(MzvIndex.from_signed(*s), CTX)
    diff = z(-1) * z(-2) - (z(-1, -2) + z(-2, -1) + z(1, 2))
    lo, _ = diff.disc_abs_interval()
    assert lo == 0.0 and diff.r < 1e-35


def test_shuffle_relation():
    z = lambda *s: alternating_mzv(MzvIndex.from_signed(*s), CTX)
    diff = z(-1) * z(2) - (z(-1, 2) + z(-1, -2) + z(-2, -1))
    lo, _ = diff.disc_abs_interval()
    assert lo == 0.0 and diff.r < 1e-35


def test_divergent_index_rejected():
    assert not MzvIndex.from_signed(2, 1).convergent
    with pytest.raises(DivergentIndex):
        alternating_mzv(MzvIndex.from_signed(2, 1), CTX)
    assert MzvIndex.from_signed(1, 2).convergent
    assert MzvIndex.from_signed(-1).convergent


def test_naive_sum_oracle():
    v = mzv_naive_sum(MzvIndex.from_signed(-1), 20000, CTX)
    assert abs(v.to_complex().real + LOG2) < 1e-4
    v3 = mzv_naive_sum(MzvIndex.from_signed(3), 1000, CTX)
    assert abs(v3.to_complex().real - ZETA3) < 1e-5
    assert mzv_naive_sum(MzvIndex(()), 10, CTX).contains(CTX.one())


def test_naive_sum_converges_to_certified_value():
    for signed in [(-2,), (-1, -2), (1, 2)]:
        idx = MzvIndex.from_signed(*signed)
        fast = alternating_mzv(idx, CTX)
        slow = mzv_naive_sum(idx, 1200, CTX)
        # the defining series converges like log(N)/N at worst
        assert abs(fast.to_complex() - slow.to_complex()) < 1e-2


def test_cache_round_trip(tmp_path):
    cache = MzvCache.at_dir(str(tmp_path))
    idx = MzvIndex.from_signed(-1, 2)
    v1 = alternating_mzv(idx, CTX, cache=cache)
    reloaded = MzvCache.at_dir(str(tmp_path))
    assert len(reloaded) == 1
    v2 = alternating_mzv(idx, CTX, cache=reloaded)
    assert v2.c == v1.c and v2.r == v1.r
    # different precision misses the cache and recomputes
    ctx80 = Context(digits=80)
    v3 = alternating_mzv(idx, ctx80, cache=reloaded)
    assert v3.r < v1.r
