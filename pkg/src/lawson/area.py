"""Certified area tables with Cauchy-tail error bounds.

The area of the genus-g surface in the family is 8 pi (1 - sum_k
alpha_k s^k) at s = 1/(2g + 2).  Given the coefficients alpha_k
(certified discs from the series module) and a tail configuration
(C_A, T') with |alpha_k| <= C_A / T'^k for all k beyond the directly
computed range, this module evaluates the truncated sum, bounds the
truncation error by the geometric tail, assembles the genus 3..10
table, and certifies that the normalized area 1 - sum alpha_k s^k is
strictly decreasing in s on (0, T''] -- which orders the areas across
genus.

The tail configuration is produced by the fixed-point machinery (see
``cauchy_config``); the table's approx column needs none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cdisc import CertifiedComplex, Context

__all__ = [
    "SOutsideRadius", "TailConfig", "AreaRow", "area_approx",
    "area_error_bound", "monotonicity_certificate", "area_table",
    "rows_to_csv",
]


class SOutsideRadius(ValueError):
    """The evaluation point s is outside the certified radius T'."""


@dataclass(frozen=True)
class TailConfig:
    """Cauchy-estimate data: |alpha_k| <= C_A / T'^k for k > N_derivatives."""

    C_A: float
    T_prime: float
    N_derivatives: int = 0

    def __post_init__(self):
        if not (self.C_A > 0 and self.T_prime > 0):
            raise ValueError("need C_A > 0 and T' > 0")


@dataclass(frozen=True)
class AreaRow:
    """One line of the area table."""

    genus: int
    approx: CertifiedComplex
    error_bound: float | None
    K_used: int


def area_approx(g: int, alphas, ctx: Context | None = None,
                K: int | None = None) -> CertifiedComplex:
    """Certified disc around 8 pi (1 - sum_{k<=K} alpha_k s^k),
    s = 1/(2g + 2).

    ``alphas`` is a series indexed from 0 (the zeroth entry is ignored;
    the expansion has no constant correction).  ``K`` defaults to the
    highest available index.
    """
    if g < 1:
        raise ValueError("need genus g >= 1")
    if ctx is None:
        ctx = Context(digits=60)
    if K is None:
        K = len(alphas) - 1
    s = ctx.from_rational(1, 2 * g + 2)
    total = ctx.one()
    power = ctx.one()
    for k in range(1, K + 1):
        power = power.mul(s)
        total = total.sub(alphas[k].mul(power))
    return total.mul(ctx.pi()).mul_int(8)


def area_error_bound(g: int, K: int, cfg: TailConfig) -> float:
    """Outward-rounded truncation error of the order-K approximation:
    8 pi C_A (s/T')^{K+2} / (1 - (s/T')^2), using that the odd tail
    beyond K starts at order K + 2."""
    s = 1.0 / (2 * g + 2)
    q = s / cfg.T_prime
    if q >= 1.0:
        raise SOutsideRadius(f"s = {s} >= T' = {cfg.T_prime}")
    return (8.0 * math.pi * cfg.C_A * q ** (K + 2) / (1.0 - q * q)
            * (1.0 + 1e-12))


def monotonicity_certificate(alphas, cfg: TailConfig,
                             T_second: float = 0.05
                             ) -> tuple[float, bool]:
    """Certified upper bound on d/ds [1 - sum alpha_k s^k] on (0, T''].

    Uses the exact first coefficient log 2, drops the (verified
    positive) third and fifth coefficients, takes the seventh at its
    certified magnitude, and bounds the rest by the Cauchy tail:

        bound = -log 2 + 7 |alpha_7| T''^6 + 8 C_A T''^7 / (T' - T'')^8.

    Returns (bound, bound < 0).  Requires T'' < T' and a tail
    configuration valid beyond order 7 (N_derivatives >= 7).
    """
    if T_second >= cfg.T_prime:
        raise SOutsideRadius(f"T'' = {T_second} >= T' = {cfg.T_prime}")
    if len(alphas) <= 7:
        raise ValueError("need the coefficients through order 7")
    for k in (3, 5):
        c = alphas[k]
        if not c.to_complex().real - c.r > 0:
            raise ValueError(f"alpha_{k} not verified positive")
    a1 = alphas[1]
    if abs(a1.to_complex() - math.log(2.0)) > a1.r + 1e-12:
        raise ValueError("alpha_1 does not certify log 2")
    a7 = alphas[7].disc_abs_interval()[1]
    tail = (8.0 * cfg.C_A * T_second ** 7
            / (cfg.T_prime - T_second) ** 8)
    bound = -math.log(2.0) + 7.0 * a7 * T_second ** 6 + tail
    return bound, bound < 0.0


def area_table(alphas, gmin: int = 3, gmax: int = 10,
               K: int | None = None, cfg: TailConfig | None = None,
               ctx: Context | None = None) -> list[AreaRow]:
    """Rows (genus, approx, error_bound, K) for genus gmin..gmax.

    Without a tail configuration the error column is left empty.
    """
    if K is None:
        K = len(alphas) - 1
    rows = []
    for g in range(gmin, gmax + 1):
        err = area_error_bound(g, K, cfg) if cfg is not None else None
        rows.append(AreaRow(genus=g, approx=area_approx(g, alphas, ctx, K),
                            error_bound=err, K_used=K))
    return rows


def _sig10(value: float) -> str:
    return f"{value:.10g}"


def rows_to_csv(rows) -> str:
    """CSV text ``genus,approx,error_bound,K`` with 10 significant
    digits in the approx column, matching the table layout."""
    lines = ["genus,approx,error_bound,K"]
    for row in rows:
        approx = float(row.approx.real().to_complex().real)
        err = "" if row.error_bound is None else f"{row.error_bound:.7g}"
        lines.append(f"{row.genus},{_sig10(approx)},{err},{row.K_used}")
    return "\n".join(lines) + "\n"
