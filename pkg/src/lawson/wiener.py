"""Finite Laurent polynomials in the loop parameter lambda.

Coefficients are :class:`~lawson.cdisc.CertifiedComplex` discs in the
numeric mode, but the arithmetic here is deliberately ring-agnostic:
anything supporting ``+``, ``-``, ``*`` (including ``* int``) works, so
the exact symbolic constants of :mod:`lawson.symbolic` can be used as
coefficients too.

The operations are the ones the parameter algorithm needs throughout:
the star involution (lambda^k -> lambda^-k, coefficients untouched — no
conjugation), even/odd and positive/negative-degree projections, Horner
evaluation, the weighted norm ||u||_rho = sum |u_k| rho^|k|, and
euclidean division by products (lambda - mu_i), implemented root by root
via the explicit quotient q(lambda) = (u(lambda) - u(mu)) / (lambda - mu)
so that ||q||_rho <= ||u||_rho / prod(rho - |mu_i|) holds by construction.
"""

from __future__ import annotations

__all__ = ["LaurentPoly", "NegativeDegreeInput", "PoleAtZero"]


class NegativeDegreeInput(ValueError):
    """divide_by_roots requires a polynomial without negative degrees."""


class PoleAtZero(ZeroDivisionError):
    """Evaluation at a point whose disc contains zero, with negative degrees."""


def _is_exact_zero(c) -> bool:
    probe = getattr(c, "is_zero", None)
    if probe is not None:
        return probe() if callable(probe) else bool(probe)
    return c == 0


class LaurentPoly:
    """Sparse Laurent polynomial ``sum_k coeffs[k] * lambda^k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None, prune: bool = True):
        cs = {}
        if coeffs:
            for k, c in coeffs.items():
                if prune and _is_exact_zero(c):
                    continue
                cs[int(k)] = c
        self.coeffs = cs

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls({})

    @classmethod
    def monomial(cls, c, k: int = 0) -> "LaurentPoly":
        return cls({k: c})

    # ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int, default=None):
        """Coefficient of lambda^k, or ``default`` (may be None) if absent."""
        return self.coeffs.get(k, default)

    def min_degree(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    def max_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def support(self):
        return sorted(self.coeffs)

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------
    def add(self, other: "LaurentPoly") -> "LaurentPoly":
        cs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            if k in cs:
                cs[k] = cs[k] + c
            else:
                cs[k] = c
        return LaurentPoly(cs)

    def sub(self, other: "LaurentPoly") -> "LaurentPoly":
        cs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            if k in cs:
                cs[k] = cs[k] - c
            else:
                cs[k] = -c
        return LaurentPoly(cs)

    def neg(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self.coeffs.items()}, prune=False)

    def mul(self, other: "LaurentPoly") -> "LaurentPoly":
        cs: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                p = c1 * c2
                if k in cs:
                    cs[k] = cs[k] + p
                else:
                    cs[k] = p
        return LaurentPoly(cs)

    def scale(self, c) -> "LaurentPoly":
        """Multiply every coefficient by the ring element (or int) c."""
        if isinstance(c, int) and c == 0:
            return LaurentPoly.zero()
        return LaurentPoly({k: v * c for k, v in self.coeffs.items()})

    def shift(self, m: int) -> "LaurentPoly":
        """Multiply by lambda^m."""
        return LaurentPoly({k + m: c for k, c in self.coeffs.items()}, prune=False)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    # ------------------------------------------------------------------
    # involutions and projections
    # ------------------------------------------------------------------
    def star(self) -> "LaurentPoly":
        """lambda^k -> lambda^-k with coefficients unchanged."""
        return LaurentPoly({-k: c for k, c in self.coeffs.items()}, prune=False)

    def project(self, which: str) -> "LaurentPoly":
        """Select degree classes: even / odd / pos / strict_pos / neg / const.

        ``pos`` keeps k >= 1 (the ^+ part), ``neg`` keeps k <= -1,
        ``const`` keeps k == 0; ``strict_pos`` is an alias of ``pos``.
        Complementary projections sum back to the polynomial.
        """
        if which == "even":
            keep = lambda k: k % 2 == 0
        elif which == "odd":
            keep = lambda k: k % 2 != 0
        elif which in ("pos", "strict_pos"):
            keep = lambda k: k >= 1
        elif which == "neg":
            keep = lambda k: k <= -1
        elif which == "const":
            keep = lambda k: k == 0
        else:
            raise ValueError(f"unknown projection {which!r}")
        return LaurentPoly({k: c for k, c in self.coeffs.items() if keep(k)},
                           prune=False)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def eval(self, lam):
        """Horner evaluation at a ring element lam.

        Negative degrees are evaluated by a second Horner pass in 1/lam;
        for disc arguments whose disc contains 0 this raises PoleAtZero.
        """
        zero = lam * 0
        if not self.coeffs:
            return zero
        result = zero
        nonneg = sorted((k for k in self.coeffs if k >= 0), reverse=True)
        if nonneg:
            acc = self.coeffs[nonneg[0]]
            prev = nonneg[0]
            for k in nonneg[1:]:
                for _ in range(prev - k - 1):
                    acc = acc * lam
                acc = acc * lam + self.coeffs[k]
                prev = k
            for _ in range(prev):
                acc = acc * lam
            result = result + acc
        negs = sorted((k for k in self.coeffs if k < 0))
        if negs:
            contains_zero = getattr(lam, "contains_zero", None)
            if contains_zero is not None and contains_zero():
                raise PoleAtZero("negative degrees evaluated at a disc containing 0")
            inv = 1 / lam
            acc = self.coeffs[negs[0]]
            prev = -negs[0]
            for k in negs[1:]:
                for _ in range(prev + k - 1):
                    acc = acc * inv
                acc = acc * inv + self.coeffs[k]
                prev = -k
            for _ in range(prev):
                acc = acc * inv
            result = result + acc
        return result

    def eval_at_zero(self):
        """The lambda^0 coefficient; errors if negative degrees exist."""
        if self.coeffs and self.min_degree() < 0:
            raise PoleAtZero("evaluation at 0 with negative degrees")
        c0 = self.coeffs.get(0)
        if c0 is None:
            if not self.coeffs:
                raise ValueError("zero polynomial has no intrinsic ring; "
                                 "use coeff(0, default)")
            any_c = next(iter(self.coeffs.values()))
            c0 = any_c * 0
        return c0

    # ------------------------------------------------------------------
    # norm and division (numeric coefficients only)
    # ------------------------------------------------------------------
    def rho_norm(self, rho: float) -> tuple[float, float]:
        """Outward interval for sum_k |u_k| rho^|k| (requires rho > 1)."""
        if not rho > 1.0:
            raise ValueError("rho must be > 1")
        lo = 0.0
        hi = 0.0
        for k, c in self.coeffs.items():
            clo, chi = c.disc_abs_interval()
            w = rho ** abs(k)
            lo += clo * w
            hi += chi * w
        return (lo * (1.0 - 1e-12), hi * (1.0 + 1e-12))

    def divide_by_roots(self, roots) -> tuple["LaurentPoly", "LaurentPoly"]:
        """Euclidean division by prod_i (lambda - mu_i).

        Returns (q, r) with ``self = prod(lambda - mu_i) * q + r`` and
        deg r < len(roots).  Implemented root by root through synthetic
        division (top-down Horner), accumulating the remainder in Newton
        form and expanding at the end.  Roots may be ints or ring
        elements.
        """
        if not self.coeffs:
            return LaurentPoly.zero(), LaurentPoly.zero()
        if self.min_degree() < 0:
            raise NegativeDegreeInput("dividend has negative degrees")
        roots = list(roots)
        current = self
        newton: list = []  # remainder coefficients r_0, r_1, ... (Newton form)
        for mu in roots:
            if current.is_zero():
                newton.append(None)
                continue
            d = current.max_degree()
            dense = [current.coeffs.get(j) for j in range(d + 1)]
            q: list = [None] * max(d, 0)
            acc = dense[d]
            for j in range(d - 1, -1, -1):
                q[j] = acc
                nxt = acc * mu
                acc = nxt if dense[j] is None else dense[j] + nxt
            newton.append(acc)  # this is current(mu)
            current = LaurentPoly({j: c for j, c in enumerate(q) if c is not None})
        # expand r = sum_m newton[m] * prod_{i<m} (lambda - mu_i)
        r = LaurentPoly.zero()
        basis = None  # prod_{i<m} (lambda - mu_i); starts as 1 implicitly
        for m, rm in enumerate(newton):
            if rm is not None and not _is_exact_zero(rm):
                term = LaurentPoly.monomial(rm)
                if basis is not None:
                    term = term.mul(basis)
                r = r.add(term)
            if m + 1 < len(newton):
                lin = _linear_factor(self, roots[m])
                basis = lin if basis is None else basis.mul(lin)
        return current, r

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {c!r}" for k, c in sorted(self.coeffs.items()))
        return f"LaurentPoly({{{terms}}})"


def _linear_factor(sample: LaurentPoly, mu) -> LaurentPoly:
    """(lambda - mu) with coefficients in the ring of ``sample``."""
    any_c = next(iter(sample.coeffs.values()))
    one = any_c * 0 + 1
    if isinstance(mu, int):
        mu_c = any_c * 0 + mu
    else:
        mu_c = mu
    return LaurentPoly({1: one, 0: -mu_c})
