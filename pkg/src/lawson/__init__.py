"""Certified computation of Lawson-surface area expansions.

Subpackages build on each other roughly in this order: cdisc (disc
arithmetic) -> wiener (Laurent polynomials) -> mpl (polylogarithms and
iterated integrals) -> omega (Omega-values) -> symbolic (exact
constants) -> series (the order-n parameter algorithm) -> area / ift /
genus2 (the headline bounds) -> cli.
"""

from .cdisc import Context, CertifiedComplex

__all__ = ["Context", "CertifiedComplex"]
__version__ = "0.1.0"
