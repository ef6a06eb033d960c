"""Deterministic Gaussian CDF evaluation.

erf is evaluated by MPFR (gmpy2) at 160-bit precision and rounded once to
a double: correctly-rounded transcendentals, so the asserted digits do not
depend on the platform's libm.  Absolute error of the returned CDF values
is far below the 1e-12 target.
"""

from __future__ import annotations

import math

import gmpy2

_CTX = gmpy2.context(precision=160)


def erf(x: float) -> float:
    old = gmpy2.get_context()
    try:
        gmpy2.set_context(_CTX)
        return float(gmpy2.erf(gmpy2.mpfr(x)))
    finally:
        gmpy2.set_context(old)


def gaussian_cdf(x: float, mean: float = 0.0, var: float = 1.0) -> float:
    if var <= 0.0:
        return 1.0 if x >= mean else 0.0
    z = (x - mean) / math.sqrt(2.0 * var)
    return 0.5 * (1.0 + erf(z))


def gaussian_interval_mass(lo: float, hi: float, mean: float, var: float) -> float:
    return gaussian_cdf(hi, mean, var) - gaussian_cdf(lo, mean, var)
