"""Dense univariate polynomials with exact rational coefficients.

Represented as tuples (c0, c1, ..., cd) of Fractions with no trailing
zeros; () is the zero polynomial.  Just the operations the parametric
machinery needs: ring arithmetic, derivatives, exact point evaluation and
exact interval (range-bounding) evaluation by Horner's rule.  Interval
endpoints are rationals, so "interval arithmetic" here incurs no rounding
at all.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exact import RatInterval, iv_add, iv_mul

Poly = tuple[Fraction, ...]

ZERO: Poly = ()
ONE: Poly = (Fraction(1),)
X: Poly = (Fraction(0), Fraction(1))


def poly(coeffs: Sequence) -> Poly:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def degree(p: Poly) -> int:
    return len(p) - 1


def is_zero(p: Poly) -> bool:
    return not p


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return poly(out)


def neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, neg(q))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b != 0:
                out[i + j] += a * b
    return poly(out)


def scale(p: Poly, c) -> Poly:
    c = Fraction(c)
    if c == 0:
        return ZERO
    return tuple(a * c for a in p)


def deriv(p: Poly) -> Poly:
    return tuple(p[i] * i for i in range(1, len(p)))


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def evaluate_interval(p: Poly, iv: RatInterval) -> RatInterval:
    """Certified range enclosure of p over [lo, hi] by interval Horner."""
    acc: RatInterval = (Fraction(0), Fraction(0))
    for c in reversed(p):
        acc = iv_add(iv_mul(acc, iv), (Fraction(c), Fraction(c)))
    return acc


def sup_norm_upper(p: Poly, iv: RatInterval, k: int = 0) -> Fraction:
    """Upper bound for max_{0<=j<=k} sup_I |p^(j)|; coarse but certified."""
    best = Fraction(0)
    cur = p
    for _ in range(k + 1):
        lo, hi = evaluate_interval(cur, iv)
        best = max(best, abs(lo), abs(hi))
        cur = deriv(cur)
    return best


def to_floats(p: Poly) -> list[float]:
    return [float(c) for c in p]


def format_poly(p: Poly, var: str = "t") -> str:
    if not p:
        return "0"
    parts = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        elif i == 1:
            parts.append("%s*%s" % (c, var))
        else:
            parts.append("%s*%s^%d" % (c, var, i))
    return " + ".join(parts)
